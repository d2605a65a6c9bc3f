#include "sggnn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "sggnn/dataset.hpp"
#include "sggnn/graph.hpp"
#include "sggnn/knn.hpp"
#include "sggnn/models.hpp"
#include "sggnn/structural_features.hpp"

namespace sggnn {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// The metrics and histogram commands pin k = 3; only run/coefs read the
// configured k list.
constexpr Index kMetricsK = 3;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

const char* tv_name(TvConvention c) {
  switch (c) {
    case TvConvention::raw: return "raw";
    case TvConvention::row_normalized: return "row_normalized";
    case TvConvention::sym_normalized: return "sym_normalized";
  }
  return "?";
}

TvConvention tv_from_name(const std::string& s) {
  if (s == "raw") return TvConvention::raw;
  if (s == "row_normalized") return TvConvention::row_normalized;
  if (s == "sym_normalized") return TvConvention::sym_normalized;
  throw std::invalid_argument("config: unknown tv_convention '" + s + "'");
}

void expect_keys(const json& obj, const char* ctx,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw std::invalid_argument(std::string("config: unknown key '") +
                                  item.key() + "' in " + ctx);
    }
  }
}

void check_feature_names(const std::vector<std::string>& names,
                         const std::vector<std::string>& catalog,
                         const char* kind) {
  for (const auto& n : names) {
    if (std::find(catalog.begin(), catalog.end(), n) == catalog.end()) {
      throw std::invalid_argument(std::string("config: unknown ") + kind +
                                  " feature '" + n + "'");
    }
  }
}

// A dataset with its undirected training graph, the eigenvector convergence
// flag, and the requested KNN graphs in (feats, role, global) x ascending-k
// order. Held by value; graph addresses stay put so model operator caches
// stay valid for the lifetime of the Prepared.
struct Prepared {
  Dataset data;
  Graph undirected;
  FeatureReport report;
  std::vector<std::pair<std::string, Graph>> knn;
};

Prepared prepare(const HarnessConfig& cfg, const std::string& name,
                 const std::vector<Index>& ks) {
  const fs::path base = cfg.data_dir / name;
  Dataset data = load_dataset(base / "edges.tsv", base / "features.csv",
                              base / "labels.csv", name);

  FeatureSpec role_spec = cfg.role_features.empty()
                              ? default_role_spec()
                              : FeatureSpec{FeatureKind::role,
                                            cfg.role_features, true};
  FeatureSpec global_spec = cfg.global_features.empty()
                                ? default_global_spec()
                                : FeatureSpec{FeatureKind::global,
                                              cfg.global_features, true};
  FeatureReport report;
  const Matrix z_role = role_features(data.graph, role_spec);
  const Matrix z_global = global_features(data.graph, global_spec, &report);

  Prepared out{std::move(data), Graph(), report, {}};
  out.undirected = to_undirected(out.data.graph);

  const std::pair<const char*, const Matrix*> sources[] = {
      {"feats", &out.data.features}, {"role", &z_role}, {"global", &z_global}};
  out.knn.reserve(3 * ks.size());
  for (const auto& [src, z] : sources) {
    for (Index k : ks) {
      KnnConfig kc{k, cfg.knn.symmetrize};
      out.knn.emplace_back("knn-" + std::string(src) + "-" + std::to_string(k),
                           knn_graph(*z, kc));
    }
  }
  return out;
}

std::vector<std::pair<std::string, const Graph*>> graph_list(
    const Prepared& pd) {
  std::vector<std::pair<std::string, const Graph*>> gl;
  gl.reserve(1 + pd.knn.size());
  gl.emplace_back("original", &pd.undirected);
  for (const auto& [n, g] : pd.knn) gl.emplace_back(n, &g);
  return gl;
}

void write_metadata(const fs::path& out_dir, const char* command,
                    const HarnessConfig& cfg, const ordered_json& extra) {
  ordered_json m;
  m["command"] = command;
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                static_cast<unsigned long long>(cfg.config_hash));
  m["config_hash"] = hash_hex;
  m["seed"] = cfg.seed;
  ordered_json conv;
  conv["tv_convention"] = tv_name(cfg.tv_convention);
  conv["knn_symmetrize"] = cfg.knn.symmetrize;
  conv["knn_tie_break"] = "smaller node index";
  conv["g_feat_source"] = "raw node features";
  conv["structural_features_standardized"] = true;
  conv["original_graph_symmetrized"] = true;
  conv["splits"] =
      "stratified per class: floor(fraction) to train and val, rest to test";
  m["conventions"] = conv;
  for (const auto& item : extra.items()) m[item.key()] = item.value();
  write_text(out_dir / "metadata.json", m.dump(2) + "\n");
}

using ModelFactory =
    std::function<std::unique_ptr<Model>(std::mt19937_64&)>;

struct CellOutcome {
  std::vector<double> accuracies;
  Vector alpha_mean;  // zero-length unless the model has a mixture
};

// Splits depend on the dataset only, so every model sees the same split
// realizations; model initialization varies per cell and split.
CellOutcome run_cell(const ModelFactory& make,
                     const std::vector<const Graph*>& graphs, const Matrix& x,
                     const LabelVector& y, const HarnessConfig& cfg,
                     const std::string& dataset, const std::string& cell_tag) {
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed ^ fnv1a(dataset + "/splits");
  const std::uint64_t cell_seed = cfg.seed ^ fnv1a(dataset + "/" + cell_tag);

  CellOutcome out;
  Vector alpha_sum;
  for (Index s = 0; s < tc.num_splits; ++s) {
    const SplitMask masks = make_splits(y, tc, s);
    std::mt19937_64 mrng(cell_seed +
                         0x9E3779B97F4A7C15ULL *
                             static_cast<std::uint64_t>(s + 1));
    auto model = make(mrng);
    const RunResult r = train(*model, graphs, x, y, masks, tc);
    out.accuracies.push_back(r.test_accuracy);
    if (r.alphas.size() > 0) {
      if (alpha_sum.size() == 0) alpha_sum = Vector::Zero(r.alphas.size());
      alpha_sum += r.alphas;
    }
  }
  if (alpha_sum.size() > 0)
    out.alpha_mean = alpha_sum / static_cast<double>(tc.num_splits);
  return out;
}

SgGnnConfig mixture_config(const HarnessConfig& cfg, Index in_dim,
                           Index num_graphs, int num_classes,
                           BranchFamily family, AlphaMode mode) {
  SgGnnConfig mc;
  mc.branch_configs.assign(
      static_cast<std::size_t>(num_graphs),
      BranchConfig{family, {in_dim, cfg.model.embedding_dim},
                   cfg.model.filter_order, false});
  mc.embedding_dim = cfg.model.embedding_dim;
  mc.mlp_dims = {cfg.model.mlp_hidden, num_classes};
  mc.dropout_rate = cfg.model.dropout;
  mc.alpha_mode = mode;
  return mc;
}

}  // namespace

HarnessConfig load_config(const fs::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open config file: " + json_path.string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());

  HarnessConfig cfg;
  cfg.config_hash = fnv1a(text);
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: root must be an object");
  expect_keys(j, "config root",
              {"data_dir", "datasets", "features", "knn", "tv_convention",
               "model", "train", "histogram_bins", "seed"});

  if (j.contains("data_dir"))
    cfg.data_dir = j.at("data_dir").get<std::string>();
  if (j.contains("datasets"))
    cfg.datasets = j.at("datasets").get<std::vector<std::string>>();
  if (j.contains("features")) {
    const json& f = j.at("features");
    expect_keys(f, "features", {"role", "global"});
    if (f.contains("role"))
      cfg.role_features = f.at("role").get<std::vector<std::string>>();
    if (f.contains("global"))
      cfg.global_features = f.at("global").get<std::vector<std::string>>();
  }
  if (j.contains("knn")) {
    const json& k = j.at("knn");
    expect_keys(k, "knn", {"k_values", "symmetrize"});
    if (k.contains("k_values"))
      cfg.knn.k_values = k.at("k_values").get<std::vector<Index>>();
    if (k.contains("symmetrize"))
      cfg.knn.symmetrize = k.at("symmetrize").get<bool>();
  }
  if (j.contains("tv_convention"))
    cfg.tv_convention = tv_from_name(j.at("tv_convention").get<std::string>());
  if (j.contains("model")) {
    const json& m = j.at("model");
    expect_keys(m, "model",
                {"hidden_dim", "embedding_dim", "mlp_hidden", "filter_order",
                 "dropout"});
    if (m.contains("hidden_dim"))
      cfg.model.hidden_dim = m.at("hidden_dim").get<Index>();
    if (m.contains("embedding_dim"))
      cfg.model.embedding_dim = m.at("embedding_dim").get<Index>();
    if (m.contains("mlp_hidden"))
      cfg.model.mlp_hidden = m.at("mlp_hidden").get<Index>();
    if (m.contains("filter_order"))
      cfg.model.filter_order = m.at("filter_order").get<Index>();
    if (m.contains("dropout"))
      cfg.model.dropout = m.at("dropout").get<double>();
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    expect_keys(t, "train",
                {"learning_rate", "weight_decay", "max_epochs", "patience",
                 "train_fraction", "val_fraction", "test_fraction",
                 "num_splits"});
    if (t.contains("learning_rate"))
      cfg.train.learning_rate = t.at("learning_rate").get<double>();
    if (t.contains("weight_decay"))
      cfg.train.weight_decay = t.at("weight_decay").get<double>();
    if (t.contains("max_epochs"))
      cfg.train.max_epochs = t.at("max_epochs").get<Index>();
    if (t.contains("patience"))
      cfg.train.patience = t.at("patience").get<Index>();
    if (t.contains("train_fraction"))
      cfg.train.train_fraction = t.at("train_fraction").get<double>();
    if (t.contains("val_fraction"))
      cfg.train.val_fraction = t.at("val_fraction").get<double>();
    if (t.contains("test_fraction"))
      cfg.train.test_fraction = t.at("test_fraction").get<double>();
    if (t.contains("num_splits"))
      cfg.train.num_splits = t.at("num_splits").get<Index>();
  }
  if (j.contains("histogram_bins"))
    cfg.histogram_bins = j.at("histogram_bins").get<Index>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (cfg.datasets.empty())
    throw std::invalid_argument("config: datasets list is empty");
  if (cfg.knn.k_values.empty())
    throw std::invalid_argument("config: knn.k_values is empty");
  for (Index k : cfg.knn.k_values)
    if (k < 1) throw std::invalid_argument("config: knn k values must be >= 1");
  if (cfg.histogram_bins < 1)
    throw std::invalid_argument("config: histogram_bins must be >= 1");
  check_feature_names(cfg.role_features, role_feature_catalog(), "role");
  check_feature_names(cfg.global_features, global_feature_catalog(), "global");

  if (cfg.data_dir.is_relative())
    cfg.data_dir = json_path.parent_path() / cfg.data_dir;
  return cfg;
}

std::vector<std::string> cmd_metrics(const HarnessConfig& cfg,
                                     const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> failures;
  std::string csv =
      "dataset,tv_original,h_edge_original,tv_knn_feats_3,h_edge_knn_feats_3,"
      "tv_knn_role_3,h_edge_knn_role_3,tv_knn_global_3,h_edge_knn_global_3\n";
  ordered_json converged;

  for (const std::string& name : cfg.datasets) {
    try {
      const Prepared pd = prepare(cfg, name, {kMetricsK});
      std::string row = name;
      row += "," + fmt(total_variation(pd.data.labels, pd.undirected,
                                       cfg.tv_convention));
      row += "," + fmt(edge_homophily(pd.undirected, pd.data.labels));
      fs::create_directories(out_dir / name);
      for (const auto& [gname, g] : pd.knn) {
        row += "," + fmt(total_variation(pd.data.labels, g, cfg.tv_convention));
        row += "," + fmt(edge_homophily(g, pd.data.labels));
        write_edge_file(out_dir / name / (gname + ".tsv"), g);
      }
      csv += row + "\n";
      converged[name] = pd.report.eigenvector_converged;
      std::printf("[metrics] %s done\n", name.c_str());
    } catch (const std::exception& e) {
      failures.push_back(name + ": " + e.what());
    }
  }

  write_text(out_dir / "metrics.csv", csv);
  ordered_json extra;
  extra["metrics_k"] = kMetricsK;
  extra["role_features"] = cfg.role_features.empty() ? role_feature_catalog()
                                                     : cfg.role_features;
  extra["global_features"] = cfg.global_features.empty()
                                 ? global_feature_catalog()
                                 : cfg.global_features;
  extra["eigenvector_converged"] = converged;
  write_metadata(out_dir, "metrics", cfg, extra);
  return failures;
}

std::vector<std::string> cmd_homophily_hist(const HarnessConfig& cfg,
                                            const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> failures;
  ordered_json converged;

  for (const std::string& name : cfg.datasets) {
    try {
      const Prepared pd = prepare(cfg, name, {kMetricsK});
      const Graph* global = nullptr;
      for (const auto& [gname, g] : pd.knn)
        if (gname == "knn-global-" + std::to_string(kMetricsK)) global = &g;

      const Vector h_orig = node_homophily(pd.undirected, pd.data.labels);
      const Vector h_knn = node_homophily(*global, pd.data.labels);
      const std::vector<Index> c_orig =
          homophily_histogram(h_orig, cfg.histogram_bins);
      const std::vector<Index> c_knn =
          homophily_histogram(h_knn, cfg.histogram_bins);

      std::string csv = "bin_low,bin_high,count_original,count_knn_global\n";
      const double width = 1.0 / static_cast<double>(cfg.histogram_bins);
      for (Index b = 0; b < cfg.histogram_bins; ++b) {
        csv += fmt(static_cast<double>(b) * width) + "," +
               fmt(static_cast<double>(b + 1) * width) + "," +
               std::to_string(c_orig[static_cast<std::size_t>(b)]) + "," +
               std::to_string(c_knn[static_cast<std::size_t>(b)]) + "\n";
      }
      write_text(out_dir / ("hist_" + name + ".csv"), csv);
      converged[name] = pd.report.eigenvector_converged;
      std::printf("[homophily-hist] %s done\n", name.c_str());
    } catch (const std::exception& e) {
      failures.push_back(name + ": " + e.what());
    }
  }

  ordered_json extra;
  extra["knn_graph"] = "knn-global-" + std::to_string(kMetricsK);
  extra["histogram_bins"] = cfg.histogram_bins;
  extra["bin_rule"] = "equal width on [0,1], last bin right-closed, "
                      "nodes without neighbors dropped";
  extra["eigenvector_converged"] = converged;
  write_metadata(out_dir, "homophily-hist", cfg, extra);
  return failures;
}

std::vector<std::string> cmd_run(const HarnessConfig& cfg,
                                 const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> failures;

  std::string csv = "dataset,graph,model,mean_accuracy,std_accuracy";
  for (Index s = 0; s < cfg.train.num_splits; ++s)
    csv += ",acc_" + std::to_string(s + 1);
  csv += "\n";

  auto append_row = [&](const std::string& dataset, const std::string& graph,
                        const std::string& model, const CellOutcome& co) {
    double sum = 0.0, sq = 0.0;
    for (double a : co.accuracies) {
      sum += a;
      sq += a * a;
    }
    const double n = static_cast<double>(co.accuracies.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sq / n - mean * mean);
    std::string row = dataset + "," + graph + "," + model + "," + fmt(mean) +
                      "," + fmt(std::sqrt(var));
    for (double a : co.accuracies) row += "," + fmt(a);
    csv += row + "\n";
  };

  std::vector<std::string> graph_names;
  for (const std::string& name : cfg.datasets) {
    std::unique_ptr<Prepared> pd;
    try {
      pd = std::make_unique<Prepared>(prepare(cfg, name, cfg.knn.k_values));
    } catch (const std::exception& e) {
      failures.push_back(name + ": " + e.what());
      continue;
    }
    const auto gl = graph_list(*pd);
    if (graph_names.empty())
      for (const auto& [gname, g] : gl) graph_names.push_back(gname);
    const Index in_dim = pd->data.features.cols();
    const Index n = pd->data.graph.num_nodes();
    const int num_classes = pd->data.labels.num_classes;

    for (const auto& [gname, g] : gl) {
      const std::vector<const Graph*> single{g};
      const auto run_single = [&](const std::string& model_name,
                                  const ModelFactory& make) {
        try {
          const CellOutcome co = run_cell(make, single, pd->data.features,
                                          pd->data.labels, cfg, name,
                                          gname + "/" + model_name);
          append_row(name, gname, model_name, co);
          std::printf("[run] %s %s %s done\n", name.c_str(), gname.c_str(),
                      model_name.c_str());
        } catch (const std::exception& e) {
          failures.push_back(name + "/" + gname + "/" + model_name + ": " +
                             e.what());
        }
      };
      run_single("gcn", [&](std::mt19937_64& r) -> std::unique_ptr<Model> {
        return std::make_unique<GcnModel>(
            GcnConfig{{in_dim, cfg.model.hidden_dim, num_classes},
                      cfg.model.dropout},
            r);
      });
      run_single("fbgcn", [&](std::mt19937_64& r) -> std::unique_ptr<Model> {
        return std::make_unique<FbGcnModel>(
            FbGcnConfig{{in_dim, cfg.model.hidden_dim, num_classes},
                        cfg.model.filter_order, cfg.model.dropout, false},
            r);
      });
    }

    std::vector<const Graph*> all;
    for (const auto& [gname, g] : gl) all.push_back(g);
    const auto run_mixture = [&](const std::string& model_name,
                                 AlphaMode mode) {
      try {
        const SgGnnConfig mc =
            mixture_config(cfg, in_dim, static_cast<Index>(all.size()),
                           num_classes, BranchFamily::gcn, mode);
        const CellOutcome co = run_cell(
            [&](std::mt19937_64& r) -> std::unique_ptr<Model> {
              return std::make_unique<SgGnnModel>(mc, n, r);
            },
            all, pd->data.features, pd->data.labels, cfg, name,
            "all-graphs/" + model_name);
        append_row(name, "all-graphs", model_name, co);
        std::printf("[run] %s all-graphs %s done\n", name.c_str(),
                    model_name.c_str());
      } catch (const std::exception& e) {
        failures.push_back(name + "/all-graphs/" + model_name + ": " +
                           e.what());
      }
    };
    run_mixture("sggnn", AlphaMode::global);
    run_mixture("sggnn-node", AlphaMode::per_node);
  }

  write_text(out_dir / "results.csv", csv);
  ordered_json extra;
  extra["k_values"] = cfg.knn.k_values;
  extra["graphs"] = graph_names;
  extra["num_splits"] = cfg.train.num_splits;
  extra["mixture_branch_family"] = "gcn";
  write_metadata(out_dir, "run", cfg, extra);
  return failures;
}

std::vector<std::string> cmd_coefs(const HarnessConfig& cfg,
                                   const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> failures;

  const std::pair<const char*, BranchFamily> families[] = {
      {"gcn", BranchFamily::gcn}, {"fbgcn", BranchFamily::fbgcn}};
  std::vector<std::string> graph_names;

  for (const auto& [fam_name, family] : families) {
    std::string csv = "dataset";
    std::string body;
    bool header_done = false;
    for (const std::string& name : cfg.datasets) {
      try {
        const Prepared pd = prepare(cfg, name, cfg.knn.k_values);
        const auto gl = graph_list(pd);
        if (!header_done) {
          for (const auto& [gname, g] : gl) csv += "," + gname;
          csv += "\n";
          header_done = true;
        }
        if (graph_names.empty())
          for (const auto& [gname, g] : gl) graph_names.push_back(gname);
        std::vector<const Graph*> all;
        for (const auto& [gname, g] : gl) all.push_back(g);

        const SgGnnConfig mc = mixture_config(
            cfg, pd.data.features.cols(), static_cast<Index>(all.size()),
            pd.data.labels.num_classes, family, AlphaMode::global);
        const Index n = pd.data.graph.num_nodes();
        const CellOutcome co = run_cell(
            [&](std::mt19937_64& r) -> std::unique_ptr<Model> {
              return std::make_unique<SgGnnModel>(mc, n, r);
            },
            all, pd.data.features, pd.data.labels, cfg, name,
            std::string("coefs/") + fam_name);

        std::string row = name;
        for (Index i = 0; i < co.alpha_mean.size(); ++i)
          row += "," + fmt(co.alpha_mean[i]);
        body += row + "\n";
        std::printf("[coefs] %s %s done\n", name.c_str(), fam_name);
      } catch (const std::exception& e) {
        failures.push_back(std::string(fam_name) + "/" + name + ": " +
                           e.what());
      }
    }
    if (!header_done) csv += "\n";
    write_text(out_dir / (std::string("coefs_") + fam_name + ".csv"),
               csv + body);
  }

  ordered_json extra;
  extra["k_values"] = cfg.knn.k_values;
  extra["graphs"] = graph_names;
  extra["num_splits"] = cfg.train.num_splits;
  extra["alpha_mode"] = "global";
  extra["alpha_aggregation"] = "mean over splits of the trained model's "
                               "softmaxed mixture weights";
  write_metadata(out_dir, "coefs", cfg, extra);
  return failures;
}

}  // namespace sggnn
