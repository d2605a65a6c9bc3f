#include "sggnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace sggnn {

namespace {

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Stage streams keep the label, edge, feature, and swap draws independent,
// so changing one stage never perturbs the others.
constexpr std::uint64_t kLabelStream = 1;
constexpr std::uint64_t kEdgeStream = 2;
constexpr std::uint64_t kFeatureStream = 3;
constexpr std::uint64_t kSwapStream = 4;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t pair_key(Index u, Index v) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

// Undirected pair list with u < v, plus a membership set for rejection.
struct PairList {
  std::vector<std::pair<Index, Index>> pairs;
  std::unordered_set<std::uint64_t> seen;

  bool contains(Index u, Index v) const {
    return seen.count(pair_key(u, v)) != 0;
  }
  void add(Index u, Index v) {
    pairs.emplace_back(u, v);
    seen.insert(pair_key(u, v));
  }
};

std::vector<double> rank_weights(Index n, double exponent) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        std::pow(static_cast<double>(i + 1), -exponent);
  return w;
}

// Class centers and per-node noise are scaled by 1/sqrt(dim) so the expected
// center norm is center_scale and the expected noise norm is noise_scale,
// independent of the feature dimension.
Matrix cluster_features(const IntVector& labels, int num_classes, Index dim,
                        double center_scale, double noise_scale,
                        std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix centers(num_classes, dim);
  for (int c = 0; c < num_classes; ++c)
    for (Index f = 0; f < dim; ++f)
      centers(c, f) = unit(rng) * center_scale * inv_root;

  const Index n = labels.size();
  Matrix x(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index f = 0; f < dim; ++f)
      x(i, f) = centers(labels[i], f) + unit(rng) * noise_scale * inv_root;
  return x;
}

Graph pairs_to_graph(Index n, const PairList& list) {
  std::vector<Triplet> trip;
  trip.reserve(list.pairs.size());
  for (const auto& [u, v] : list.pairs) trip.emplace_back(u, v, 1.0);
  return Graph::from_edges(n, trip, /*directed=*/true);
}

[[noreturn]] void sampling_stalled(const std::string& name,
                                   const char* stage) {
  throw std::runtime_error(name + ": " + stage +
                           " sampling stalled; parameters leave too few "
                           "admissible node pairs");
}

}  // namespace

Dataset generate_hub_quota(const std::string& name, const HubQuotaParams& p,
                           std::uint64_t seed) {
  const Index n = std::accumulate(p.class_sizes.begin(), p.class_sizes.end(),
                                  Index{0});
  const int num_classes = static_cast<int>(p.class_sizes.size());
  if (n < 2 || num_classes < 1)
    throw std::invalid_argument("generate_hub_quota: need >= 2 nodes");
  for (Index size : p.class_sizes)
    if (size < 1)
      throw std::invalid_argument("generate_hub_quota: empty class");
  if (p.num_edges < 0 || p.edge_homophily < 0.0 || p.edge_homophily > 1.0)
    throw std::invalid_argument("generate_hub_quota: bad edge parameters");
  if (p.feature_dim < 1)
    throw std::invalid_argument("generate_hub_quota: feature_dim must be >= 1");

  // Shuffled label assignment decouples class membership from sampling rank,
  // so every class gets its share of hub nodes.
  IntVector labels(n);
  {
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int c = 0; c < num_classes; ++c)
      pool.insert(pool.end(), static_cast<std::size_t>(p.class_sizes[c]), c);
    auto rng = seeded_rng(seed, kLabelStream);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (Index i = 0; i < n; ++i) labels[i] = pool[static_cast<std::size_t>(i)];
  }

  const Index same_target = std::llround(p.edge_homophily *
                                         static_cast<double>(p.num_edges));
  const Index cross_target = p.num_edges - same_target;

  std::vector<Index> class_count(static_cast<std::size_t>(num_classes), 0);
  for (Index i = 0; i < n; ++i) ++class_count[static_cast<std::size_t>(labels[i])];
  Index same_capacity = 0;
  for (Index count : class_count) same_capacity += count * (count - 1) / 2;
  const Index total_pairs = n * (n - 1) / 2;
  if (same_target > same_capacity || cross_target > total_pairs - same_capacity)
    throw std::invalid_argument(
        "generate_hub_quota: edge quota exceeds available node pairs");

  const std::vector<double> w = rank_weights(n, p.hub_exponent);
  auto rng = seeded_rng(seed, kEdgeStream);
  std::discrete_distribution<int> any_node(w.begin(), w.end());

  // Same-label draws start from nodes whose class has a partner available.
  std::vector<double> same_start = w;
  for (Index i = 0; i < n; ++i)
    if (class_count[static_cast<std::size_t>(labels[i])] < 2)
      same_start[static_cast<std::size_t>(i)] = 0.0;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(num_classes));
  std::vector<std::vector<double>> member_w(static_cast<std::size_t>(num_classes));
  for (Index i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    members[c].push_back(i);
    member_w[c].push_back(w[static_cast<std::size_t>(i)]);
  }
  std::vector<std::discrete_distribution<int>> classmate;
  classmate.reserve(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c)
    classmate.emplace_back(member_w[static_cast<std::size_t>(c)].begin(),
                           member_w[static_cast<std::size_t>(c)].end());

  PairList list;
  list.pairs.reserve(static_cast<std::size_t>(p.num_edges));
  constexpr int kMaxConsecutiveRejects = 200000;

  if (same_target > 0) {
    std::discrete_distribution<int> start(same_start.begin(), same_start.end());
    int rejects = 0;
    while (static_cast<Index>(list.pairs.size()) < same_target) {
      const Index i = start(rng);
      const auto c = static_cast<std::size_t>(labels[i]);
      const Index j = members[c][static_cast<std::size_t>(classmate[labels[i]](rng))];
      const Index u = std::min(i, j), v = std::max(i, j);
      if (u == v || list.contains(u, v)) {
        if (++rejects > kMaxConsecutiveRejects)
          sampling_stalled(name, "same-label edge");
        continue;
      }
      rejects = 0;
      list.add(u, v);
    }
  }
  {
    int rejects = 0;
    while (static_cast<Index>(list.pairs.size()) < p.num_edges) {
      const Index i = any_node(rng);
      const Index j = any_node(rng);
      const Index u = std::min(i, j), v = std::max(i, j);
      if (u == v || labels[u] == labels[v] || list.contains(u, v)) {
        if (++rejects > kMaxConsecutiveRejects)
          sampling_stalled(name, "cross-label edge");
        continue;
      }
      rejects = 0;
      list.add(u, v);
    }
  }

  auto feature_rng = seeded_rng(seed, kFeatureStream);
  Matrix x = cluster_features(labels, num_classes, p.feature_dim,
                              p.center_scale, p.noise_scale, feature_rng);
  return Dataset{pairs_to_graph(n, list), std::move(x),
                 LabelVector{std::move(labels), num_classes}, name};
}

Dataset generate_degree_quantile(const std::string& name,
                                 const DegreeQuantileParams& p,
                                 std::uint64_t seed) {
  const Index n = p.num_nodes;
  if (n < 2 || p.num_classes < 1 || p.num_classes > n)
    throw std::invalid_argument(
        "generate_degree_quantile: need 1 <= num_classes <= num_nodes >= 2");
  const Index total_pairs = n * (n - 1) / 2;
  if (p.num_edges < 0 || p.num_edges > total_pairs)
    throw std::invalid_argument(
        "generate_degree_quantile: num_edges exceeds available node pairs");
  if (p.edge_homophily < 0.0 || p.edge_homophily > 1.0)
    throw std::invalid_argument(
        "generate_degree_quantile: edge_homophily outside [0, 1]");
  if (p.feature_dim < 1)
    throw std::invalid_argument(
        "generate_degree_quantile: feature_dim must be >= 1");

  const std::vector<double> w = rank_weights(n, p.weight_exponent);
  auto rng = seeded_rng(seed, kEdgeStream);
  std::discrete_distribution<int> any_node(w.begin(), w.end());

  PairList list;
  list.pairs.reserve(static_cast<std::size_t>(p.num_edges));
  constexpr int kMaxConsecutiveRejects = 200000;
  int rejects = 0;
  while (static_cast<Index>(list.pairs.size()) < p.num_edges) {
    const Index i = any_node(rng);
    const Index j = any_node(rng);
    const Index u = std::min(i, j), v = std::max(i, j);
    if (u == v || list.contains(u, v)) {
      if (++rejects > kMaxConsecutiveRejects)
        sampling_stalled(name, "edge");
      continue;
    }
    rejects = 0;
    list.add(u, v);
  }

  // Labels are degree quantiles of the initial graph. The swap phase below
  // preserves every node's degree, so they remain exact quantiles of the
  // final graph as well.
  std::vector<Index> degree(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : list.pairs) {
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Index da = degree[static_cast<std::size_t>(a)];
    const Index db = degree[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });
  IntVector labels(n);
  for (Index pos = 0; pos < n; ++pos)
    labels[order[static_cast<std::size_t>(pos)]] =
        static_cast<int>(pos * p.num_classes / n);

  auto same = [&](Index u, Index v) { return labels[u] == labels[v] ? 1 : 0; };
  Index same_count = 0;
  for (const auto& [u, v] : list.pairs) same_count += same(u, v);
  const Index same_target = std::llround(p.edge_homophily *
                                         static_cast<double>(p.num_edges));

  // Double-edge swaps: replace (a,b),(c,d) with (a,c),(b,d) or (a,d),(b,c).
  // A swap is accepted when it strictly shrinks the distance to the target
  // same-label count; count-neutral swaps are accepted half the time to keep
  // the chain mixing.
  if (same_count != same_target) {
    if (p.num_edges < 2) sampling_stalled(name, "homophily swap");
    auto swap_rng = seeded_rng(seed, kSwapStream);
    std::uniform_int_distribution<std::size_t> pick(0, list.pairs.size() - 1);
    std::bernoulli_distribution coin(0.5);
    const std::uint64_t proposal_cap =
        1000ULL * static_cast<std::uint64_t>(p.num_edges) + 10000ULL;
    std::uint64_t proposals = 0;
    while (same_count != same_target) {
      if (++proposals > proposal_cap)
        sampling_stalled(name, "homophily swap");
      const std::size_t e1 = pick(swap_rng);
      const std::size_t e2 = pick(swap_rng);
      if (e1 == e2) continue;
      const auto [a, b] = list.pairs[e1];
      Index c = list.pairs[e2].first, d = list.pairs[e2].second;
      if (coin(swap_rng)) std::swap(c, d);
      if (a == c || a == d || b == c || b == d) continue;
      const Index u1 = std::min(a, c), v1 = std::max(a, c);
      const Index u2 = std::min(b, d), v2 = std::max(b, d);
      if (list.contains(u1, v1) || list.contains(u2, v2)) continue;
      const Index delta = same(a, c) + same(b, d) - same(a, b) - same(c, d);
      const Index need = same_target - same_count;
      const bool closer = std::abs(need - delta) < std::abs(need);
      if (!closer && !(delta == 0 && coin(swap_rng))) continue;
      list.seen.erase(pair_key(list.pairs[e1].first, list.pairs[e1].second));
      list.seen.erase(pair_key(list.pairs[e2].first, list.pairs[e2].second));
      list.seen.insert(pair_key(u1, v1));
      list.seen.insert(pair_key(u2, v2));
      list.pairs[e1] = {u1, v1};
      list.pairs[e2] = {u2, v2};
      same_count += delta;
    }
  }

  auto feature_rng = seeded_rng(seed, kFeatureStream);
  Matrix x = cluster_features(labels, p.num_classes, p.feature_dim,
                              p.center_scale, p.noise_scale, feature_rng);
  return Dataset{pairs_to_graph(n, list), std::move(x),
                 LabelVector{std::move(labels), p.num_classes}, name};
}

SbmResult sbm_two_block(Index n, double p_in, double p_out,
                        std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("sbm_two_block: need >= 2 nodes");
  if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
    throw std::invalid_argument("sbm_two_block: probabilities outside [0, 1]");
  IntVector labels(n);
  const Index half = n / 2;
  for (Index i = 0; i < n; ++i) labels[i] = i < half ? 0 : 1;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Triplet> trip;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? p_in : p_out;
      if (unif(rng) < p) {
        trip.emplace_back(i, j, 1.0);
        trip.emplace_back(j, i, 1.0);
      }
    }
  return SbmResult{Graph::from_edges(n, trip, /*directed=*/false),
                   LabelVector{std::move(labels), 2}};
}

Graph erdos_renyi(Index n, double p, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: need >= 1 node");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("erdos_renyi: probability outside [0, 1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Triplet> trip;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (unif(rng) < p) {
        trip.emplace_back(i, j, 1.0);
        trip.emplace_back(j, i, 1.0);
      }
  return Graph::from_edges(n, trip, /*directed=*/false);
}

const std::vector<BenchmarkSpec>& benchmark_suite() {
  static const std::vector<BenchmarkSpec> suite = [] {
    std::vector<BenchmarkSpec> s;
    auto hub = [&s](std::string name, std::vector<Index> sizes, Index edges,
                    double h, Index dim, double noise, double hub_exponent) {
      BenchmarkSpec spec;
      spec.name = std::move(name);
      spec.num_nodes = std::accumulate(sizes.begin(), sizes.end(), Index{0});
      spec.edge_homophily = h;
      spec.degree_quantile_family = false;
      spec.hub.class_sizes = std::move(sizes);
      spec.hub.num_edges = edges;
      spec.hub.edge_homophily = h;
      spec.hub.feature_dim = dim;
      spec.hub.center_scale = 1.0;
      spec.hub.noise_scale = noise;
      spec.hub.hub_exponent = hub_exponent;
      s.push_back(std::move(spec));
    };
    auto quantile = [&s](std::string name, Index nodes, Index edges, double h,
                         Index dim) {
      BenchmarkSpec spec;
      spec.name = std::move(name);
      spec.num_nodes = nodes;
      spec.edge_homophily = h;
      spec.degree_quantile_family = true;
      spec.quantile.num_nodes = nodes;
      spec.quantile.num_classes = 5;
      spec.quantile.num_edges = edges;
      spec.quantile.edge_homophily = h;
      spec.quantile.feature_dim = dim;
      spec.quantile.center_scale = 1.0;
      spec.quantile.noise_scale = 0.7;
      spec.quantile.weight_exponent = 0.75;
      s.push_back(std::move(spec));
    };
    hub("texas", {96, 30, 25, 20, 12}, 325, 0.107692, 240, 0.75, 0.8);
    hub("wisconsin", {118, 70, 32, 21, 10}, 515, 0.196117, 250, 0.75, 0.8);
    hub("cornell", {115, 28, 20, 10, 10}, 298, 0.130872, 240, 0.75, 0.8);
    hub("actor", {2021, 1818, 1511, 1301, 949}, 33544, 0.219341, 128, 0.85,
        0.6);
    quantile("chameleon", 2277, 36101, 0.235007, 128);
    quantile("squirrel", 5201, 80000, 0.223943, 128);
    return s;
  }();
  return suite;
}

Dataset generate_benchmark(const std::string& name, std::uint64_t seed) {
  for (const BenchmarkSpec& spec : benchmark_suite()) {
    if (spec.name != name) continue;
    const std::uint64_t mixed = seed ^ fnv1a(name);
    return spec.degree_quantile_family
               ? generate_degree_quantile(name, spec.quantile, mixed)
               : generate_hub_quota(name, spec.hub, mixed);
  }
  std::string known;
  for (const BenchmarkSpec& spec : benchmark_suite())
    known += known.empty() ? spec.name : ", " + spec.name;
  throw std::invalid_argument("generate_benchmark: unknown dataset '" + name +
                              "'; known datasets: " + known);
}

void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
  const std::filesystem::path out = dir / d.name;
  std::filesystem::create_directories(out);
  write_edge_file(out / "edges.tsv", d.graph);
  write_feature_matrix(out / "features.csv", d.features);
  write_labels_csv(out / "labels.csv", d.labels);
}

}  // namespace sggnn
