#include "sggnn/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sggnn {
namespace {

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " +
                           what);
}

bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_long(std::string_view s, long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

Matrix load_features(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    std::vector<double> row;
    for (std::string_view tok : split(sv, ',')) {
      double v;
      if (!parse_double(trim(tok), v)) {
        fail(path, lineno, "non-numeric feature value '" + std::string(tok) + "'");
      }
      if (!std::isfinite(v)) fail(path, lineno, "non-finite feature value");
      row.push_back(v);
    }
    if (cols == 0)
      cols = row.size();
    else if (row.size() != cols)
      fail(path, lineno,
           "expected " + std::to_string(cols) + " columns, got " +
               std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no feature rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

LabelVector load_labels(const std::filesystem::path& path, Index num_nodes) {
  std::ifstream in = open_or_throw(path);
  IntVector labels = IntVector::Constant(num_nodes, -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto toks = split(sv, ',');
    if (toks.size() != 2) fail(path, lineno, "expected `node_id,label`");
    long id, label;
    if (!parse_long(trim(toks[0]), id)) {
      if (lineno == 1) continue;  // header row
      fail(path, lineno, "non-integer node id '" + std::string(toks[0]) + "'");
    }
    if (!parse_long(trim(toks[1]), label))
      fail(path, lineno, "non-integer label '" + std::string(toks[1]) + "'");
    if (id < 0 || id >= num_nodes)
      fail(path, lineno, "node id " + std::to_string(id) + " out of range for " +
                             std::to_string(num_nodes) + " nodes");
    if (label < 0) fail(path, lineno, "negative label");
    if (labels[id] != -1)
      fail(path, lineno, "duplicate label row for node " + std::to_string(id));
    labels[id] = static_cast<int>(label);
  }
  for (Index i = 0; i < num_nodes; ++i) {
    if (labels[i] == -1)
      throw std::runtime_error(path.string() + ": missing label for node " +
                               std::to_string(i));
  }
  LabelVector y;
  y.labels = std::move(labels);
  y.num_classes = y.labels.maxCoeff() + 1;
  if (y.num_classes < 2)
    throw std::runtime_error(path.string() + ": need at least 2 classes");
  return y;
}

Graph load_edges(const std::filesystem::path& path, Index num_nodes) {
  std::ifstream in = open_or_throw(path);
  std::vector<Triplet> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto toks = split(sv, '\t');
    if (toks.size() != 2 && toks.size() != 3)
      fail(path, lineno, "expected `src<TAB>dst[<TAB>weight]`");
    long src, dst;
    if (!parse_long(trim(toks[0]), src) || !parse_long(trim(toks[1]), dst))
      fail(path, lineno, "non-integer node id");
    double w = 1.0;
    if (toks.size() == 3 && !parse_double(trim(toks[2]), w))
      fail(path, lineno, "non-numeric edge weight");
    for (long id : {src, dst}) {
      if (id < 0 || id >= num_nodes)
        fail(path, lineno,
             "edge references node " + std::to_string(id) + " but only " +
                 std::to_string(num_nodes) + " nodes have features");
    }
    edges.emplace_back(static_cast<Index>(src), static_cast<Index>(dst), w);
  }
  std::size_t dups = 0;
  Graph g = Graph::from_edges(num_nodes, edges, /*directed=*/true, &dups);
  if (dups > 0) {
    std::cerr << "[warn] " << path.string() << ": dropped " << dups
              << " duplicate edge(s), kept first occurrence\n";
  }
  return g;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& edge_file,
                     const std::filesystem::path& feature_file,
                     const std::filesystem::path& label_file,
                     const std::string& name) {
  Dataset d;
  d.features = load_features(feature_file);
  const Index n = d.features.rows();
  d.labels = load_labels(label_file, n);
  d.graph = load_edges(edge_file, n);
  d.name = name.empty() ? edge_file.parent_path().filename().string() : name;
  return d;
}

void write_edge_file(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const SpMat& a = g.adjacency();
  for (Index i = 0; i < a.rows(); ++i) {
    for (SpMat::InnerIterator it(a, i); it; ++it) {
      out << i << '\t' << it.col();
      if (it.value() != 1.0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", it.value());
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
}

void write_feature_matrix(const std::filesystem::path& path, const Matrix& z) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char buf[40];
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", z(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_labels_csv(const std::filesystem::path& path, const LabelVector& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "node_id,label\n";
  for (Index i = 0; i < y.labels.size(); ++i)
    out << i << ',' << y.labels[i] << '\n';
}

void write_features_csv(const std::filesystem::path& path, const Matrix& z,
                        const std::vector<std::string>& column_names) {
  if (static_cast<Index>(column_names.size()) != z.cols())
    throw std::invalid_argument("column_names size does not match matrix");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    out << (j ? "," : "") << column_names[j];
  }
  out << '\n';
  char buf[40];
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", z(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace sggnn
