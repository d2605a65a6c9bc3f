#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "sggnn/dataset.hpp"
#include "sggnn/graph.hpp"
#include "testutil.hpp"

using namespace sggnn;
using namespace testutil;

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("from_edges sorts rows and collapses duplicates keeping the first") {
  std::vector<Triplet> edges = {{1, 0, 1.0}, {0, 2, 2.0}, {0, 1, 1.0},
                                {0, 2, 9.0}};
  std::size_t dups = 0;
  Graph g = Graph::from_edges(3, edges, true, &dups);
  CHECK(dups == 1);
  CHECK(g.num_edges() == 3);
  auto row0 = g.neighbors(0);
  REQUIRE(row0.size() == 2);
  CHECK(row0[0] == 1);
  CHECK(row0[1] == 2);
  CHECK(g.weights(0)[1] == 2.0);  // first occurrence wins
}

TEST_CASE("from_edges rejects out-of-range endpoints") {
  std::vector<Triplet> edges = {{0, 5, 1.0}};
  CHECK_THROWS(Graph::from_edges(3, edges, true));
}

TEST_CASE("to_undirected takes the union with max weight") {
  // directed edge (0,1) only -> both directions appear
  Graph g = graph_from_pairs(2, {{0, 1}});
  Graph u = to_undirected(g);
  CHECK(u.num_edges() == 2);
  CHECK(u.has_edge(0, 1));
  CHECK(u.has_edge(1, 0));
  CHECK_FALSE(u.directed());

  // (0,1) weight 2 and (1,0) weight 3 -> both directions weight 3
  std::vector<Triplet> wedges = {{0, 1, 2.0}, {1, 0, 3.0}};
  Graph w = Graph::from_edges(2, wedges, true);
  Graph wu = to_undirected(w);
  CHECK(wu.weights(0)[0] == 3.0);
  CHECK(wu.weights(1)[0] == 3.0);
}

TEST_CASE("to_undirected is idempotent") {
  auto rng = make_rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_digraph(12, 0.2, rng);
    Graph u1 = to_undirected(g);
    Graph u2 = to_undirected(u1);
    CHECK(dense_adjacency(u1) == dense_adjacency(u2));
  }
}

TEST_CASE("sym_normalized_adjacency on an edgeless graph is the identity") {
  Graph g = Graph::from_edges(3, {}, false);
  Graph s = sym_normalized_adjacency(g);
  CHECK(dense_adjacency(s).isApprox(Matrix::Identity(3, 3), 1e-15));
}

TEST_CASE("sym_normalized_adjacency of a single edge has all entries 1/2") {
  Graph g = undirected_from_pairs(2, {{0, 1}});
  Graph s = sym_normalized_adjacency(g);
  Matrix d = dense_adjacency(s);
  // A~ = I + A has every degree 2, so every entry normalizes to 1/2.
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) CHECK(d(i, j) == doctest::Approx(0.5));
}

TEST_CASE("sym_normalized_adjacency is symmetric with spectral radius <= 1") {
  auto rng = make_rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    Graph g = random_undirected(10, 0.3, rng);
    Graph s = sym_normalized_adjacency(g);
    Matrix d = dense_adjacency(s);
    CHECK(d.isApprox(d.transpose(), 1e-14));

    // Power iteration for the dominant eigenvalue magnitude.
    Vector v = Vector::Ones(10).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      Vector w = d * v;
      lambda = w.norm();
      if (lambda == 0.0) break;
      v = w / lambda;
    }
    CHECK(lambda <= 1.0 + 1e-10);
  }
}

TEST_CASE("row_normalized_adjacency divides rows by their sums") {
  std::vector<Triplet> edges = {{0, 1, 2.0}, {0, 2, 2.0}};
  Graph g = Graph::from_edges(3, edges, true);
  Graph r = row_normalized_adjacency(g);
  CHECK(r.weights(0)[0] == doctest::Approx(0.5));
  CHECK(r.weights(0)[1] == doctest::Approx(0.5));
  // zero rows stay zero; every row sum is 0 or 1
  Matrix d = dense_adjacency(r);
  for (Index i = 0; i < 3; ++i) {
    double s = d.row(i).sum();
    CHECK((s == doctest::Approx(0.0) || s == doctest::Approx(1.0)));
  }
}

TEST_CASE("spmm: identity graph leaves the matrix unchanged") {
  std::vector<Triplet> edges = {{0, 0, 1.0}, {1, 1, 1.0}};
  Graph g = Graph::from_edges(2, edges, true);
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK(spmm(g, m) == m);
}

TEST_CASE("spmm: single edge propagates the neighbor value") {
  Graph g = graph_from_pairs(2, {{0, 1}});
  Matrix m(2, 1);
  m << 0, 5;
  Matrix out = spmm(g, m);
  CHECK(out(0, 0) == 5.0);
  CHECK(out(1, 0) == 0.0);
}

TEST_CASE("spmm matches the dense brute-force oracle") {
  auto rng = make_rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = random_digraph(6, 0.4, rng);
    Matrix m(6, 4);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    Matrix expected = dense_matmul(dense_adjacency(g), m);
    CHECK((spmm(g, m) - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("spmm rejects mismatched dimensions") {
  Graph g = graph_from_pairs(2, {{0, 1}});
  CHECK_THROWS(spmm(g, Matrix::Zero(3, 1)));
}

// ============================================================================
// Dataset loading
// ============================================================================

TEST_CASE("load_dataset on a minimal well-formed input") {
  TempDir tmp("load_min");
  write_file(tmp.path() / "edges.tsv", "0\t1\n");
  write_file(tmp.path() / "features.csv", "1.5\n-2.0\n");
  write_file(tmp.path() / "labels.csv", "node_id,label\n0,0\n1,1\n");
  Dataset d = load_dataset(tmp.path() / "edges.tsv", tmp.path() / "features.csv",
                           tmp.path() / "labels.csv", "mini");
  CHECK(d.graph.num_nodes() == 2);
  CHECK(d.graph.num_edges() == 1);
  CHECK(d.features.rows() == 2);
  CHECK(d.labels.num_classes == 2);
  CHECK(d.name == "mini");
  CHECK(d.graph.num_nodes() == d.features.rows());
  CHECK(d.graph.num_nodes() == d.labels.size());
}

TEST_CASE("load_dataset reports out-of-range edge endpoints by node id") {
  TempDir tmp("load_oor");
  write_file(tmp.path() / "edges.tsv", "0\t5\n");
  write_file(tmp.path() / "features.csv", "1\n2\n3\n");
  write_file(tmp.path() / "labels.csv", "0,0\n1,1\n2,0\n");
  try {
    load_dataset(tmp.path() / "edges.tsv", tmp.path() / "features.csv",
                 tmp.path() / "labels.csv");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("5") != std::string::npos);
    CHECK(std::string(e.what()).find("edges.tsv") != std::string::npos);
  }
}

TEST_CASE("load_dataset rejects label/feature length mismatch") {
  TempDir tmp("load_mismatch");
  write_file(tmp.path() / "edges.tsv", "0\t1\n");
  write_file(tmp.path() / "features.csv", "1\n2\n3\n");
  write_file(tmp.path() / "labels.csv", "0,0\n1,1\n");  // node 2 missing
  CHECK_THROWS(load_dataset(tmp.path() / "edges.tsv",
                            tmp.path() / "features.csv",
                            tmp.path() / "labels.csv"));
}

TEST_CASE("load_dataset rejects non-integer labels") {
  TempDir tmp("load_badlabel");
  write_file(tmp.path() / "edges.tsv", "0\t1\n");
  write_file(tmp.path() / "features.csv", "1\n2\n");
  write_file(tmp.path() / "labels.csv", "0,0\n1,1.5\n");
  CHECK_THROWS(load_dataset(tmp.path() / "edges.tsv",
                            tmp.path() / "features.csv",
                            tmp.path() / "labels.csv"));
}

TEST_CASE("load_dataset keeps self-loops and supports comments and weights") {
  TempDir tmp("load_loops");
  write_file(tmp.path() / "edges.tsv", "# comment\n0\t0\n0\t1\t2.5\n");
  write_file(tmp.path() / "features.csv", "1\n2\n");
  write_file(tmp.path() / "labels.csv", "0,0\n1,1\n");
  Dataset d = load_dataset(tmp.path() / "edges.tsv", tmp.path() / "features.csv",
                           tmp.path() / "labels.csv");
  CHECK(d.graph.has_edge(0, 0));
  CHECK(d.graph.weights(0)[1] == 2.5);
}

TEST_CASE("edge file round-trips through write_edge_file") {
  TempDir tmp("roundtrip");
  auto rng = make_rng(44);
  Graph g = random_digraph(9, 0.25, rng);
  write_edge_file(tmp.path() / "g.tsv", g);
  write_file(tmp.path() / "features.csv",
             "1\n2\n3\n4\n5\n6\n7\n8\n9\n");
  write_file(tmp.path() / "labels.csv",
             "0,0\n1,1\n2,0\n3,1\n4,0\n5,1\n6,0\n7,1\n8,0\n");
  Dataset d = load_dataset(tmp.path() / "g.tsv", tmp.path() / "features.csv",
                           tmp.path() / "labels.csv");
  CHECK(dense_adjacency(d.graph) == dense_adjacency(g));
}
