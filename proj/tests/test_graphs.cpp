#include <map>
#include <set>
#include <sstream>

#include "approxreg/errors.hpp"
#include "approxreg/graphs.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace approxreg;
using approxreg::test::gaussian_matrix;

TEST_CASE("near-identical twins are joined in both directions") {
  Eigen::MatrixXd x = gaussian_matrix(100, 8, 1);
  x.col(5) = x.col(2) + 0.05 * gaussian_matrix(100, 1, 2).col(0);
  const DependencyGraph g = fgr1st(x, SelectionConfig{});
  CHECK(g.nodes == 8);
  bool forward = false, backward = false;
  for (const auto& e : g.directed) {
    forward |= e.from == 3 && e.to == 6;
    backward |= e.from == 6 && e.to == 3;
    CHECK(e.p_gauss < 0.01);
  }
  CHECK(forward);
  CHECK(backward);
  CHECK(std::count(g.undirected.begin(), g.undirected.end(), std::pair<Index, Index>{3, 6}) == 1);
}

TEST_CASE("undirected graph is the union of directed edges") {
  const RandomGraphFixture f = meinshausen_buhlmann_graph(200, 40, 3);
  const DependencyGraph g = fgr1st(f.x, SelectionConfig{});
  std::set<std::pair<Index, Index>> expected;
  for (const auto& e : g.directed) {
    CHECK(e.from != e.to);
    expected.insert({std::min(e.from, e.to), std::max(e.from, e.to)});
  }
  CHECK(std::set<std::pair<Index, Index>>(g.undirected.begin(), g.undirected.end()) == expected);
  CHECK(g.undirected.size() <= g.directed.size());
  CHECK(g.directed.size() <= 40 * 39);
  CHECK(std::is_sorted(g.undirected.begin(), g.undirected.end()));
}

TEST_CASE("random graph fixture: degree bound and precision structure") {
  const RandomGraphFixture f = meinshausen_buhlmann_graph(4000, 60, 5);
  std::map<Index, int> degree;
  for (auto [a, b] : f.edges) {
    CHECK(a < b);
    CHECK(b <= 60);
    ++degree[a];
    ++degree[b];
  }
  for (auto [node, d] : degree) CHECK(d <= 4);
  CHECK(!f.edges.empty());
  // The inverse sample covariance has clearly nonzero entries on edges only.
  const Eigen::MatrixXd centred = f.x.rowwise() - f.x.colwise().mean();
  const Eigen::MatrixXd prec = ((centred.transpose() * centred) / 3999.0).inverse();
  std::set<std::pair<Index, Index>> edges(f.edges.begin(), f.edges.end());
  double worst_off = 0.0;
  for (Index a = 1; a <= 60; ++a)
    for (Index b = a + 1; b <= 60; ++b) {
      const double v = prec(static_cast<Eigen::Index>(a - 1), static_cast<Eigen::Index>(b - 1));
      if (edges.count({a, b})) {
        CHECK(v == doctest::Approx(0.245).epsilon(0.5));
      } else {
        worst_off = std::max(worst_off, std::abs(v));
      }
    }
  CHECK(worst_off < 0.1);
}

TEST_CASE("fgr1st recovers a small sparse graph") {
  const RandomGraphFixture f = meinshausen_buhlmann_graph(1000, 50, 7);
  const DependencyGraph g = fgr1st(f.x, SelectionConfig{});
  const EdgeComparison c = compare_edges(g.undirected, f.edges);
  CHECK(c.edges == g.undirected.size());
  CHECK(c.false_negatives <= f.edges.size() / 5);
  CHECK(c.false_positives <= 5);
}

TEST_CASE("compare_edges counts") {
  const std::vector<std::pair<Index, Index>> truth{{1, 2}, {2, 3}, {4, 5}};
  const std::vector<std::pair<Index, Index>> found{{1, 2}, {3, 4}, {4, 5}, {1, 5}};
  const EdgeComparison c = compare_edges(found, truth);
  CHECK(c.edges == 4);
  CHECK(c.false_positives == 2);
  CHECK(c.false_negatives == 1);
}

TEST_CASE("edge csv output") {
  DependencyGraph g;
  g.nodes = 3;
  g.directed = {{1, 2, 1.5e-7}, {2, 1, 3e-9}};
  g.undirected = {{1, 2}};
  std::ostringstream d, u;
  write_directed_edges(d, g);
  write_undirected_edges(u, g);
  CHECK(d.str() == "from,to,p_gauss\n1,2,1.500000e-07\n2,1,3.000000e-09\n");
  CHECK(u.str() == "a,b\n1,2\n");
}

TEST_CASE("graph argument errors") {
  CHECK_THROWS_AS(fgr1st(Eigen::MatrixXd::Ones(10, 1), SelectionConfig{}), UsageError);
  SelectionConfig cfg;
  cfg.xinr = true;
  cfg.inr = false;
  CHECK_THROWS_AS(fgr1st(gaussian_matrix(10, 3, 1), cfg), UsageError);
}
