#include <algorithm>
#include <set>

#include "approxreg/errors.hpp"
#include "approxreg/pvalues.hpp"
#include "approxreg/selection.hpp"
#include "approxreg/subset_state.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace approxreg;
using approxreg::test::gaussian_matrix;

namespace {

// y = sum of coef_i * x_{idx_i} + sigma * noise on an n x q Gaussian design.
DataMatrix planted(Eigen::Index n, Eigen::Index q, const std::vector<std::pair<Index, double>>& signal,
                   double sigma, std::uint64_t seed) {
  Eigen::MatrixXd x = gaussian_matrix(n, q, seed);
  Eigen::VectorXd y = sigma * gaussian_matrix(n, 1, seed + 77).col(0);
  for (auto [j, c] : signal) y += c * x.col(static_cast<Eigen::Index>(j - 1));
  return DataMatrix(y, x);
}

// Recomputes every member P-value from scratch fits.
void check_valid(const DataMatrix& d, const Approximation& a, const SelectionConfig& cfg) {
  REQUIRE(a.valid);
  const std::size_t q = cfg.covariate_count.value_or(d.q());
  std::vector<Index> full = a.indices;
  if (a.intercept) full.push_back(kIntercept);
  const SubsetState fit = SubsetState::fit(d, full);
  CHECK(fit.rss() == doctest::Approx(a.rss).epsilon(1e-8));
  const std::size_t k = a.indices.size();
  for (Index j : a.indices) {
    const double without = fit.drop_column(d, j).rss();
    const double rss_s = fit.rss();
    PValueRecord r = gaussian_pvalue(rss_s, without, d.n(), full.size(), static_cast<long>(q - k + 1));
    CHECK(r.p_gauss < cfg.p0);
  }
}

std::set<std::vector<Index>> index_sets(const std::vector<Approximation>& list) {
  std::set<std::vector<Index>> out;
  for (const auto& a : list) out.insert(a.sorted_indices());
  return out;
}

}  // namespace

TEST_CASE("noiseless planted covariate is recovered exactly") {
  Eigen::MatrixXd x = gaussian_matrix(40, 30, 31);
  const DataMatrix d(x.col(2), x);
  const auto a = f1st(d, SelectionConfig{});
  REQUIRE(a);
  CHECK(a->indices == std::vector<Index>{3});
  CHECK(a->rss < 1e-20);
  CHECK(a->records.front().p_gauss < 1e-12);
}

TEST_CASE("noiseless planted set with several covariates") {
  const DataMatrix d = planted(60, 80, {{3, 1.0}, {17, -2.0}, {25, 0.5}, {60, 3.0}}, 0.0, 32);
  const auto a = f1st(d, SelectionConfig{});
  REQUIRE(a);
  CHECK(a->sorted_indices() == std::vector<Index>{3, 17, 25, 60});
}

TEST_CASE("f1st selections are valid and the greedy trace decreases") {
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    const DataMatrix d = planted(80, 150, {{5, 1.0}, {50, 0.8}, {99, -0.7}}, 1.0, seed);
    SelectionConfig cfg;
    const GreedyPath path = greedy_forward(d, cfg);
    double last = path.base_rss;
    for (double r : path.rss) {
      CHECK(r < last);
      last = r;
    }
    if (auto a = f1st(d, cfg)) check_valid(d, *a, cfg);
  }
}

TEST_CASE("f1st is deterministic and ignores thread count") {
  const DataMatrix d = planted(70, 200, {{10, 1.0}, {20, 1.0}}, 1.0, 50);
  SelectionConfig one;
  SelectionConfig many;
  many.threads = 4;
  const auto a = f1st(d, one);
  const auto b = f1st(d, many);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->indices == b->indices);
  CHECK(a->rss == b->rss);
}

TEST_CASE("excluded covariates are never selected") {
  const DataMatrix d = planted(60, 40, {{7, 2.0}, {8, 1.5}}, 0.5, 51);
  SelectionConfig cfg;
  cfg.kex = {7};
  const auto a = f1st(d, cfg);
  REQUIRE(a);
  CHECK(std::find(a->indices.begin(), a->indices.end(), 7) == a->indices.end());
  CHECK(std::find(a->indices.begin(), a->indices.end(), 8) != a->indices.end());
}

TEST_CASE("pure noise usually selects nothing") {
  const DataMatrix d = planted(50, 100, {}, 1.0, 52);
  CHECK(!f1st(d, SelectionConfig{}));
}

TEST_CASE("kmn forces early steps regardless of P-value") {
  const DataMatrix d = planted(50, 20, {{4, 1.0}}, 1.0, 53);
  SelectionConfig cfg;
  cfg.kmn = 6;
  cfg.sub = false;
  const auto a = f1st(d, cfg);
  REQUIRE(a);
  CHECK(a->indices.size() >= 6);
}

TEST_CASE("all-subset refinement matches exhaustive enumeration") {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const DataMatrix d = planted(45, 14, {{1, 0.6}, {2, 0.5}, {3, 0.4}, {9, 0.7}}, 1.0, seed);
    SelectionConfig cfg;
    const std::vector<Index> pool{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const auto found = best_valid_subset(d, pool, cfg);

    std::optional<double> best_rss;
    for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
      std::vector<Index> s;
      for (std::size_t b = 0; b < pool.size(); ++b)
        if (mask & (1u << b)) s.push_back(pool[b]);
      const Approximation a = evaluate_subset(d, s, cfg);
      if (a.valid && (!best_rss || a.rss < *best_rss)) best_rss = a.rss;
    }
    REQUIRE(found.has_value() == best_rss.has_value());
    if (found) {
      const Approximation a = evaluate_subset(d, *found, cfg);
      CHECK(a.valid);
      CHECK(a.rss == doctest::Approx(*best_rss).epsilon(1e-10));
    }
  }
}

TEST_CASE("evaluate_subset records: covariates first, intercept last with exponent 1") {
  const DataMatrix d = planted(50, 10, {{2, 1.0}, {5, 1.0}}, 1.0, 70);
  const Approximation a = evaluate_subset(d, std::vector<Index>{5, 2}, SelectionConfig{});
  REQUIRE(a.records.size() == 3);
  CHECK(a.records[0].covariate == 5);
  CHECK(a.records[1].covariate == 2);
  CHECK(a.records[2].covariate == kIntercept);
  CHECK(a.records[2].exponent == 1);
  CHECK(a.records[2].p_f == a.records[2].p_gauss);
  CHECK(a.records[0].exponent == 10 - 2 + 1);
}

TEST_CASE("f2st returns pairwise disjoint approximations") {
  const DataMatrix d = planted(80, 60, {{3, 1.0}, {4, 1.0}, {30, 1.0}, {31, 1.0}}, 0.5, 80);
  const auto list = f2st(d, SelectionConfig{});
  REQUIRE(!list.empty());
  std::set<Index> seen;
  for (const auto& a : list) {
    for (Index j : a.indices) CHECK(seen.insert(j).second);
  }
}

TEST_CASE("f2st on a single-signal design stops after one approximation") {
  Eigen::MatrixXd x = gaussian_matrix(60, 30, 81);
  const DataMatrix d(x.col(9), x);
  const auto list = f2st(d, SelectionConfig{});
  REQUIRE(list.size() >= 1);
  CHECK(list.front().indices == std::vector<Index>{10});
}

TEST_CASE("f3st output: valid, unique, sorted, contains f1st, nested in depth") {
  for (std::uint64_t seed = 90; seed < 93; ++seed) {
    const DataMatrix d = planted(60, 120, {{1, 1.0}, {2, 0.8}, {3, 0.6}}, 1.0, seed);
    SelectionConfig c1;
    const auto l1 = f3st(d, c1);
    SelectionConfig c2;
    c2.m = 2;
    const auto l2 = f3st(d, c2);

    const auto base = f1st(d, c1);
    if (base) {
      CHECK(index_sets(l1).count(base->sorted_indices()) == 1);
      CHECK(l1.size() <= base->indices.size() + 1);
    }
    CHECK(index_sets(l1).size() == l1.size());
    for (std::size_t i = 1; i < l1.size(); ++i) CHECK(l1[i - 1].rss <= l1[i].rss);
    for (const auto& a : l2) check_valid(d, a, c2);

    const auto s1 = index_sets(l1);
    const auto s2 = index_sets(l2);
    CHECK(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));
  }
}

TEST_CASE("xinr uses the last column as the intercept") {
  Eigen::MatrixXd x = gaussian_matrix(50, 6, 95);
  x.col(5).setOnes();
  Eigen::VectorXd y = 3.0 + 2.0 * x.col(1).array();
  y += 0.1 * gaussian_matrix(50, 1, 96).col(0);
  SelectionConfig cfg;
  cfg.inr = false;
  cfg.xinr = true;
  const auto a = f1st(DataMatrix(y, x), cfg);
  REQUIRE(a);
  CHECK(a->indices == std::vector<Index>{2});
  SelectionConfig bad = cfg;
  x.col(5)(0) = 2.0;
  CHECK_THROWS_AS(f1st(DataMatrix(y, x), bad), DataError);
}

TEST_CASE("configuration validation") {
  SelectionConfig cfg;
  cfg.p0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
  cfg = {};
  cfg.mx = 40;
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
  cfg = {};
  cfg.kex = {11};
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
  cfg = {};
  cfg.m = 0;
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
}
