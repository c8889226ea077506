#include <cmath>
#include <numbers>
#include <random>

#include "approxreg/errors.hpp"
#include "approxreg/features.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace approxreg;

TEST_CASE("flag: single series shift") {
  Eigen::MatrixXd s(4, 1);
  s << 1, 2, 3, 4;
  const LagDesign d = flag(s, 1, 1);
  CHECK(d.y == Eigen::Vector3d(2, 3, 4));
  REQUIRE(d.x.cols() == 1);
  CHECK(d.x.col(0) == Eigen::Vector3d(1, 2, 3));
}

TEST_CASE("flag: block layout and intercept") {
  const Eigen::MatrixXd s = approxreg::test::gaussian_matrix(30, 3, 1);
  const std::size_t L = 4;
  const LagDesign d = flag(s, 2, L, true);
  CHECK(d.y.size() == 26);
  CHECK(d.x.cols() == 13);
  CHECK(d.x.col(12) == Eigen::VectorXd::Ones(26));
  for (std::size_t j = 1; j <= 3; ++j)
    for (std::size_t l = 1; l <= L; ++l)
      for (Eigen::Index t = 0; t < 26; ++t) {
        const auto col = static_cast<Eigen::Index>(LagDesign::column_of(j, l, L) - 1);
        CHECK(d.x(t, col) == s(t + static_cast<Eigen::Index>(L - l), static_cast<Eigen::Index>(j - 1)));
      }
  for (Eigen::Index t = 0; t < 26; ++t) CHECK(d.y(t) == s(t + 4, 1));
}

TEST_CASE("flag: argument errors") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Ones(5, 2);
  CHECK_THROWS_AS(flag(s, 1, 5), UsageError);
  CHECK_THROWS_AS(flag(s, 3, 1), UsageError);
  CHECK_THROWS_AS(flag(s, 1, 0), UsageError);
}

TEST_CASE("interaction index: counts and first columns") {
  CHECK(InteractionIndex(1, 2).columns() == 2);
  CHECK(InteractionIndex(13, 8).columns() == 203489);
  const InteractionIndex idx(3, 2);
  CHECK(idx.columns() == 9);
  // Colex order: x1, x1^2, x2, x1 x2, x2^2, x3, x1 x3, x2 x3, x3^2.
  const std::vector<std::vector<Index>> expected{{1}, {1, 1}, {2}, {1, 2}, {2, 2}, {3}, {1, 3}, {2, 3}, {3, 3}};
  for (std::size_t c = 1; c <= 9; ++c) CHECK(idx.decode(c) == expected[c - 1]);
}

TEST_CASE("interaction index: encode and decode are inverse") {
  const InteractionIndex idx(13, 8);
  for (std::size_t c = 1; c <= idx.columns(); c += 97) {
    const auto f = idx.decode(c);
    CHECK(idx.encode(f) == c);
  }
  std::mt19937 rng(3);
  std::uniform_int_distribution<Index> var(1, 13);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Index> f(len(rng));
    for (auto& v : f) v = var(rng);
    std::sort(f.begin(), f.end());
    CHECK(idx.decode(idx.encode(f)) == f);
  }
  const std::vector<Index> golden{6, 6, 6, 6, 12};
  CHECK(idx.decode(idx.encode(golden)) == golden);
  CHECK_THROWS_AS(idx.decode(0), UsageError);
  CHECK_THROWS_AS(idx.decode(203490), UsageError);
  CHECK_THROWS_AS(idx.encode(std::vector<Index>{14}), UsageError);
}

TEST_CASE("fgeninter: values are products of base columns") {
  const Eigen::MatrixXd x = approxreg::test::gaussian_matrix(12, 4, 5);
  const InteractionDesign d = fgeninter(x, 3);
  REQUIRE(static_cast<std::size_t>(d.x.cols()) == d.index.columns());
  CHECK(d.x.cols() == 34);
  for (std::size_t c = 1; c <= d.index.columns(); ++c) {
    Eigen::VectorXd expected = Eigen::VectorXd::Ones(12);
    for (Index f : d.index.decode(c)) expected.array() *= x.col(static_cast<Eigen::Index>(f - 1)).array();
    const Eigen::VectorXd got = d.x.col(static_cast<Eigen::Index>(c - 1));
    CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + expected.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("fgentrig: n=4, m=1 exact values") {
  const Eigen::MatrixXd t = fgentrig(4, 1);
  const double h = std::sqrt(0.5);
  const Eigen::Vector4d sin_col(h, 1, h, 0), cos_col(h, 0, -h, -1);
  CHECK((t.col(0) - sin_col).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((t.col(1) - cos_col).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fgentrig: direct evaluation and Gram entries") {
  const std::size_t n = 101, m = 50;
  const Eigen::MatrixXd t = fgentrig(n, m);
  CHECK(t.cols() == 100);
  CHECK(t.cwiseAbs().maxCoeff() <= 1.0);
  for (std::size_t j = 1; j <= m; j += 7)
    for (std::size_t i = 1; i <= n; i += 5) {
      const double arg = std::numbers::pi * static_cast<double>(i * j) / n;
      CHECK(std::abs(t(i - 1, 2 * j - 2) - std::sin(arg)) < 1e-12);
      CHECK(std::abs(t(i - 1, 2 * j - 1) - std::cos(arg)) < 1e-12);
    }
  const Eigen::MatrixXd gram = t.transpose() * t;
  for (int a = 0; a < 100; a += 13)
    for (int b = 0; b < 100; b += 11) {
      double direct = 0;
      for (int i = 0; i < static_cast<int>(n); ++i) direct += t(i, a) * t(i, b);
      CHECK(std::abs(gram(a, b) - direct) < 1e-10);
    }
}

TEST_CASE("mad_outliers examples") {
  const std::vector<double> spike{0, 0, 0, 0, 100};
  CHECK(mad_outliers(spike) == std::vector<std::size_t>{5});
  const std::vector<double> sym{-2, -1, 0, 1, 2};
  CHECK(mad_outliers(sym).empty());
  const std::vector<double> constant{3, 3, 3};
  CHECK_THROWS_AS(mad_outliers(constant), DataError);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(mad_outliers(one), UsageError);
}

TEST_CASE("mad_outliers on a Gaussian sample flags about 2 Phi(-3.5)") {
  const std::size_t n = 10000;
  const Eigen::VectorXd z = approxreg::test::gaussian_matrix(n, 1, 9).col(0);
  const auto flagged = mad_outliers(std::span<const double>(z.data(), n), 3.5);
  const double expected = std::erfc(3.5 / std::sqrt(2.0));
  const double se = std::sqrt(expected * (1 - expected) / n);
  CHECK(std::abs(static_cast<double>(flagged.size()) / n - expected) < 3 * se);
}

TEST_CASE("median of even and odd samples") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}
