#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "approxreg/errors.hpp"
#include "approxreg/incomplete_beta.hpp"
#include "approxreg/montecarlo.hpp"
#include "approxreg/pvalues.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace approxreg;
using approxreg::test::rel_diff;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double reference_gaussian(double p, long e) {
  // -expm1(e log1p(-p)) in 50 digits keeps full relative accuracy for tiny p.
  return static_cast<double>(-boost::multiprecision::expm1(Big(e) * boost::multiprecision::log1p(-Big(p))));
}

}  // namespace

TEST_CASE("incomplete beta agrees with boost over a parameter grid") {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.5, 7.0, 14.5, 15.0, 33.5, 120.0, 1000.0, 20000.0}) {
    for (double b : {0.5, 1.0, 3.7}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.7, 0.9, 0.99, 0.999999}) {
        const double ref = boost::math::ibeta(a, b, x);
        if (ref < 1e-300) continue;
        worst = std::max(worst, rel_diff(incomplete_beta(a, b, x), ref));
      }
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("incomplete beta against quadrature: I_0.7(3.5, 0.5)") {
  const double a = 3.5, b = 0.5;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double integral =
      integrator.integrate([&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1); }, 0.0, 0.7);
  const double expected = integral / boost::math::beta(a, b);
  CHECK(std::abs(incomplete_beta(a, b, 0.7) - expected) < 1e-10);
}

TEST_CASE("incomplete beta edge values and symmetry") {
  CHECK(incomplete_beta(3.0, 0.5, 0.0) == 0.0);
  CHECK(incomplete_beta(3.0, 0.5, 1.0) == 1.0);
  for (double x : {0.1, 0.4, 0.8}) {
    CHECK(incomplete_beta(2.5, 4.0, x) == doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 1.0 - x)).epsilon(1e-13));
  }
  // I_x(1, 1) = x and I_x(a, 1) = x^a.
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(incomplete_beta(4.0, 1.0, 0.6) == doctest::Approx(std::pow(0.6, 4.0)).epsilon(1e-13));
  CHECK_THROWS_AS(incomplete_beta(-1.0, 0.5, 0.5), UsageError);
}

TEST_CASE("log_gamma_ratio matches boost") {
  for (double a : {0.5, 3.0, 14.0, 15.0, 200.0, 1e5}) {
    CHECK(log_gamma_ratio(a, 0.5) == doctest::Approx(-std::log(boost::math::tgamma_delta_ratio(a, 0.5))).epsilon(1e-12));
  }
}

TEST_CASE("f_to_gaussian agrees with 50-digit arithmetic") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> expo(-200.0, 0.0);
  std::uniform_int_distribution<long> ex(1, 5000);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = std::pow(10.0, expo(rng));
    const long e = ex(rng);
    worst = std::max(worst, rel_diff(f_to_gaussian(p, e), reference_gaussian(p, e)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("f_to_gaussian reproduces published adjustments") {
  CHECK(f_to_gaussian(3.880071e-26, 7) == doctest::Approx(2.716050e-25).epsilon(1e-6));
  CHECK(f_to_gaussian(2.889779e-19, 3) == doctest::Approx(8.669336e-19).epsilon(1e-6));
  CHECK(f_to_gaussian(0.3, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(f_to_gaussian(1.0, 4) == 1.0);
  CHECK(f_to_gaussian(0.0, 4) == 0.0);
  CHECK_THROWS_AS(f_to_gaussian(0.5, 0), UsageError);
  CHECK_THROWS_AS(f_to_gaussian(1.5, 2), UsageError);
}

TEST_CASE("member P-value is the Beta CDF with exponent q - k + 1") {
  const std::size_t n = 40, k = 4, q = 25;
  const double rss_s = 30.0, rss_without = 37.0;
  const PValueRecord r = gaussian_pvalue_member(rss_s, rss_without, n, k, q);
  const double pf = boost::math::ibeta((n - k) / 2.0, 0.5, rss_s / rss_without);
  CHECK(r.p_f == doctest::Approx(pf).epsilon(1e-12));
  CHECK(r.exponent == static_cast<long>(q - k + 1));
  CHECK(r.p_gauss == doctest::Approx(reference_gaussian(pf, 22)).epsilon(1e-12));
  CHECK(!r.degenerate);
}

TEST_CASE("candidate P-value equals the member P-value of the enlarged subset") {
  const std::size_t n = 55, k = 3, q = 30;
  const double with = 12.5, current = 14.0;
  const double cand = gaussian_pvalue_candidate(with, current, n, k, q);
  const PValueRecord member = gaussian_pvalue_member(with, current, n, k + 1, q);
  CHECK(cand == doctest::Approx(member.p_gauss).epsilon(1e-14));
  CHECK(member.exponent == static_cast<long>(q - k));
}

TEST_CASE("degenerate and inconsistent RSS inputs") {
  const PValueRecord zero = gaussian_pvalue(0.0, 0.0, 20, 3, 5);
  CHECK(zero.degenerate);
  CHECK(zero.p_gauss == 1.0);
  // A perfect fit that collapses without the covariate is infinitely significant.
  CHECK(gaussian_pvalue(0.0, 2.0, 20, 3, 5).p_gauss == 0.0);
  // Rounding excess is clamped, a real excess is a consistency failure.
  CHECK(gaussian_pvalue(1.0 + 1e-14, 1.0, 20, 3, 5).p_f == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian_pvalue(1.1, 1.0, 20, 3, 5), ConsistencyError);
  CHECK_THROWS_AS(gaussian_pvalue(1.0, 2.0, 3, 3, 1), UsageError);
}

TEST_CASE("Monte Carlo oracle: n=20, k=3, q=5, ratio 0.6") {
  // RSS ratio law of a Gaussian replacement column against a fixed design
  // with k - 1 = 2 other columns.
  const std::size_t n = 20, k = 3, q = 5;
  const double ratio = 0.6;
  const Eigen::MatrixXd w = approxreg::test::gaussian_matrix(n, k - 1, 21);
  const Eigen::VectorXd y = approxreg::test::gaussian_matrix(n, 1, 22).col(0);
  SimulationSpec spec;
  spec.seed = 23;
  spec.nsim = 60000;
  const std::vector<double> sims = gaussian_replacement_ratios(y, w, spec);

  const PValueRecord r = gaussian_pvalue_member(ratio, 1.0, n, k, q);
  // p_f: one Gaussian does at least as well.
  std::size_t hits = 0;
  for (double s : sims) hits += s <= ratio;
  const double freq = static_cast<double>(hits) / sims.size();
  const double se = std::sqrt(r.p_f * (1 - r.p_f) / sims.size());
  CHECK(std::abs(freq - r.p_f) < 4 * se);

  // p_gauss: best of q - k + 1 = 3 independent Gaussians does at least as well.
  const std::size_t groups = sims.size() / 3;
  std::size_t best_hits = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    best_hits += std::min({sims[3 * g], sims[3 * g + 1], sims[3 * g + 2]}) <= ratio;
  }
  const double best_freq = static_cast<double>(best_hits) / groups;
  const double best_se = std::sqrt(r.p_gauss * (1 - r.p_gauss) / groups);
  CHECK(std::abs(best_freq - r.p_gauss) < 4 * best_se);
}
