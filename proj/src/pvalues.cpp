#include "approxreg/pvalues.hpp"

#include <cmath>
#include <string>

#include "approxreg/errors.hpp"
#include "approxreg/incomplete_beta.hpp"

namespace approxreg {

namespace {
constexpr double kRatioSlack = 1e-12;
}

double f_to_gaussian(double p_f, long exponent) {
  if (!(p_f >= 0.0 && p_f <= 1.0)) throw UsageError("f_to_gaussian: p_f outside [0, 1]");
  if (exponent < 1) throw UsageError("f_to_gaussian: exponent must be at least 1");
  if (p_f == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(exponent) * std::log1p(-p_f));
}

PValueRecord gaussian_pvalue(double rss_s, double rss_without, std::size_t n,
                             std::size_t fitted_columns, long exponent) {
  if (fitted_columns < 1 || n <= fitted_columns) {
    throw UsageError("gaussian_pvalue: need n > k >= 1 (n=" + std::to_string(n) +
                     ", k=" + std::to_string(fitted_columns) + ")");
  }
  if (rss_s < 0.0 || rss_without < 0.0) throw UsageError("gaussian_pvalue: negative RSS");
  PValueRecord rec;
  rec.exponent = exponent;
  if (rss_without <= 0.0) {
    rec.degenerate = true;
    return rec;
  }
  double ratio = rss_s / rss_without;
  if (ratio > 1.0) {
    if (ratio > 1.0 + kRatioSlack) {
      throw ConsistencyError("RSS ratio " + std::to_string(ratio) +
                             " exceeds one: subset fit is worse than its reduction");
    }
    ratio = 1.0;
  }
  const double a = 0.5 * static_cast<double>(n - fitted_columns);
  rec.p_f = incomplete_beta(a, 0.5, ratio);
  rec.p_gauss = f_to_gaussian(rec.p_f, exponent);
  return rec;
}

PValueRecord gaussian_pvalue_member(double rss_s, double rss_without, std::size_t n,
                                    std::size_t k, std::size_t q) {
  if (q < k) throw UsageError("gaussian_pvalue_member: q must be at least k");
  return gaussian_pvalue(rss_s, rss_without, n, k, static_cast<long>(q - k + 1));
}

double gaussian_pvalue_candidate(double rss_with, double rss_current, std::size_t n,
                                 std::size_t k, std::size_t q) {
  if (q <= k) throw UsageError("gaussian_pvalue_candidate: no candidate left (q <= k)");
  return gaussian_pvalue(rss_with, rss_current, n, k + 1, static_cast<long>(q - k)).p_gauss;
}

}  // namespace approxreg
