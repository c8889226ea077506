#pragma once

#include <cstddef>

#include "approxreg/data_matrix.hpp"

namespace approxreg {

// P-values of one covariate inside a least-squares subset.
//
// p_f is the probability that a standard Gaussian covariate replacing the
// covariate does better in RSS; it coincides with the classical F P-value.
// p_gauss adjusts p_f for comparison against the best of `exponent`
// independent Gaussian covariates: p_gauss = 1 - (1 - p_f)^exponent.
struct PValueRecord {
  Index covariate = 0;  // 0 for the intercept
  double coefficient = 0.0;
  double p_f = 1.0;
  double p_gauss = 1.0;
  long exponent = 1;
  bool degenerate = false;  // rss without the covariate was zero
};

// 1 - (1 - p_f)^exponent without cancellation for tiny p_f.
double f_to_gaussian(double p_f, long exponent);

// Generic form: the covariate belongs to a fit with `fitted_columns` columns
// in total (intercept included) on n observations. p_f is the
// Beta((n - fitted_columns)/2, 1/2) CDF at rss_s / rss_without.
PValueRecord gaussian_pvalue(double rss_s, double rss_without, std::size_t n,
                             std::size_t fitted_columns, long exponent);

// Covariate x_i in a subset S of size k out of q covariates (no separate
// intercept): Beta((n-k)/2, 1/2) at rss_S / rss_{S without x_i}, adjusted with
// exponent q - k + 1.
PValueRecord gaussian_pvalue_member(double rss_s, double rss_without, std::size_t n,
                                    std::size_t k, std::size_t q);

// Candidate x_b outside the current subset of size k: uses the fit with x_b
// added (k + 1 columns) and exponent q - k.
double gaussian_pvalue_candidate(double rss_with, double rss_current, std::size_t n,
                                 std::size_t k, std::size_t q);

}  // namespace approxreg
