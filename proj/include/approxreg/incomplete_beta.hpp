#pragma once

namespace approxreg {

// Regularized incomplete Beta function I_x(a, b) for a, b > 0 and x in
// [0, 1], evaluated by Lentz's continued fraction with the usual reflection
// I_x(a, b) = 1 - I_{1-x}(b, a) when x lies beyond the mean. Throws
// UsageError on domain violations.
double incomplete_beta(double a, double b, double x);

// log(Gamma(a + b) / Gamma(a)), accurate for large a where the difference of
// two lgamma values loses digits.
double log_gamma_ratio(double a, double b);

}  // namespace approxreg
