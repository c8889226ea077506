#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "approxreg/data_matrix.hpp"

namespace approxreg {

// Autoregressive design: y is the target series with the first L values
// dropped; X holds lags 1..L of every series variable, one contiguous block of
// L columns per variable, followed by a ones column when requested.
struct LagDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::size_t variables = 0;
  std::size_t max_lag = 0;
  bool intercept = false;

  // 1-based column holding lag `lag` of series variable `variable`.
  static Index column_of(std::size_t variable, std::size_t lag, std::size_t max_lag) {
    return (variable - 1) * max_lag + lag;
  }
};

// series is n x v; target is 1-based. Throws UsageError when max_lag >= n.
LagDesign flag(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
               std::size_t max_lag, bool intercept = false);

// Ranking of the non-constant monomials of total degree <= d in v variables.
// Columns are numbered 1.. in colexicographic order of exponent vectors:
// x1, x1^2, .., x1^d, x2, x1 x2, x1^2 x2, ...
class InteractionIndex {
 public:
  InteractionIndex(std::size_t variables, std::size_t max_degree);

  std::size_t variables() const { return variables_; }
  std::size_t max_degree() const { return max_degree_; }
  std::size_t columns() const { return columns_; }

  // Factor multiset of a column, ascending (x6^4 x12 -> {6,6,6,6,12}).
  std::vector<Index> decode(std::size_t column) const;
  std::size_t encode(std::span<const Index> factors) const;

 private:
  // Exponent vectors over the first m variables with total degree <= budget.
  std::uint64_t count(std::size_t m, std::size_t budget) const;

  std::size_t variables_;
  std::size_t max_degree_;
  std::size_t columns_;
  std::vector<std::uint64_t> binom_;  // (v + d + 1)^2 table
};

// Streams every monomial column of x up to degree d in column order. Memory is
// O(n v): partial products are kept per variable level and each column costs
// one elementwise multiplication.
void for_each_interaction(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t max_degree,
                          const std::function<void(std::size_t, const Eigen::VectorXd&)>& sink);

struct InteractionDesign {
  Eigen::MatrixXd x;
  InteractionIndex index;
};

// In-memory interaction design. Suitable for moderate sizes; large designs
// should stream through for_each_interaction into a column-block file.
InteractionDesign fgeninter(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t max_degree);

// n x 2m basis: column 2j-1 is sin(pi i j / n), column 2j is cos(pi i j / n)
// for rows i = 1..n.
Eigen::MatrixXd fgentrig(std::size_t n, std::size_t m);

// 1-based indices with |x_i - median| >= c * MAD, MAD scaled by 1.4826. When
// the MAD is zero every point off the median is flagged; constant input
// throws DataError.
std::vector<std::size_t> mad_outliers(std::span<const double> x, double c = 3.5);

double median(std::vector<double> values);

}  // namespace approxreg
