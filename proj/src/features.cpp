#include "approxreg/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "approxreg/errors.hpp"

namespace approxreg {

LagDesign flag(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
               std::size_t max_lag, bool intercept) {
  const auto n = static_cast<std::size_t>(series.rows());
  const auto v = static_cast<std::size_t>(series.cols());
  if (v == 0 || n == 0) throw UsageError("flag: empty series");
  if (target < 1 || target > v) throw UsageError("flag: target variable out of range");
  if (max_lag < 1) throw UsageError("flag: maximum lag must be at least 1");
  if (max_lag >= n) {
    throw UsageError("flag: maximum lag " + std::to_string(max_lag) +
                     " leaves no rows for a series of length " + std::to_string(n));
  }
  const auto rows = static_cast<Eigen::Index>(n - max_lag);
  const auto lag = static_cast<Eigen::Index>(max_lag);

  LagDesign out;
  out.variables = v;
  out.max_lag = max_lag;
  out.intercept = intercept;
  out.y = series.col(static_cast<Eigen::Index>(target - 1)).segment(lag, rows);
  out.x.resize(rows, static_cast<Eigen::Index>(v * max_lag + (intercept ? 1 : 0)));
  for (std::size_t j = 1; j <= v; ++j) {
    for (std::size_t l = 1; l <= max_lag; ++l) {
      const auto col = static_cast<Eigen::Index>(LagDesign::column_of(j, l, max_lag) - 1);
      out.x.col(col) = series.col(static_cast<Eigen::Index>(j - 1))
                           .segment(lag - static_cast<Eigen::Index>(l), rows);
    }
  }
  if (intercept) out.x.col(out.x.cols() - 1).setOnes();
  return out;
}

InteractionIndex::InteractionIndex(std::size_t variables, std::size_t max_degree)
    : variables_(variables), max_degree_(max_degree), columns_(0) {
  if (variables < 1) throw UsageError("interactions need at least one variable");
  if (max_degree < 1) throw UsageError("interaction order must be at least 1");
  const std::size_t size = variables + max_degree + 1;
  binom_.assign(size * size, 0);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t a = 0; a < size; ++a) {
    binom_[a * size] = 1;
    for (std::size_t b = 1; b <= a; ++b) {
      const std::uint64_t l = binom_[(a - 1) * size + b - 1];
      const std::uint64_t r = b < a ? binom_[(a - 1) * size + b] : 0;
      if (l > kMax - r) throw UsageError("interaction column count overflows");
      binom_[a * size + b] = l + r;
    }
  }
  const std::uint64_t total = count(variables, max_degree) - 1;
  if (total > static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max())) {
    throw UsageError("interaction column count exceeds addressable size");
  }
  columns_ = static_cast<std::size_t>(total);
}

std::uint64_t InteractionIndex::count(std::size_t m, std::size_t budget) const {
  const std::size_t size = variables_ + max_degree_ + 1;
  return binom_[(m + budget) * size + m];
}

std::vector<Index> InteractionIndex::decode(std::size_t column) const {
  if (column < 1 || column > columns_) {
    throw UsageError("interaction column " + std::to_string(column) + " out of range");
  }
  std::vector<Index> factors;
  std::uint64_t pos = column;
  std::size_t budget = max_degree_;
  for (std::size_t var = variables_; var >= 1; --var) {
    std::size_t e = 0;
    while (e < budget && pos >= count(var - 1, budget - e)) {
      pos -= count(var - 1, budget - e);
      ++e;
    }
    factors.insert(factors.begin(), e, var);
    budget -= e;
  }
  return factors;
}

std::size_t InteractionIndex::encode(std::span<const Index> factors) const {
  if (factors.empty() || factors.size() > max_degree_) {
    throw UsageError("interaction needs between 1 and " + std::to_string(max_degree_) + " factors");
  }
  std::vector<std::size_t> exponents(variables_ + 1, 0);
  for (Index f : factors) {
    if (f < 1 || f > variables_) throw UsageError("interaction factor out of range");
    ++exponents[f];
  }
  std::uint64_t pos = 0;
  std::size_t budget = max_degree_;
  for (std::size_t var = variables_; var >= 1; --var) {
    for (std::size_t t = 0; t < exponents[var]; ++t) pos += count(var - 1, budget - t);
    budget -= exponents[var];
  }
  return static_cast<std::size_t>(pos);
}

void for_each_interaction(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t max_degree,
                          const std::function<void(std::size_t, const Eigen::VectorXd&)>& sink) {
  const auto v = static_cast<std::size_t>(x.cols());
  const InteractionIndex index(v, max_degree);  // validates sizes
  (void)index;
  // partial[l] is the product over variables above l of their chosen powers.
  std::vector<Eigen::VectorXd> partial(v + 1, Eigen::VectorXd::Ones(x.rows()));
  std::size_t column = 0;
  auto visit = [&](auto&& self, std::size_t var, std::size_t budget, bool any) -> void {
    if (var == 0) {
      if (any) sink(++column, partial[0]);
      return;
    }
    Eigen::VectorXd& level = partial[var - 1];
    level = partial[var];
    for (std::size_t e = 0; e <= budget; ++e) {
      if (e > 0) level.array() *= x.col(static_cast<Eigen::Index>(var - 1)).array();
      self(self, var - 1, budget - e, any || e > 0);
    }
  };
  visit(visit, v, max_degree, false);
}

InteractionDesign fgeninter(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t max_degree) {
  InteractionIndex index(static_cast<std::size_t>(x.cols()), max_degree);
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(index.columns()));
  for_each_interaction(x, max_degree, [&](std::size_t col, const Eigen::VectorXd& values) {
    out.col(static_cast<Eigen::Index>(col - 1)) = values;
  });
  return {std::move(out), std::move(index)};
}

Eigen::MatrixXd fgentrig(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw UsageError("fgentrig: n and m must be positive");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * m));
  const double nn = static_cast<double>(n);
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t i = 1; i <= n; ++i) {
      // Reduce i*j modulo 2n so the angle stays in [0, 2 pi).
      const double arg = std::numbers::pi * static_cast<double>((i * j) % (2 * n)) / nn;
      out(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(2 * j - 2)) = std::sin(arg);
      out(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(2 * j - 1)) = std::cos(arg);
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<std::size_t> mad_outliers(std::span<const double> x, double c) {
  if (x.size() < 2) throw UsageError("mad_outliers needs at least two values");
  if (!(c > 0.0)) throw UsageError("mad_outliers: c must be positive");
  const double med = median({x.begin(), x.end()});
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
  const double mad = 1.4826 * median(dev);
  std::vector<std::size_t> out;
  if (mad == 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (dev[i] > 0.0) out.push_back(i + 1);
    }
    if (out.empty()) throw DataError("mad_outliers: constant data, threshold undefined");
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (dev[i] >= c * mad) out.push_back(i + 1);
  }
  return out;
}

}  // namespace approxreg
