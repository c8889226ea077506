#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "approxreg/data_matrix.hpp"

namespace approxreg {

// Least-squares fit of y on an ordered subset of columns, held as a thin QR
// factorization X_S = Q R together with the residual vector. Columns are added
// by Gram-Schmidt with one reorthogonalization pass and removed by Givens
// rotations, both O(n k).
//
// A column whose squared norm after projection onto the current span falls
// below kCollinearTol times its own squared norm does not enter the basis; the
// state is then flagged rank deficient and coefficients are the minimum-norm
// solution.
class SubsetState {
 public:
  static constexpr double kCollinearTol = 1e-12;

  // The empty subset: rss = |y|^2.
  explicit SubsetState(const DataMatrix& data);

  static SubsetState fit(const DataMatrix& data, std::span<const Index> indices);

  SubsetState add_column(const DataMatrix& data, Index j) const;
  SubsetState drop_column(const DataMatrix& data, Index j) const;

  const std::vector<Index>& indices() const { return indices_; }
  std::size_t k() const { return indices_.size(); }
  double rss() const { return rss_; }
  // Coefficients in the order of indices().
  const Eigen::VectorXd& coefficients() const { return coef_; }
  const Eigen::VectorXd& residuals() const { return resid_; }
  // Orthonormal basis of span{X_S}; rank() columns.
  const Eigen::MatrixXd& basis() const { return q_; }
  std::size_t rank() const { return static_cast<std::size_t>(q_.cols()); }
  bool rank_deficient() const { return rank() != k(); }
  bool contains(Index j) const;

 private:
  SubsetState() = default;
  // Appends column j in place. Returns false when it is collinear with the
  // current basis (the index is still recorded).
  bool append(const DataMatrix& data, Index j);
  void solve_coefficients(const DataMatrix& data);

  std::vector<Index> indices_;
  std::vector<Index> basis_indices_;  // columns represented in q_, in order
  Eigen::MatrixXd q_;       // n x r
  Eigen::MatrixXd r_;       // r x r upper triangular, columns follow basis_indices_
  Eigen::VectorXd qty_;     // Q^T y
  Eigen::VectorXd resid_;   // y - Q Q^T y
  Eigen::VectorXd coef_;
  double rss_ = 0.0;
};

}  // namespace approxreg
