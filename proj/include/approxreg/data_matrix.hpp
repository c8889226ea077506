#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace approxreg {

// Covariates are addressed with 1-based indices; index 0 is reserved for the
// implicit intercept (a column of ones).
using Index = std::size_t;
inline constexpr Index kIntercept = 0;

// Dependent variable y (length n) and covariate matrix X (n x q). Immutable
// once constructed; copies share storage, so passing by value is cheap.
class DataMatrix {
 public:
  DataMatrix(Eigen::VectorXd y, Eigen::MatrixXd x,
             std::vector<std::string> names = {});

  std::size_t n() const { return static_cast<std::size_t>(impl_->y.size()); }
  std::size_t q() const { return static_cast<std::size_t>(impl_->cov->x.cols()); }

  const Eigen::VectorXd& y() const { return impl_->y; }
  const Eigen::MatrixXd& x() const { return impl_->cov->x; }
  const std::vector<std::string>& names() const { return impl_->cov->names; }

  // Column j (1..q), or the ones vector for kIntercept.
  Eigen::VectorXd column(Index j) const;
  // Squared Euclidean norm of column j, cached at construction.
  double column_norm2(Index j) const;

  // Same covariates, different response. Shares the covariate storage.
  DataMatrix with_response(Eigen::VectorXd y) const;

  // Throws DataError unless j is 1..q.
  void check_index(Index j) const;

 private:
  struct Covariates {
    Eigen::MatrixXd x;
    Eigen::VectorXd norm2;
    std::vector<std::string> names;
  };
  struct Impl {
    Eigen::VectorXd y;
    std::shared_ptr<const Covariates> cov;
  };
  DataMatrix(Eigen::VectorXd y, std::shared_ptr<const Covariates> cov);

  std::shared_ptr<const Impl> impl_;
};

// Column-wise centring and scaling to unit sample variance. Constant columns
// are centred only.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

}  // namespace approxreg
