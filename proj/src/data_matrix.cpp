#include "approxreg/data_matrix.hpp"

#include <cmath>
#include <string>

#include "approxreg/errors.hpp"

namespace approxreg {

namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!std::isfinite(m(r, c))) {
        throw DataError(std::string("non-finite value in ") + what + " at row " +
                        std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      }
    }
  }
}

}  // namespace

DataMatrix::DataMatrix(Eigen::VectorXd y, Eigen::MatrixXd x,
                       std::vector<std::string> names) {
  if (y.size() < 1) throw DataError("dependent variable is empty");
  if (x.cols() < 1) throw DataError("covariate matrix has no columns");
  if (x.rows() != y.size()) {
    throw DataError("covariate matrix has " + std::to_string(x.rows()) +
                    " rows but y has length " + std::to_string(y.size()));
  }
  if (!names.empty() && names.size() != static_cast<std::size_t>(x.cols())) {
    throw DataError("expected " + std::to_string(x.cols()) + " column names, got " +
                    std::to_string(names.size()));
  }
  require_finite(y, "y");
  require_finite(x, "X");
  auto cov = std::make_shared<Covariates>();
  cov->norm2 = x.colwise().squaredNorm().transpose();
  cov->x = std::move(x);
  cov->names = std::move(names);
  impl_ = std::make_shared<const Impl>(Impl{std::move(y), std::move(cov)});
}

DataMatrix::DataMatrix(Eigen::VectorXd y, std::shared_ptr<const Covariates> cov) {
  if (y.size() != cov->x.rows()) throw DataError("response length does not match covariates");
  require_finite(y, "y");
  impl_ = std::make_shared<const Impl>(Impl{std::move(y), std::move(cov)});
}

DataMatrix DataMatrix::with_response(Eigen::VectorXd y) const {
  return DataMatrix(std::move(y), impl_->cov);
}

void DataMatrix::check_index(Index j) const {
  if (j < 1 || j > q()) {
    throw DataError("covariate index " + std::to_string(j) + " outside 1.." +
                    std::to_string(q()));
  }
}

Eigen::VectorXd DataMatrix::column(Index j) const {
  if (j == kIntercept) return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n()));
  check_index(j);
  return impl_->cov->x.col(static_cast<Eigen::Index>(j - 1));
}

double DataMatrix::column_norm2(Index j) const {
  if (j == kIntercept) return static_cast<double>(n());
  check_index(j);
  return impl_->cov->norm2(static_cast<Eigen::Index>(j - 1));
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x.rowwise() - x.colwise().mean();
  const double denom = x.rows() > 1 ? static_cast<double>(x.rows() - 1) : 1.0;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double sd = std::sqrt(out.col(c).squaredNorm() / denom);
    if (sd > 0.0) out.col(c) /= sd;
  }
  return out;
}

}  // namespace approxreg
