#include "approxreg/subset_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "approxreg/errors.hpp"

namespace approxreg {

SubsetState::SubsetState(const DataMatrix& data)
    : q_(static_cast<Eigen::Index>(data.n()), 0),
      r_(0, 0),
      qty_(0),
      resid_(data.y()),
      coef_(0),
      rss_(data.y().squaredNorm()) {}

bool SubsetState::contains(Index j) const {
  return std::find(indices_.begin(), indices_.end(), j) != indices_.end();
}

bool SubsetState::append(const DataMatrix& data, Index j) {
  const Eigen::VectorXd x = data.column(j);
  indices_.push_back(j);

  const Eigen::Index r = q_.cols();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd v = x;
  for (int pass = 0; pass < 2 && r > 0; ++pass) {
    const Eigen::VectorXd c = q_.transpose() * v;
    v.noalias() -= q_ * c;
    h += c;
  }
  const double norm2 = v.squaredNorm();
  const double x_norm2 = x.squaredNorm();
  if (x_norm2 == 0.0 || norm2 < kCollinearTol * x_norm2) return false;

  const double norm = std::sqrt(norm2);
  q_.conservativeResize(Eigen::NoChange, r + 1);
  q_.col(r) = v / norm;

  Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(r + 1, r + 1);
  grown.topLeftCorner(r, r) = r_;
  grown.block(0, r, r, 1) = h;
  grown(r, r) = norm;
  r_.swap(grown);

  const double proj = q_.col(r).dot(resid_);
  qty_.conservativeResize(r + 1);
  qty_(r) = proj;
  resid_ -= proj * q_.col(r);
  rss_ = resid_.squaredNorm();
  basis_indices_.push_back(j);
  return true;
}

void SubsetState::solve_coefficients(const DataMatrix& data) {
  const auto k = static_cast<Eigen::Index>(indices_.size());
  if (!rank_deficient()) {
    coef_ = r_.triangularView<Eigen::Upper>().solve(qty_);
    return;
  }
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(data.n()), k);
  for (Eigen::Index c = 0; c < k; ++c) xs.col(c) = data.column(indices_[static_cast<std::size_t>(c)]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs);
  cod.setThreshold(std::sqrt(kCollinearTol));
  coef_ = cod.solve(data.y());
}

SubsetState SubsetState::fit(const DataMatrix& data, std::span<const Index> indices) {
  SubsetState state(data);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] != kIntercept) data.check_index(indices[a]);
    for (std::size_t b = 0; b < a; ++b) {
      if (indices[a] == indices[b]) {
        throw UsageError("duplicate covariate index " + std::to_string(indices[a]));
      }
    }
  }
  for (Index j : indices) state.append(data, j);
  state.solve_coefficients(data);
  return state;
}

SubsetState SubsetState::add_column(const DataMatrix& data, Index j) const {
  if (j != kIntercept) data.check_index(j);
  if (contains(j)) throw UsageError("covariate " + std::to_string(j) + " already in subset");
  SubsetState next = *this;
  next.append(data, j);
  next.solve_coefficients(data);
  return next;
}

SubsetState SubsetState::drop_column(const DataMatrix& data, Index j) const {
  const auto it = std::find(indices_.begin(), indices_.end(), j);
  if (it == indices_.end()) throw UsageError("covariate " + std::to_string(j) + " not in subset");

  if (rank_deficient()) {
    std::vector<Index> rest;
    for (Index i : indices_) {
      if (i != j) rest.push_back(i);
    }
    return fit(data, rest);
  }

  SubsetState next = *this;
  const auto p = static_cast<Eigen::Index>(it - indices_.begin());
  const Eigen::Index r = r_.cols();

  // Removing column p leaves an upper Hessenberg block; restore triangularity
  // with rotations on adjacent rows, applied alike to Q and Q^T y.
  Eigen::MatrixXd rr(r, r - 1);
  rr.leftCols(p) = r_.leftCols(p);
  rr.rightCols(r - 1 - p) = r_.rightCols(r - 1 - p);
  for (Eigen::Index i = p; i < r - 1; ++i) {
    Eigen::JacobiRotation<double> g;
    g.makeGivens(rr(i, i), rr(i + 1, i));
    rr.block(i, i, 2, r - 1 - i).applyOnTheLeft(0, 1, g.adjoint());
    rr(i + 1, i) = 0.0;
    next.q_.applyOnTheRight(i, i + 1, g);
    Eigen::Vector2d t(next.qty_(i), next.qty_(i + 1));
    t.applyOnTheLeft(0, 1, g.adjoint());
    next.qty_(i) = t(0);
    next.qty_(i + 1) = t(1);
  }

  next.resid_ += next.qty_(r - 1) * next.q_.col(r - 1);
  next.q_.conservativeResize(Eigen::NoChange, r - 1);
  next.qty_.conservativeResize(r - 1);
  next.r_ = rr.topRows(r - 1);
  next.indices_.erase(next.indices_.begin() + p);
  next.basis_indices_ = next.indices_;
  next.rss_ = next.resid_.squaredNorm();
  next.solve_coefficients(data);
  return next;
}

}  // namespace approxreg
