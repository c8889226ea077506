#include "approxreg/selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "approxreg/errors.hpp"
#include "approxreg/incomplete_beta.hpp"
#include "approxreg/parallel.hpp"
#include "approxreg/subset_state.hpp"

namespace approxreg {

namespace {

// RSS values at or below this fraction of |y|^2 are exact fits.
constexpr double kZeroRss = 1e-20;

double zero_threshold(const DataMatrix& data) { return kZeroRss * data.y().squaredNorm(); }

double snap(double rss, double zero) { return rss <= zero ? 0.0 : rss; }

// Sample standard deviation of the residual vector.
double residual_sd(const Eigen::VectorXd& resid) {
  if (resid.size() < 2) return 0.0;
  const double mean = resid.mean();
  return std::sqrt((resid.array() - mean).square().sum() /
                   static_cast<double>(resid.size() - 1));
}

// Largest RSS ratio whose P-value stays below p0 for the given Beta shape and
// exponent: I_x((n-k)/2, 1/2) < 1 - (1-p0)^(1/exponent).
double ratio_threshold(double p0, std::size_t n, std::size_t fitted, long exponent) {
  const double pf_limit = -std::expm1(std::log1p(-p0) / static_cast<double>(exponent));
  const double a = 0.5 * static_cast<double>(n - fitted);
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, 0.5, mid) < pf_limit) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

void SelectionConfig::validate(std::size_t q) const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw UsageError("p0 must lie in (0, 1)");
  if (inr && xinr) throw UsageError("inr and xinr cannot both be set");
  if (m < 1) throw UsageError("f3st depth m must be at least 1");
  if (mx > kMaxSubsetSearch) {
    throw UsageError("mx above " + std::to_string(kMaxSubsetSearch) + " is not supported");
  }
  for (Index j : kex) {
    if (j < 1 || j > q) throw UsageError("excluded covariate " + std::to_string(j) + " out of range");
  }
  if (covariate_count && *covariate_count < 1) throw UsageError("covariate count must be positive");
}

std::vector<Index> Approximation::sorted_indices() const {
  std::vector<Index> out = indices;
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

CandidateSpace candidate_space(const DataMatrix& data, const SelectionConfig& cfg) {
  cfg.validate(data.q());
  CandidateSpace space;
  const std::size_t q = data.q();
  space.allowed.assign(q, true);
  space.intercept = cfg.inr || cfg.xinr;
  std::size_t counted = q;
  if (cfg.xinr) {
    if (!(data.x().col(static_cast<Eigen::Index>(q - 1)).array() == 1.0).all()) {
      throw DataError("xinr is set but the last column is not all ones");
    }
    space.allowed[q - 1] = false;
    counted = q - 1;
  }
  for (Index j : cfg.kex) space.allowed[j - 1] = false;
  space.q_effective = cfg.covariate_count.value_or(counted);
  return space;
}

}  // namespace detail

GreedyPath greedy_forward(const DataMatrix& data, const SelectionConfig& cfg) {
  const auto space = detail::candidate_space(data, cfg);
  const std::size_t n = data.n();
  const std::size_t q = data.q();
  const Eigen::MatrixXd& x = data.x();
  const double zero = zero_threshold(data);

  GreedyPath path;
  SubsetState state(data);
  if (space.intercept) state = state.add_column(data, kIntercept);
  path.base_rss = state.rss();

  std::vector<bool> active = space.allowed;
  // Squared norm of each column after projection on the current span, and its
  // inner product with the current residual.
  Eigen::VectorXd proj_norm2(static_cast<Eigen::Index>(q));
  for (Index j = 1; j <= q; ++j) proj_norm2(static_cast<Eigen::Index>(j - 1)) = data.column_norm2(j);
  Eigen::VectorXd cross;
  {
    Eigen::MatrixXd probe(static_cast<Eigen::Index>(n), 2);
    if (space.intercept) {
      probe.col(0) = state.basis().col(0);
    } else {
      probe.col(0).setZero();
    }
    probe.col(1) = state.residuals();
    const Eigen::MatrixXd w = x.transpose() * probe;
    proj_norm2 -= w.col(0).cwiseAbs2();
    cross = w.col(1);
  }

  const std::size_t base_columns = space.intercept ? 1 : 0;
  while (true) {
    const std::size_t k = path.selected.size();
    const std::size_t fitted = k + base_columns;
    if (n <= fitted + 1 || k >= space.q_effective) break;
    const double rss_current = snap(state.rss(), zero);
    if (rss_current == 0.0) break;

    std::optional<SubsetState> next;
    Index chosen = 0;
    while (!next) {
      double best = -1.0;
      Index best_j = 0;
      for (Index j = 1; j <= q; ++j) {
        if (!active[j - 1]) continue;
        const auto c = static_cast<Eigen::Index>(j - 1);
        const double nrm = proj_norm2(c);
        if (nrm <= SubsetState::kCollinearTol * data.column_norm2(j)) {
          active[j - 1] = false;
          continue;
        }
        const double reduction = cross(c) * cross(c) / nrm;
        if (reduction > best) {
          best = reduction;
          best_j = j;
        }
      }
      if (best_j == 0) break;
      SubsetState trial = state.add_column(data, best_j);
      active[best_j - 1] = false;
      if (trial.rank_deficient()) continue;
      next = std::move(trial);
      chosen = best_j;
    }
    if (!next) break;

    const double rss_with = snap(next->rss(), zero);
    const double p = gaussian_pvalue(rss_with, rss_current, n, fitted + 1,
                                     static_cast<long>(space.q_effective - k))
                         .p_gauss;
    if (!(p < cfg.p0) && k >= cfg.kmn) break;

    state = std::move(*next);
    path.selected.push_back(chosen);
    path.rss.push_back(state.rss());

    Eigen::MatrixXd probe(static_cast<Eigen::Index>(n), 2);
    probe.col(0) = state.basis().col(static_cast<Eigen::Index>(state.rank() - 1));
    probe.col(1) = state.residuals();
    const Eigen::MatrixXd w = x.transpose() * probe;
    proj_norm2 -= w.col(0).cwiseAbs2();
    cross = w.col(1);
  }
  return path;
}

Approximation evaluate_subset(const DataMatrix& data, std::span<const Index> indices,
                              const SelectionConfig& cfg) {
  const auto space = detail::candidate_space(data, cfg);
  const std::size_t n = data.n();
  const double zero = zero_threshold(data);

  std::vector<Index> columns;
  if (space.intercept) columns.push_back(kIntercept);
  columns.insert(columns.end(), indices.begin(), indices.end());
  const std::size_t fitted = columns.size();
  if (fitted == 0) throw UsageError("cannot evaluate an empty subset");
  if (n <= fitted) {
    throw DataError("subset of " + std::to_string(fitted) + " columns needs more than " +
                    std::to_string(n) + " observations");
  }

  const SubsetState full = SubsetState::fit(data, columns);
  const double rss = snap(full.rss(), zero);
  const std::size_t k = indices.size();
  if (space.q_effective < k) throw UsageError("subset larger than the covariate count");
  const long exponent = static_cast<long>(space.q_effective - k + 1);

  Approximation approx;
  approx.indices.assign(indices.begin(), indices.end());
  approx.intercept = space.intercept;
  approx.rss = full.rss();
  approx.residual_sd = residual_sd(full.residuals());
  approx.valid = k > 0;

  auto record_for = [&](Index col, std::size_t pos, long exp) {
    const SubsetState reduced = full.drop_column(data, col);
    PValueRecord rec = gaussian_pvalue(rss, snap(reduced.rss(), zero), n, fitted, exp);
    rec.covariate = col;
    rec.coefficient = full.coefficients()(static_cast<Eigen::Index>(pos));
    return rec;
  };
  const std::size_t offset = space.intercept ? 1 : 0;
  for (std::size_t i = 0; i < k; ++i) {
    PValueRecord rec = full.rank_deficient() ? PValueRecord{} : record_for(indices[i], i + offset, exponent);
    rec.covariate = indices[i];
    if (full.rank_deficient()) {
      rec.coefficient = full.coefficients()(static_cast<Eigen::Index>(i + offset));
      rec.exponent = exponent;
      rec.degenerate = true;
    }
    if (!(rec.p_gauss < cfg.p0)) approx.valid = false;
    approx.records.push_back(rec);
  }
  if (space.intercept) {
    PValueRecord rec = full.rank_deficient() ? PValueRecord{} : record_for(kIntercept, 0, 1);
    rec.covariate = kIntercept;
    rec.coefficient = full.coefficients()(0);
    approx.records.push_back(rec);
  }
  return approx;
}

std::optional<std::vector<Index>> best_valid_subset(const DataMatrix& data,
                                                    std::span<const Index> pool,
                                                    const SelectionConfig& cfg) {
  const auto space = detail::candidate_space(data, cfg);
  const std::size_t k = pool.size();
  if (k == 0) return std::nullopt;
  if (k > SelectionConfig::kMaxSubsetSearch) {
    throw UsageError("all-subset search over " + std::to_string(k) + " covariates is too large");
  }
  const std::size_t n = data.n();
  const std::size_t base = space.intercept ? 1 : 0;
  const double zero = zero_threshold(data);

  // Reduce to the (k+1)-dimensional problem given by the triangular factor of
  // [intercept, X_pool, y]; every subset fit is exact in that space.
  const auto cols = static_cast<Eigen::Index>(base + k + 1);
  if (static_cast<Eigen::Index>(n) < cols) {
    throw DataError("too few observations for the all-subset search");
  }
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(n), cols);
  if (base) stacked.col(0).setOnes();
  for (std::size_t i = 0; i < k; ++i) {
    stacked.col(static_cast<Eigen::Index>(base + i)) = data.column(pool[i]);
  }
  stacked.col(cols - 1) = data.y();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  const Eigen::MatrixXd tri = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const auto dim = static_cast<Eigen::Index>(k + 1);
  const Eigen::MatrixXd a = tri.block(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(base), dim,
                                      static_cast<Eigen::Index>(k));
  const Eigen::VectorXd b = tri.block(static_cast<Eigen::Index>(base), cols - 1, dim, 1);

  const std::size_t masks = std::size_t{1} << k;
  std::vector<double> rss(masks, 0.0);

  // Depth-first over include/exclude decisions. Level d holds the remaining
  // columns and the target projected off every included column.
  struct Level {
    Eigen::MatrixXd cols;
    Eigen::VectorXd target;
  };
  std::vector<Level> levels(k + 1);
  levels[0] = {a, b};
  Eigen::VectorXd col_norm2 = a.colwise().squaredNorm().transpose();

  auto descend = [&](auto&& self, std::size_t i, std::size_t level, std::size_t mask) -> void {
    if (i == k) {
      rss[mask] = levels[level].target.squaredNorm();
      return;
    }
    self(self, i + 1, level, mask);
    const Level& cur = levels[level];
    Level& nxt = levels[level + 1];
    const auto ci = static_cast<Eigen::Index>(i);
    const double nrm2 = cur.cols.col(ci).squaredNorm();
    if (col_norm2(ci) == 0.0 || nrm2 < SubsetState::kCollinearTol * col_norm2(ci)) {
      nxt.cols = cur.cols;
      nxt.target = cur.target;
    } else {
      const Eigen::VectorXd u = cur.cols.col(ci) / std::sqrt(nrm2);
      nxt.cols = cur.cols;
      for (Eigen::Index c = ci + 1; c < static_cast<Eigen::Index>(k); ++c) {
        nxt.cols.col(c) -= u.dot(nxt.cols.col(c)) * u;
      }
      nxt.target = cur.target - u.dot(cur.target) * u;
    }
    self(self, i + 1, level + 1, mask | (std::size_t{1} << i));
  };
  descend(descend, 0, 0, 0);
  for (double& v : rss) v = snap(v, zero);

  // Ratio thresholds per subset size; comparisons within a small band of the
  // threshold fall back to the exact P-value.
  std::vector<double> threshold(k + 1, 0.0);
  for (std::size_t s = 1; s <= k; ++s) {
    if (n <= s + base || space.q_effective < s) continue;
    threshold[s] = ratio_threshold(cfg.p0, n, s + base, static_cast<long>(space.q_effective - s + 1));
  }

  std::optional<std::size_t> best;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto s = static_cast<std::size_t>(std::popcount(mask));
    if (n <= s + base || space.q_effective < s) continue;
    if (best && rss[mask] >= rss[*best]) continue;
    bool valid = true;
    for (std::size_t i = 0; i < k && valid; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      if (!(mask & bit)) continue;
      const double without = rss[mask ^ bit];
      if (without <= 0.0) {
        valid = false;
        break;
      }
      const double ratio = rss[mask] / without;
      const double t = threshold[s];
      if (ratio < t * (1.0 - 1e-9)) continue;
      if (ratio > t * (1.0 + 1e-9)) {
        valid = false;
        break;
      }
      const double p = gaussian_pvalue(rss[mask], without, n, s + base,
                                       static_cast<long>(space.q_effective - s + 1))
                           .p_gauss;
      valid = p < cfg.p0;
    }
    if (valid) best = mask;
  }
  if (!best) return std::nullopt;
  std::vector<Index> out;
  for (std::size_t i = 0; i < k; ++i) {
    if (*best & (std::size_t{1} << i)) out.push_back(pool[i]);
  }
  return out;
}

std::optional<Approximation> f1st(const DataMatrix& data, const SelectionConfig& cfg) {
  const GreedyPath path = greedy_forward(data, cfg);
  if (path.selected.empty()) return std::nullopt;
  if (cfg.sub && path.selected.size() <= cfg.mx) {
    const auto subset = best_valid_subset(data, path.selected, cfg);
    if (!subset) return std::nullopt;
    return evaluate_subset(data, *subset, cfg);
  }
  return evaluate_subset(data, path.selected, cfg);
}

std::vector<Approximation> f2st(const DataMatrix& data, const SelectionConfig& cfg) {
  std::vector<Approximation> out;
  SelectionConfig round = cfg;
  while (true) {
    auto approx = f1st(data, round);
    if (!approx || approx->indices.empty()) break;
    round.kex.insert(round.kex.end(), approx->indices.begin(), approx->indices.end());
    out.push_back(std::move(*approx));
  }
  return out;
}

std::vector<Approximation> f3st(const DataMatrix& data, const SelectionConfig& cfg) {
  cfg.validate(data.q());
  using Exclusion = std::vector<Index>;
  auto normalized = [](Exclusion e) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
  };

  struct Node {
    Exclusion excluded;
    std::optional<Approximation> result;
  };
  std::set<Exclusion> seen;
  std::vector<Node> all;

  auto run_level = [&](std::vector<Exclusion> pending) {
    std::vector<Node> nodes(pending.size());
    parallel_for(pending.size(), cfg.threads, [&](std::size_t i) {
      SelectionConfig c = cfg;
      c.kex = pending[i];
      c.threads = 1;
      nodes[i].excluded = pending[i];
      nodes[i].result = f1st(data, c);
    });
    return nodes;
  };

  Exclusion root = normalized(cfg.kex);
  seen.insert(root);
  std::vector<Node> frontier = run_level({root});
  for (std::size_t depth = 1; depth <= cfg.m; ++depth) {
    std::vector<Exclusion> pending;
    for (const Node& node : frontier) {
      if (!node.result || !node.result->valid) continue;
      for (Index c : node.result->indices) {
        Exclusion e = node.excluded;
        e.push_back(c);
        e = normalized(std::move(e));
        if (seen.insert(e).second) pending.push_back(std::move(e));
      }
    }
    all.insert(all.end(), std::make_move_iterator(frontier.begin()),
               std::make_move_iterator(frontier.end()));
    frontier = run_level(std::move(pending));
  }
  all.insert(all.end(), std::make_move_iterator(frontier.begin()),
             std::make_move_iterator(frontier.end()));

  std::map<std::vector<Index>, Approximation> unique;
  for (Node& node : all) {
    if (!node.result || !node.result->valid) continue;
    auto key = node.result->sorted_indices();
    unique.try_emplace(std::move(key), std::move(*node.result));
  }
  std::vector<Approximation> out;
  out.reserve(unique.size());
  for (auto& [key, approx] : unique) out.push_back(std::move(approx));
  std::stable_sort(out.begin(), out.end(), [](const Approximation& l, const Approximation& r) {
    if (l.rss != r.rss) return l.rss < r.rss;
    return l.sorted_indices() < r.sorted_indices();
  });
  return out;
}

}  // namespace approxreg
