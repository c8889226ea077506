#include "approxreg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "approxreg/errors.hpp"
#include "approxreg/features.hpp"
#include "approxreg/incomplete_beta.hpp"
#include "approxreg/parallel.hpp"
#include "approxreg/subset_state.hpp"

namespace approxreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& w) {
  if (w.cols() == 0) return Eigen::MatrixXd(w.rows(), 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  return qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), w.cols());
}

Eigen::MatrixXd columns_of(const DataMatrix& data, std::span<const Index> cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = data.column(cols[c]);
  return out;
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
  return splitmix64(splitmix64(seed) ^ (rep + 0x632be59bd9b4e019ULL));
}

Eigen::VectorXd standard_normal_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
  return z;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (d <= 0.0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_critical_value(std::size_t n, double alpha) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_pvalue(mid, n) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf, double alpha) {
  if (samples.empty()) throw UsageError("ks_test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_pvalue(d, samples.size());
  r.critical_value = kolmogorov_critical_value(samples.size(), alpha);
  r.passed = d < r.critical_value;
  return r;
}

std::vector<double> gaussian_replacement_ratios(const Eigen::VectorXd& y,
                                                const Eigen::MatrixXd& reduced,
                                                const SimulationSpec& spec) {
  if (reduced.rows() != y.size()) throw UsageError("design rows do not match y");
  if (y.size() <= reduced.cols() + 1) throw UsageError("too few observations for the replacement");
  const Eigen::MatrixXd q = thin_q(reduced);
  const Eigen::VectorXd r = y - q * (q.transpose() * y);
  const double rss = r.squaredNorm();
  if (!(rss > 0.0)) throw DataError("reduced design fits y exactly; ratios undefined");
  const auto n = static_cast<std::size_t>(y.size());

  std::vector<double> ratios(spec.nsim);
  parallel_for(spec.nsim, spec.threads, [&](std::size_t rep) {
    Eigen::VectorXd z = standard_normal_vector(n, replication_seed(spec.seed, rep));
    if (q.cols() > 0) z -= q * (q.transpose() * z);
    const double cross = z.dot(r);
    ratios[rep] = std::clamp(1.0 - cross * cross / (z.squaredNorm() * rss), 0.0, 1.0);
  });
  return ratios;
}

BetaLawResult beta_law_check(std::size_t n, std::size_t k, const SimulationSpec& spec, double alpha) {
  if (k < 1 || n <= k) throw UsageError("beta_law_check needs n > k >= 1");
  const std::uint64_t base = replication_seed(spec.seed, ~std::uint64_t{0});
  Eigen::VectorXd y;
  Eigen::MatrixXd reduced;
  if (spec.design == Design::LaggedSelf) {
    const std::size_t lags = std::max<std::size_t>(k - 1, 1);
    const std::size_t burn = 200;
    const Eigen::VectorXd e = standard_normal_vector(n + lags + burn, base);
    Eigen::VectorXd series(e.size());
    for (Eigen::Index t = 0; t < e.size(); ++t) {
      series(t) = e(t) + (t >= 1 ? 0.5 * series(t - 1) : 0.0) + (t >= 2 ? 0.3 * series(t - 2) : 0.0);
    }
    const Eigen::VectorXd tail = series.tail(static_cast<Eigen::Index>(n + lags));
    const LagDesign design = flag(tail, 1, lags);
    y = design.y;
    reduced = design.x.leftCols(static_cast<Eigen::Index>(k - 1));
  } else {
    y = standard_normal_vector(n, base);
    reduced.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k - 1));
    for (Eigen::Index c = 0; c < reduced.cols(); ++c) {
      reduced.col(c) = standard_normal_vector(n, replication_seed(base, static_cast<std::uint64_t>(c)));
    }
  }
  BetaLawResult out;
  out.n = n;
  out.k = k;
  out.ratios = gaussian_replacement_ratios(y, reduced, spec);
  const double a = 0.5 * static_cast<double>(n - k);
  out.ks = ks_test(out.ratios, [a](double x) { return incomplete_beta(a, 0.5, std::clamp(x, 0.0, 1.0)); },
                   alpha);
  return out;
}

SimGpvalResult simgpval(const DataMatrix& data, std::span<const Index> subset, Index j,
                        const SimulationSpec& spec, bool intercept) {
  if (std::find(subset.begin(), subset.end(), j) == subset.end()) {
    throw UsageError("simgpval: covariate " + std::to_string(j) + " is not in the subset");
  }
  if (spec.nsim < 100) throw UsageError("simgpval: nsim must be at least 100");
  std::vector<Index> full;
  if (intercept) full.push_back(kIntercept);
  full.insert(full.end(), subset.begin(), subset.end());
  std::vector<Index> reduced_cols;
  for (Index c : full) {
    if (c != j) reduced_cols.push_back(c);
  }
  const std::size_t n = data.n();
  const std::size_t k = full.size();
  if (n <= k) throw DataError("simgpval: subset too large for the sample");

  const SubsetState fit_full = SubsetState::fit(data, full);
  const SubsetState fit_reduced = SubsetState::fit(data, reduced_cols);
  if (fit_full.rank_deficient()) throw DataError("simgpval: degenerate subset");
  const double rss_s = fit_full.rss();
  const double rss_w = fit_reduced.rss();
  if (!(rss_w > 0.0)) throw DataError("simgpval: degenerate subset");

  const double a = 0.5 * static_cast<double>(n - k);
  const double ratio_s = std::min(rss_s / rss_w, 1.0);
  SimGpvalResult out;
  out.p_f = incomplete_beta(a, 0.5, ratio_s);
  const std::vector<double> ratios =
      gaussian_replacement_ratios(data.y(), columns_of(data, reduced_cols), spec);
  std::size_t better = 0;
  out.replacement_pvalues.reserve(ratios.size());
  for (double r : ratios) {
    if (r * rss_w < rss_s) ++better;
    out.replacement_pvalues.push_back(incomplete_beta(a, 0.5, r));
  }
  out.freq_better = static_cast<double>(better) / static_cast<double>(ratios.size());
  return out;
}

Eigen::MatrixXd correlated_design(std::size_t n, std::size_t q, std::size_t block_size, double rho,
                                  std::uint64_t seed) {
  if (block_size < 1) throw UsageError("block size must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw UsageError("block correlation must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(q));
  Eigen::VectorXd factor(rows);
  for (std::size_t c = 0; c < q; ++c) {
    if (c % block_size == 0) {
      for (Eigen::Index i = 0; i < rows; ++i) factor(i) = gauss(rng);
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      x(i, static_cast<Eigen::Index>(c)) = std::sqrt(rho) * factor(i) + std::sqrt(1.0 - rho) * gauss(rng);
    }
  }
  return standardize_columns(x);
}

RecoverySummary planted_recovery(const SimulationSpec& spec, const Eigen::MatrixXd& covariates,
                                 Selector selector, const SelectionConfig& cfg) {
  const auto q = static_cast<std::size_t>(covariates.cols());
  const auto n = static_cast<std::size_t>(covariates.rows());
  if (spec.planted > q) throw UsageError("more planted covariates than columns");
  const DataMatrix base(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), covariates);

  RecoverySummary summary;
  summary.records.resize(spec.nsim);
  parallel_for(spec.nsim, spec.threads, [&](std::size_t rep) {
    std::mt19937_64 rng(replication_seed(spec.seed, rep));
    std::vector<Index> all(q);
    std::iota(all.begin(), all.end(), Index{1});
    std::vector<Index> planted;
    std::sample(all.begin(), all.end(), std::back_inserter(planted), spec.planted, rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = spec.sigma * gauss(rng);
    for (Index p : planted) y += spec.amplitude * covariates.col(static_cast<Eigen::Index>(p - 1));

    const DataMatrix data = base.with_response(std::move(y));
    SelectionConfig c = cfg;
    c.threads = 1;
    RecoveryRecord rec;
    rec.replication = rep;
    rec.planted = planted;
    if (selector == Selector::F1st) {
      if (auto a = f1st(data, c)) rec.selected = a->sorted_indices();
      rec.exact = rec.selected == planted;
      rec.exact_any = rec.exact;
    } else {
      const auto approxs = f3st(data, c);
      if (!approxs.empty()) rec.selected = approxs.front().sorted_indices();
      rec.exact = rec.selected == planted;
      for (const auto& a : approxs) rec.exact_any = rec.exact_any || a.sorted_indices() == planted;
    }
    for (Index s : rec.selected) {
      if (std::binary_search(planted.begin(), planted.end(), s)) {
        ++rec.hits;
      } else {
        ++rec.false_positives;
      }
    }
    summary.records[rep] = std::move(rec);
  });

  double hits = 0.0;
  double fps = 0.0;
  for (const auto& r : summary.records) {
    summary.exact += r.exact ? 1 : 0;
    summary.exact_any += r.exact_any ? 1 : 0;
    summary.runs_with_false_positive += r.false_positives > 0 ? 1 : 0;
    hits += static_cast<double>(r.hits);
    fps += static_cast<double>(r.false_positives);
  }
  if (spec.nsim > 0) {
    const double reps = static_cast<double>(spec.nsim);
    summary.hit_rate = spec.planted ? hits / (reps * static_cast<double>(spec.planted)) : 0.0;
    summary.mean_false_positives = fps / reps;
  }
  return summary;
}

std::vector<RealisticRecord> realistic_sim(const std::vector<Approximation>& base,
                                           const DataMatrix& data, double noise_sd,
                                           std::size_t n_noise_cols, const SimulationSpec& spec,
                                           const SelectionConfig& cfg) {
  if (base.empty()) throw UsageError("realistic_sim needs at least one approximation");
  const std::size_t n = data.n();
  Eigen::VectorXd signal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::set<Index> union_set;
  for (const Approximation& a : base) {
    std::vector<Index> cols;
    if (a.intercept) cols.push_back(kIntercept);
    cols.insert(cols.end(), a.indices.begin(), a.indices.end());
    const SubsetState fit = SubsetState::fit(data, cols);
    signal += data.y() - fit.residuals();
    union_set.insert(a.indices.begin(), a.indices.end());
  }
  signal /= static_cast<double>(base.size());
  const std::vector<Index> real(union_set.begin(), union_set.end());
  const std::size_t n_real = real.size();

  std::vector<RealisticRecord> out(spec.nsim);
  parallel_for(spec.nsim, spec.threads, [&](std::size_t rep) {
    const std::uint64_t s = replication_seed(spec.seed, rep);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_real + n_noise_cols));
    for (std::size_t c = 0; c < n_real; ++c) x.col(static_cast<Eigen::Index>(c)) = data.column(real[c]);
    for (std::size_t c = 0; c < n_noise_cols; ++c) {
      x.col(static_cast<Eigen::Index>(n_real + c)) = standard_normal_vector(n, replication_seed(s, c + 1));
    }
    const Eigen::VectorXd y = signal + noise_sd * standard_normal_vector(n, replication_seed(s, 0));
    SelectionConfig c = cfg;
    c.threads = 1;
    const auto approxs = f3st(DataMatrix(y, std::move(x)), c);
    RealisticRecord rec;
    rec.replication = rep;
    rec.valid_approximations = approxs.size();
    for (const auto& a : approxs) {
      for (Index i : a.indices) rec.noise_selected = rec.noise_selected || i > n_real;
    }
    for (std::size_t i = 0; i < approxs.size() && i < 2; ++i) rec.best_sd.push_back(approxs[i].residual_sd);
    out[rep] = std::move(rec);
  });
  return out;
}

}  // namespace approxreg
