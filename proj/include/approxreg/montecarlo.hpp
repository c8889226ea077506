#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "approxreg/data_matrix.hpp"
#include "approxreg/selection.hpp"

namespace approxreg {

// Seed for replication `rep` of a run seeded with `seed` (splitmix64 of the
// pair), so replications can run in any order.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

Eigen::VectorXd standard_normal_vector(std::size_t n, std::uint64_t seed);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;  // at the requested level
  bool passed = false;          // statistic below the critical value
};

// Asymptotic Kolmogorov survival function with Stephens' finite-sample
// correction: P(D_N > d).
double kolmogorov_pvalue(double d, std::size_t n);
// Smallest d with kolmogorov_pvalue(d, n) <= alpha.
double kolmogorov_critical_value(std::size_t n, double alpha);
// One-sample KS test of `samples` against `cdf`.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha = 0.01);

enum class Design { FixedMatrix, PlantedSignal, LaggedSelf, RealisticHybrid };

struct SimulationSpec {
  std::uint64_t seed = 1;
  std::size_t nsim = 1000;
  Design design = Design::FixedMatrix;
  double amplitude = 10.0;
  double sigma = 1.0;
  std::size_t planted = 6;
  std::size_t threads = 1;
};

// RSS_{Z u W} / RSS_W for nsim independent standard Gaussian columns Z, where
// W is a fixed design (possibly empty) and y is fixed.
std::vector<double> gaussian_replacement_ratios(const Eigen::VectorXd& y,
                                                const Eigen::MatrixXd& reduced,
                                                const SimulationSpec& spec);

struct BetaLawResult {
  std::size_t n = 0;
  std::size_t k = 0;
  KsResult ks;
  std::vector<double> ratios;
};

// Builds a design of n rows with k columns in the full subset, replaces one
// column with Gaussian noise nsim times and tests the RSS ratios against
// Beta((n-k)/2, 1/2). FixedMatrix uses i.i.d. Gaussian y and covariates;
// LaggedSelf uses an AR(2) series and its own lags 1..k-1 as the reduced
// design.
BetaLawResult beta_law_check(std::size_t n, std::size_t k, const SimulationSpec& spec,
                             double alpha = 0.01);

struct SimGpvalResult {
  double p_f = 1.0;
  double freq_better = 0.0;
  // F P-value of each replacement column in its own fit; uniform on (0,1).
  std::vector<double> replacement_pvalues;
};

// Compares covariate j of `subset` with nsim standard Gaussian replacements.
// With intercept the fits include a ones column.
SimGpvalResult simgpval(const DataMatrix& data, std::span<const Index> subset, Index j,
                        const SimulationSpec& spec, bool intercept = true);

// Block-correlated Gaussian covariates (correlation rho within consecutive
// blocks of block_size columns, independent across blocks), standardized.
Eigen::MatrixXd correlated_design(std::size_t n, std::size_t q, std::size_t block_size, double rho,
                                  std::uint64_t seed);

enum class Selector { F1st, F3st };

struct RecoveryRecord {
  std::size_t replication = 0;
  std::vector<Index> planted;   // ascending
  std::vector<Index> selected;  // ascending, best approximation
  bool exact = false;
  bool exact_any = false;  // planted set among all returned approximations
  std::size_t hits = 0;
  std::size_t false_positives = 0;
};

struct RecoverySummary {
  std::vector<RecoveryRecord> records;
  std::size_t exact = 0;
  std::size_t exact_any = 0;
  double hit_rate = 0.0;
  double mean_false_positives = 0.0;
  std::size_t runs_with_false_positive = 0;
};

// Per replication: draws spec.planted distinct columns, sets
// y = amplitude * sum of those columns + sigma * N(0, 1) and runs the
// selector. f3st is judged on its best approximation.
RecoverySummary planted_recovery(const SimulationSpec& spec, const Eigen::MatrixXd& covariates,
                                 Selector selector, const SelectionConfig& cfg);

struct RealisticRecord {
  std::size_t replication = 0;
  std::size_t valid_approximations = 0;
  bool noise_selected = false;
  std::vector<double> best_sd;  // residual sd of up to the two best
};

// Response = mean of the fitted values of the base approximations plus
// N(0, noise_sd^2); design = their covariates (ascending, deduplicated)
// followed by n_noise_cols standard Gaussian columns. Runs f3st with cfg.
std::vector<RealisticRecord> realistic_sim(const std::vector<Approximation>& base,
                                           const DataMatrix& data, double noise_sd,
                                           std::size_t n_noise_cols, const SimulationSpec& spec,
                                           const SelectionConfig& cfg);

}  // namespace approxreg
