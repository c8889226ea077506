#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "approxreg/data_matrix.hpp"
#include "approxreg/pvalues.hpp"

namespace approxreg {

struct SelectionConfig {
  double p0 = 0.01;
  // The first kmn greedy steps accept their candidate whatever its P-value.
  std::size_t kmn = 0;
  // Greedy selections of at most mx covariates are refined by searching all
  // of their subsets.
  std::size_t mx = 21;
  // Covariates never considered (1-based).
  std::vector<Index> kex;
  // Add an intercept to every fit.
  bool inr = true;
  // The last column of X is already an intercept (all ones).
  bool xinr = false;
  bool sub = true;
  // Depth of the exclusion tree in f3st.
  std::size_t m = 1;
  // Worker cap for parallel stages; 0 uses all hardware threads.
  std::size_t threads = 1;
  // Covariate count used in the Gaussian adjustment. Defaults to the number
  // of columns of X, less the intercept column under xinr; excluded
  // covariates still count.
  std::optional<std::size_t> covariate_count;

  static constexpr std::size_t kMaxSubsetSearch = 26;

  // Throws UsageError on inconsistent settings for a design with q columns.
  void validate(std::size_t q) const;
};

// A least-squares approximation on a covariate subset. Covariate records come
// first in selection order; the intercept record, when fitted, is last and
// carries covariate index 0.
struct Approximation {
  std::vector<Index> indices;
  std::vector<PValueRecord> records;
  double rss = 0.0;
  double residual_sd = 0.0;  // sample standard deviation of the residuals
  bool intercept = false;
  bool valid = false;

  std::vector<Index> sorted_indices() const;
};

// Greedy forward path: every accepted covariate with the RSS after it was
// added (intercept already included when configured).
struct GreedyPath {
  std::vector<Index> selected;
  std::vector<double> rss;
  double base_rss = 0.0;
};

GreedyPath greedy_forward(const DataMatrix& data, const SelectionConfig& cfg);

// Least-squares fit of `indices` with P-values for every member.
Approximation evaluate_subset(const DataMatrix& data, std::span<const Index> indices,
                              const SelectionConfig& cfg);

// Searches all non-empty subsets of `pool` and returns the valid one with the
// smallest RSS, in pool order. Empty when no subset is valid.
std::optional<std::vector<Index>> best_valid_subset(const DataMatrix& data,
                                                    std::span<const Index> pool,
                                                    const SelectionConfig& cfg);

// Greedy forward selection with optional all-subset refinement. Returns no
// approximation when nothing is selected or no subset of the greedy set is
// valid. Selections larger than mx come back unrefined and possibly invalid.
std::optional<Approximation> f1st(const DataMatrix& data, const SelectionConfig& cfg);

// Repeated f1st runs, each excluding every covariate chosen so far.
std::vector<Approximation> f2st(const DataMatrix& data, const SelectionConfig& cfg);

// Exclusion tree of f1st runs to depth cfg.m. Valid approximations only,
// unique by index set, ordered by RSS.
std::vector<Approximation> f3st(const DataMatrix& data, const SelectionConfig& cfg);

namespace detail {

// Candidate columns and the covariate count for this design and
// configuration.
struct CandidateSpace {
  std::size_t q_effective = 0;
  std::vector<bool> allowed;  // indexed by column - 1
  bool intercept = false;
};
CandidateSpace candidate_space(const DataMatrix& data, const SelectionConfig& cfg);

}  // namespace detail

}  // namespace approxreg
