#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "approxreg/montecarlo.hpp"
#include "approxreg/selection.hpp"

namespace approxreg {

// P-values use six digits after the point in scientific notation
// (2.716050e-25); coefficients nine decimals.
std::string format_pvalue(double p);
std::string format_coefficient(double b);

// One row per covariate then the intercept (covariate 0): covariate,
// coefficient, Gaussian P-value, F P-value.
void write_approximation_table(std::ostream& out, const Approximation& a);
void write_approximation_csv(std::ostream& out, const Approximation& a);
// One row per approximation: residual sd followed by ascending covariates.
void write_multiselect_table(std::ostream& out, const std::vector<Approximation>& list);
void write_multiselect_csv(std::ostream& out, const std::vector<Approximation>& list);

nlohmann::json to_json(const PValueRecord& r);
nlohmann::json to_json(const Approximation& a);
nlohmann::json to_json(const RecoveryRecord& r);
nlohmann::json to_json(const RealisticRecord& r);
nlohmann::json to_json(const KsResult& r);

}  // namespace approxreg
