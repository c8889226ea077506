#include "approxreg/report.hpp"

#include <cstdio>
#include <ostream>

namespace approxreg {

std::string format_pvalue(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", p);
  return buf;
}

std::string format_coefficient(double b) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", b);
  return buf;
}

void write_approximation_table(std::ostream& out, const Approximation& a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%9s %16s %14s %14s\n", "covariate", "coefficient", "p_gauss", "p_f");
  out << buf;
  for (const PValueRecord& r : a.records) {
    std::snprintf(buf, sizeof buf, "%9zu %16s %14s %14s\n", r.covariate,
                  format_coefficient(r.coefficient).c_str(), format_pvalue(r.p_gauss).c_str(),
                  format_pvalue(r.p_f).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "rss %.6f  residual sd %.6f  %s\n", a.rss, a.residual_sd,
                a.valid ? "valid" : "not valid");
  out << buf;
}

void write_approximation_csv(std::ostream& out, const Approximation& a) {
  out << "covariate,coefficient,p_gauss,p_f\n";
  char buf[32];
  for (const PValueRecord& r : a.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.coefficient);
    out << r.covariate << ',' << buf << ',' << format_pvalue(r.p_gauss) << ','
        << format_pvalue(r.p_f) << '\n';
  }
}

void write_multiselect_table(std::ostream& out, const std::vector<Approximation>& list) {
  char buf[32];
  out << "sd: selected covariates\n";
  for (const Approximation& a : list) {
    std::snprintf(buf, sizeof buf, "%.4g:", a.residual_sd);
    out << buf;
    for (Index i : a.sorted_indices()) out << ' ' << i;
    out << '\n';
  }
}

void write_multiselect_csv(std::ostream& out, const std::vector<Approximation>& list) {
  out << "rank,rss,residual_sd,covariates\n";
  char buf[64];
  std::size_t rank = 0;
  for (const Approximation& a : list) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", a.rss, a.residual_sd);
    out << ++rank << ',' << buf << ',';
    bool first = true;
    for (Index i : a.sorted_indices()) {
      out << (first ? "" : " ") << i;
      first = false;
    }
    out << '\n';
  }
}

nlohmann::json to_json(const PValueRecord& r) {
  return {{"covariate", r.covariate}, {"coefficient", r.coefficient}, {"p_gauss", r.p_gauss},
          {"p_f", r.p_f},           {"exponent", r.exponent},       {"degenerate", r.degenerate}};
}

nlohmann::json to_json(const Approximation& a) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : a.records) records.push_back(to_json(r));
  return {{"indices", a.indices}, {"rss", a.rss},     {"residual_sd", a.residual_sd},
          {"valid", a.valid},     {"intercept", a.intercept}, {"records", records}};
}

nlohmann::json to_json(const RecoveryRecord& r) {
  return {{"replication", r.replication}, {"planted", r.planted}, {"selected", r.selected},
          {"exact", r.exact},             {"exact_any", r.exact_any}, {"hits", r.hits},
          {"false_positives", r.false_positives}};
}

nlohmann::json to_json(const RealisticRecord& r) {
  return {{"replication", r.replication},
          {"valid_approximations", r.valid_approximations},
          {"noise_selected", r.noise_selected},
          {"best_sd", r.best_sd}};
}

nlohmann::json to_json(const KsResult& r) {
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"critical_value", r.critical_value},
          {"passed", r.passed}};
}

}  // namespace approxreg
