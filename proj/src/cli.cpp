#include "approxreg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "approxreg/errors.hpp"
#include "approxreg/features.hpp"
#include "approxreg/graphs.hpp"
#include "approxreg/incomplete_beta.hpp"
#include "approxreg/io.hpp"
#include "approxreg/montecarlo.hpp"
#include "approxreg/report.hpp"
#include "approxreg/selection.hpp"
#include "approxreg/subset_state.hpp"

namespace approxreg::cli {

namespace {

struct Options {
  std::string input;
  std::size_t target = 0;  // 0: last column
  double p0 = 0.01;
  std::size_t kmn = 0;
  std::size_t mx = 21;
  std::size_t m = 1;
  std::vector<Index> kex;
  bool no_intercept = false;
  bool xinr = false;
  bool no_sub = false;
  bool standardize = false;
  std::size_t maxlag = 1;
  std::size_t order = 2;
  std::uint64_t seed = 1;
  std::size_t nsim = 1000;
  std::size_t threads = 1;
  std::string format = "table";
  std::string output;
  std::string residuals;
  std::string method = "f3st";
  std::string undirected_output;
  // trig
  std::size_t trig_n = 0;
  std::size_t trig_m = 0;
  // validate
  bool beta_law = false;
  bool lagged = false;
  std::size_t val_n = 50;
  std::size_t val_k = 5;
  // simulate
  std::string design = "planted";
  std::string selector = "f1st";
  double amplitude = 10.0;
  double sigma = 1.0;
  std::size_t planted = 6;
  std::size_t rows = 200;
  std::size_t cols = 1000;
  std::size_t block = 10;
  double rho = 0.5;
  std::vector<Index> subset;
  Index covariate = 0;
  double noise_sd = 0.185;
  std::size_t noise_cols = 979;
  std::string summary;
};

// Destination for results: the --output file when given, else `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback, bool binary = false) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
      if (!*file_) throw DataError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void add_selection_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--p0", o.p0, "Validity threshold for Gaussian P-values")->capture_default_str();
  cmd->add_option("--kmn", o.kmn, "Covariates accepted regardless of P-value")->capture_default_str();
  cmd->add_option("--mx", o.mx, "Largest greedy set refined by all-subset search")->capture_default_str();
  cmd->add_option("--kex", o.kex, "Excluded covariates (comma separated)")->delimiter(',');
  cmd->add_flag("--no-intercept", o.no_intercept, "Do not add an intercept");
  cmd->add_flag("--xinr", o.xinr, "The last covariate column is already an intercept");
  cmd->add_flag("--no-sub", o.no_sub, "Skip the all-subset refinement");
  cmd->add_flag("--standardize", o.standardize, "Standardize covariate columns first");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all)")->capture_default_str();
}

void add_format_options(CLI::App* cmd, Options& o, std::vector<std::string> formats) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  cmd->add_option("--output,-o", o.output, "Write results to this file");
}

SelectionConfig config_from(const Options& o) {
  SelectionConfig cfg;
  cfg.p0 = o.p0;
  cfg.kmn = o.kmn;
  cfg.mx = o.mx;
  cfg.m = o.m;
  cfg.kex = o.kex;
  cfg.xinr = o.xinr;
  cfg.inr = !o.no_intercept && !o.xinr;
  cfg.sub = !o.no_sub;
  cfg.threads = o.threads;
  return cfg;
}

// Splits a CSV into response (the target column, last by default) and
// covariates (the remaining columns in order).
DataMatrix load_regression(const Options& o) {
  const CsvTable table = read_csv(o.input);
  const auto width = static_cast<std::size_t>(table.values.cols());
  if (width < 2) throw DataError(o.input + ": need a response and at least one covariate column");
  const std::size_t target = o.target == 0 ? width : o.target;
  if (target > width) {
    throw UsageError("--target " + std::to_string(target) + " exceeds the " + std::to_string(width) +
                     " columns of " + o.input);
  }
  Eigen::MatrixXd x(table.values.rows(), static_cast<Eigen::Index>(width - 1));
  std::vector<std::string> names;
  for (std::size_t c = 0, out = 0; c < width; ++c) {
    if (c + 1 == target) continue;
    x.col(static_cast<Eigen::Index>(out++)) = table.values.col(static_cast<Eigen::Index>(c));
    if (!table.header.empty()) names.push_back(table.header[c]);
  }
  if (o.standardize) x = standardize_columns(x);
  return DataMatrix(table.values.col(static_cast<Eigen::Index>(target - 1)), std::move(x), std::move(names));
}

void write_residuals(const std::string& path, const DataMatrix& data, const Approximation& a) {
  std::vector<Index> cols;
  if (a.intercept) cols.push_back(kIntercept);
  cols.insert(cols.end(), a.indices.begin(), a.indices.end());
  const SubsetState fit = SubsetState::fit(data, cols);
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(data.n()), 3);
  m.col(0) = data.y();
  m.col(1) = data.y() - fit.residuals();
  m.col(2) = fit.residuals();
  write_csv(f, m, {"y", "fitted", "residual"});
}

int cmd_select(const Options& o, std::ostream& out) {
  const DataMatrix data = load_regression(o);
  const auto approx = f1st(data, config_from(o));
  Sink sink(o.output, out);
  if (!approx) {
    if (o.format == "json") {
      sink.get() << nlohmann::json{{"approximation", nullptr}}.dump(2) << '\n';
    } else {
      sink.get() << "no covariate selected\n";
    }
    return kExitOk;
  }
  if (o.format == "json") {
    sink.get() << nlohmann::json{{"approximation", to_json(*approx)}}.dump(2) << '\n';
  } else if (o.format == "csv") {
    write_approximation_csv(sink.get(), *approx);
  } else {
    write_approximation_table(sink.get(), *approx);
  }
  if (!o.residuals.empty()) write_residuals(o.residuals, data, *approx);
  return kExitOk;
}

int cmd_multiselect(const Options& o, std::ostream& out) {
  const DataMatrix data = load_regression(o);
  const SelectionConfig cfg = config_from(o);
  const auto list = o.method == "f2st" ? f2st(data, cfg) : f3st(data, cfg);
  Sink sink(o.output, out);
  if (o.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : list) arr.push_back(to_json(a));
    sink.get() << nlohmann::json{{"approximations", arr}}.dump(2) << '\n';
  } else if (o.format == "csv") {
    write_multiselect_csv(sink.get(), list);
  } else {
    write_multiselect_table(sink.get(), list);
  }
  if (!o.residuals.empty() && !list.empty()) write_residuals(o.residuals, data, list.front());
  return kExitOk;
}

int cmd_graph(const Options& o, std::ostream& out) {
  CsvTable table = read_csv(o.input);
  Eigen::MatrixXd x = o.standardize ? standardize_columns(table.values) : table.values;
  const DependencyGraph g = fgr1st(x, config_from(o));
  Sink sink(o.output, out);
  if (o.format == "json") {
    nlohmann::json directed = nlohmann::json::array();
    for (const auto& e : g.directed) directed.push_back({{"from", e.from}, {"to", e.to}, {"p_gauss", e.p_gauss}});
    nlohmann::json undirected = nlohmann::json::array();
    for (const auto& [a, b] : g.undirected) undirected.push_back({a, b});
    sink.get() << nlohmann::json{{"nodes", g.nodes}, {"directed", directed}, {"undirected", undirected}}.dump(2)
               << '\n';
  } else if (o.format == "csv") {
    write_directed_edges(sink.get(), g);
  } else {
    sink.get() << "nodes " << g.nodes << "  directed edges " << g.directed.size() << "  undirected edges "
               << g.undirected.size() << '\n';
    write_directed_edges(sink.get(), g);
  }
  if (!o.undirected_output.empty()) {
    std::ofstream f(o.undirected_output);
    if (!f) throw DataError("cannot write " + o.undirected_output);
    write_undirected_edges(f, g);
  }
  return kExitOk;
}

int cmd_lag(const Options& o, std::ostream& out) {
  const CsvTable table = read_csv(o.input);
  const std::size_t target = o.target == 0 ? 1 : o.target;
  const LagDesign d = flag(table.values, target, o.maxlag, false);
  Eigen::MatrixXd m(d.x.rows(), d.x.cols() + 1);
  m.col(0) = d.y;
  m.rightCols(d.x.cols()) = d.x;
  std::vector<std::string> header{"y"};
  for (std::size_t v = 1; v <= d.variables; ++v) {
    for (std::size_t l = 1; l <= d.max_lag; ++l) {
      header.push_back("v" + std::to_string(v) + "_lag" + std::to_string(l));
    }
  }
  Sink sink(o.output, out);
  write_csv(sink.get(), m, header);
  return kExitOk;
}

int cmd_interact(const Options& o, std::ostream& out) {
  const CsvTable table = read_csv(o.input);
  const auto width = static_cast<std::size_t>(table.values.cols());
  if (o.target > width) throw UsageError("--target exceeds the column count");
  Eigen::MatrixXd base(table.values.rows(), static_cast<Eigen::Index>(width - (o.target ? 1 : 0)));
  for (std::size_t c = 0, k = 0; c < width; ++c) {
    if (c + 1 != o.target) base.col(static_cast<Eigen::Index>(k++)) = table.values.col(static_cast<Eigen::Index>(c));
  }
  if (base.cols() == 0) throw DataError("no base covariates to combine");
  const InteractionIndex index(static_cast<std::size_t>(base.cols()), o.order);

  if (o.format == "binary") {
    if (o.output.empty()) throw UsageError("--format binary requires --output");
    ColumnBlockWriter writer(o.output, static_cast<std::size_t>(base.rows()));
    for_each_interaction(base, o.order, [&](std::size_t, const Eigen::VectorXd& v) { writer.append(v); });
    writer.close();
    std::ofstream decode(o.output + ".decode.csv");
    if (!decode) throw DataError("cannot write " + o.output + ".decode.csv");
    write_decode_table(decode, index);
    if (o.target) {
      std::ofstream yf(o.output + ".y.csv");
      write_csv(yf, table.values.col(static_cast<Eigen::Index>(o.target - 1)), {"y"});
    }
    return kExitOk;
  }

  // CSV: monomial columns, then the response last when a target is given.
  Sink sink(o.output, out);
  std::ostream& s = sink.get();
  std::vector<std::string> header;
  for (std::size_t c = 1; c <= index.columns(); ++c) header.push_back("m" + std::to_string(c));
  if (o.target) header.push_back("y");
  const InteractionDesign design = fgeninter(base, o.order);
  Eigen::MatrixXd m(design.x.rows(), design.x.cols() + (o.target ? 1 : 0));
  m.leftCols(design.x.cols()) = design.x;
  if (o.target) m.col(m.cols() - 1) = table.values.col(static_cast<Eigen::Index>(o.target - 1));
  write_csv(s, m, header);
  return kExitOk;
}

int cmd_trig(const Options& o, std::ostream& out) {
  if (o.trig_n < 1 || o.trig_m < 1) throw UsageError("trig needs --n and --m");
  Sink sink(o.output, out);
  write_csv(sink.get(), fgentrig(o.trig_n, o.trig_m));
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.beta_law) throw UsageError("validate: choose a check, e.g. --beta-law");
  SimulationSpec spec;
  spec.seed = o.seed;
  spec.nsim = o.nsim;
  spec.threads = o.threads;
  spec.design = o.lagged ? Design::LaggedSelf : Design::FixedMatrix;
  const BetaLawResult r = beta_law_check(o.val_n, o.val_k, spec);
  Sink sink(o.output, out);
  if (o.format == "json") {
    sink.get() << nlohmann::json{{"n", r.n}, {"k", r.k}, {"nsim", o.nsim}, {"lagged", o.lagged}, {"ks", to_json(r.ks)}}
                      .dump(2)
               << '\n';
  } else {
    char buf[200];
    std::snprintf(buf, sizeof buf, "beta law n=%zu k=%zu nsim=%zu design=%s: KS %.6f critical %.6f p %.4f %s\n",
                  r.n, r.k, o.nsim, o.lagged ? "lagged" : "fixed", r.ks.statistic, r.ks.critical_value,
                  r.ks.p_value, r.ks.passed ? "PASS" : "FAIL");
    sink.get() << buf;
  }
  if (!r.ks.passed) {
    err << "beta law check failed\n";
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SimulationSpec spec;
  spec.seed = o.seed;
  spec.nsim = o.nsim;
  spec.threads = o.threads;
  spec.amplitude = o.amplitude;
  spec.sigma = o.sigma;
  spec.planted = o.planted;
  const SelectionConfig cfg = config_from(o);
  Sink sink(o.output, out);

  if (o.design == "planted") {
    spec.design = Design::PlantedSignal;
    Eigen::MatrixXd x = o.input.empty() ? correlated_design(o.rows, o.cols, o.block, o.rho, o.seed)
                                        : standardize_columns(read_csv(o.input).values);
    const Selector sel = o.selector == "f3st" ? Selector::F3st : Selector::F1st;
    const RecoverySummary s = planted_recovery(spec, x, sel, cfg);
    for (const auto& r : s.records) sink.get() << to_json(r).dump() << '\n';
    if (!o.summary.empty()) {
      std::ofstream f(o.summary);
      if (!f) throw DataError("cannot write " + o.summary);
      f << "metric,value\n"
        << "replications," << spec.nsim << '\n'
        << "exact_recovery," << s.exact << '\n'
        << "exact_recovery_any," << s.exact_any << '\n'
        << "hit_rate," << s.hit_rate << '\n'
        << "mean_false_positives," << s.mean_false_positives << '\n'
        << "runs_with_false_positive," << s.runs_with_false_positive << '\n';
    }
    return kExitOk;
  }
  if (o.design == "simgpval") {
    if (o.subset.empty() || o.covariate == 0) throw UsageError("simgpval needs --subset and --covariate");
    const DataMatrix data = load_regression(o);
    const SimGpvalResult r = simgpval(data, o.subset, o.covariate, spec, !o.no_intercept);
    const KsResult ks = ks_test(r.replacement_pvalues, [](double p) { return std::clamp(p, 0.0, 1.0); });
    sink.get() << nlohmann::json{{"p_f", r.p_f},
                                 {"freq_better", r.freq_better},
                                 {"nsim", spec.nsim},
                                 {"uniformity", to_json(ks)}}
                      .dump(2)
               << '\n';
    return kExitOk;
  }
  if (o.design == "realistic") {
    spec.design = Design::RealisticHybrid;
    const DataMatrix data = load_regression(o);
    auto base = f3st(data, cfg);
    if (base.empty()) throw DataError("no valid approximation to build the simulation from");
    if (base.size() > 2) base.resize(2);
    const auto recs = realistic_sim(base, data, o.noise_sd, o.noise_cols, spec, cfg);
    for (const auto& r : recs) sink.get() << to_json(r).dump() << '\n';
    return kExitOk;
  }
  throw UsageError("unknown design " + o.design);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Valid least-squares approximations with Gaussian P-values", "approxreg"};
  app.require_subcommand(1);

  auto* select = app.add_subcommand("select", "Greedy selection of one valid approximation");
  select->add_option("input", o.input, "CSV file")->required();
  select->add_option("--target", o.target, "1-based response column (default: last)");
  select->add_option("--residuals", o.residuals, "Write y, fitted values and residuals to this CSV");
  add_selection_options(select, o);
  add_format_options(select, o, {"table", "csv", "json"});

  auto* multi = app.add_subcommand("multiselect", "Several valid approximations");
  multi->add_option("input", o.input, "CSV file")->required();
  multi->add_option("--target", o.target, "1-based response column (default: last)");
  multi->add_option("--m", o.m, "Depth of the exclusion tree")->capture_default_str();
  multi->add_option("--method", o.method, "f3st or f2st")->check(CLI::IsMember({"f3st", "f2st"}));
  multi->add_option("--residuals", o.residuals, "Residuals of the best approximation to this CSV");
  add_selection_options(multi, o);
  add_format_options(multi, o, {"table", "csv", "json"});

  auto* graph = app.add_subcommand("graph", "Covariate dependency graph");
  graph->add_option("input", o.input, "CSV file; every column is a node")->required();
  graph->add_option("--undirected-output", o.undirected_output, "Write undirected edges to this CSV");
  add_selection_options(graph, o);
  add_format_options(graph, o, {"table", "csv", "json"});

  auto* lag = app.add_subcommand("lag", "Autoregressive lag design");
  lag->add_option("input", o.input, "CSV series, one variable per column")->required();
  lag->add_option("--target", o.target, "1-based target variable (default 1)");
  lag->add_option("--maxlag", o.maxlag, "Largest lag")->required();
  lag->add_option("--output,-o", o.output, "Write the design to this file");

  auto* inter = app.add_subcommand("interact", "Monomial interaction design");
  inter->add_option("input", o.input, "CSV file")->required();
  inter->add_option("--target", o.target, "Response column kept out of the products and written last");
  inter->add_option("--order", o.order, "Largest total degree")->capture_default_str();
  add_format_options(inter, o, {"csv", "binary"});
  o.format = "table";

  auto* trig = app.add_subcommand("trig", "Sine and cosine basis");
  trig->add_option("--n", o.trig_n, "Rows")->required();
  trig->add_option("--m", o.trig_m, "Frequencies")->required();
  trig->add_option("--output,-o", o.output, "Write the basis to this file");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim->add_option("input", o.input, "Optional CSV (covariates, or data for simgpval/realistic)");
  sim->add_option("--design", o.design, "planted, simgpval or realistic")
      ->check(CLI::IsMember({"planted", "simgpval", "realistic"}));
  sim->add_option("--target", o.target, "1-based response column (default: last)");
  sim->add_option("--selector", o.selector, "f1st or f3st")->check(CLI::IsMember({"f1st", "f3st"}));
  sim->add_option("--amplitude", o.amplitude, "Signal amplitude")->capture_default_str();
  sim->add_option("--sigma", o.sigma, "Noise standard deviation")->capture_default_str();
  sim->add_option("--planted", o.planted, "Planted covariates")->capture_default_str();
  sim->add_option("--rows", o.rows, "Surrogate design rows")->capture_default_str();
  sim->add_option("--cols", o.cols, "Surrogate design columns")->capture_default_str();
  sim->add_option("--block", o.block, "Surrogate correlation block size")->capture_default_str();
  sim->add_option("--rho", o.rho, "Surrogate within-block correlation")->capture_default_str();
  sim->add_option("--subset", o.subset, "simgpval subset (comma separated)")->delimiter(',');
  sim->add_option("--covariate", o.covariate, "simgpval covariate to replace");
  sim->add_option("--noise-sd", o.noise_sd, "realistic: noise standard deviation")->capture_default_str();
  sim->add_option("--noise-cols", o.noise_cols, "realistic: pure noise columns")->capture_default_str();
  sim->add_option("--m", o.m, "f3st depth")->capture_default_str();
  sim->add_option("--seed", o.seed, "Seed")->capture_default_str();
  sim->add_option("--nsim", o.nsim, "Replications")->capture_default_str();
  sim->add_option("--summary", o.summary, "Summary CSV path");
  add_selection_options(sim, o);
  sim->add_option("--output,-o", o.output, "JSON records to this file");

  auto* val = app.add_subcommand("validate", "Empirical checks of the P-value theory");
  val->add_flag("--beta-law", o.beta_law, "RSS ratio of a Gaussian replacement against its Beta law");
  val->add_flag("--lagged", o.lagged, "Use lags of an autoregressive series as covariates");
  val->add_option("--n", o.val_n, "Observations")->capture_default_str();
  val->add_option("--k", o.val_k, "Columns in the subset")->capture_default_str();
  val->add_option("--nsim", o.nsim, "Replications")->capture_default_str();
  val->add_option("--seed", o.seed, "Seed")->capture_default_str();
  val->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  add_format_options(val, o, {"table", "json"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  }
  if (inter->parsed() && o.format == "table") o.format = "csv";

  try {
    if (select->parsed()) return cmd_select(o, out);
    if (multi->parsed()) return cmd_multiselect(o, out);
    if (graph->parsed()) return cmd_graph(o, out);
    if (lag->parsed()) return cmd_lag(o, out);
    if (inter->parsed()) return cmd_interact(o, out);
    if (trig->parsed()) return cmd_trig(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (val->parsed()) return cmd_validate(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace approxreg::cli
