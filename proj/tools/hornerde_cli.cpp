// hornerde: train Horner-network and baseline DE solvers, run the benchmark
// table, and check parameter gradients.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hornerde/errors.hpp"
#include "hornerde/runner.hpp"

namespace fs = std::filesystem;
using namespace hornerde;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

constexpr const char* kOutputDirEnv = "HORNERDE_OUTPUT_DIR";

// Shortest decimal form that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw SystemError("cannot open " + path.string() + " for writing");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << fmt(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw SystemError("cannot open " + path.string() + " for writing");
  out << std::setw(2) << j << '\n';
}

fs::path prepare_dir(std::string dir) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') dir = env;
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct SolveArgs {
  std::string problem = "typeA";
  std::string model = "horner";
  std::optional<int> collocation;
  std::string gradient_mode = "analytic";
  std::string param_basis = "orthonormal";
  std::optional<double> init_std;
  std::optional<double> lambda0;
  std::optional<double> mu;
  std::optional<double> nu;
  std::string ic_mode = "hard";
  std::string penalty = "absolute";
  std::string out_dir = "hornerde_out";
  std::string report;
  std::string trace;
  std::string history;
};

void add_solve_options(CLI::App& app, SolveArgs& a, SolveConfig& c) {
  app.add_option("--problem", a.problem, "typeA | typeB | typeC | matched | heat")->capture_default_str();
  app.add_option("--model", a.model,
                 "horner | piecewise | polyreg | mlp-sigmoid | mlp-lrelu | siren | horner2d")
      ->capture_default_str();
  app.add_option("--trainable", c.trainable, "Horner trainable coefficients (default 10, 13 for typeC)");
  app.add_option("--degree", c.degree, "polyreg polynomial degree")->capture_default_str();
  app.add_option("--collocation", a.collocation, "collocation points (default 200; baselines 400; polyreg 10000)");
  app.add_option("--epochs", c.train.epochs)->capture_default_str();
  app.add_option("--lr", c.train.learning_rate, "Adam learning rate")->capture_default_str();
  app.add_option("--seed", c.train.seed)->capture_default_str();
  app.add_flag("--lr-decay", c.train.lr_decay, "lr * decay_rate^(epoch / decay_steps)");
  app.add_option("--decay-rate", c.train.decay_rate)->capture_default_str();
  app.add_option("--decay-steps", c.train.decay_steps)->capture_default_str();
  app.add_option("--gradient-mode", a.gradient_mode, "analytic | fd-check")->capture_default_str();
  app.add_option("--init-std", a.init_std, "std of the normal parameter init");
  app.add_option("--param-basis", a.param_basis, "orthonormal | monomial")->capture_default_str();
  app.add_option("--eval-points", c.eval_points, "RMSE grid size")->capture_default_str();
  app.add_option("--trace-points", c.trace_points, "trace CSV rows (ODE runs)")->capture_default_str();

  app.add_option("--knots", c.piecewise.knots, "piecewise knots")->delimiter(',');
  app.add_option("--segment-params", c.piecewise.segment_params)->capture_default_str();
  app.add_option("--ic-mode", a.ic_mode, "hard | soft")->capture_default_str();
  app.add_option("--penalty", a.penalty, "piecewise penalty norm: absolute | squared")->capture_default_str();
  app.add_option("--lambda0", a.lambda0, "IC penalty weight (piecewise 1, baselines 0.1)");
  app.add_option("--mu", a.mu, "value-continuity (piecewise 0.5) or left-boundary (heat 0.25) weight");
  app.add_option("--nu", a.nu, "slope-continuity (piecewise 0.5) or right-boundary (heat 0.25) weight");

  app.add_option("--widths", c.widths, "hidden widths (default 5,5,5,5; lrelu 5 x 64)")->delimiter(',');
  app.add_flag("--full-width", c.full_width, "lrelu at 5 x 256 (263937 parameters)");
  app.add_option("--omega0", c.omega0, "SIREN frequency")->capture_default_str();
  app.add_flag("--normalize-input", c.normalize_input, "map the interval onto [-1, 1] before layer 1");

  app.add_option("--order", c.order2d, "Horner2D order")->capture_default_str();
  app.add_option("--m1", c.clouds.interior)->capture_default_str();
  app.add_option("--m2", c.clouds.initial)->capture_default_str();
  app.add_option("--m3", c.clouds.left)->capture_default_str();
  app.add_option("--m4", c.clouds.right)->capture_default_str();
  app.add_option("--lambda", c.heat_weights.lambda, "heat initial-profile weight")->capture_default_str();
  app.add_option("--t-max", c.t_max)->capture_default_str();
  app.add_option("--grid-points", c.grid_points, "heat output grid per axis")->capture_default_str();

  app.add_option("--out-dir", a.out_dir, "output directory (overridden by $HORNERDE_OUTPUT_DIR)")
      ->capture_default_str();
  app.add_option("--report", a.report, "report JSON path (default <out-dir>/report.json)");
  app.add_option("--trace", a.trace, "trace CSV path (default <out-dir>/trace.csv)");
  app.add_option("--history", a.history, "loss history CSV path (default <out-dir>/history.csv)");
}

void finalize(SolveArgs& a, SolveConfig& c) {
  c.problem = parse_problem_kind(a.problem);
  c.model = parse_model_kind(a.model);
  if (a.collocation) {
    c.train.collocation_count = *a.collocation;
    c.collocation_set = true;
  }
  if (a.gradient_mode == "analytic") {
    c.train.gradient_mode = GradientMode::analytic;
  } else if (a.gradient_mode == "fd-check") {
    c.train.gradient_mode = GradientMode::finite_difference_check;
  } else {
    throw ConfigError("unknown gradient mode '" + a.gradient_mode + "'");
  }
  if (a.param_basis == "orthonormal") {
    c.init.basis = ParamBasis::orthonormal;
  } else if (a.param_basis == "monomial") {
    c.init.basis = ParamBasis::monomial;
  } else {
    throw ConfigError("unknown parameter basis '" + a.param_basis + "'");
  }
  if (a.init_std) c.init.stddev = *a.init_std;
  if (a.ic_mode != "hard" && a.ic_mode != "soft") throw ConfigError("ic-mode must be hard or soft");
  c.piecewise.ic_mode = a.ic_mode == "hard" ? IcMode::hard : IcMode::soft;
  if (a.penalty != "absolute" && a.penalty != "squared") {
    throw ConfigError("penalty must be absolute or squared");
  }
  c.piecewise.norm = a.penalty == "absolute" ? PenaltyNorm::absolute : PenaltyNorm::squared;
  if (a.lambda0) {
    c.piecewise.lambda0 = *a.lambda0;
    c.lambda0 = *a.lambda0;
  }
  if (a.mu) {
    c.piecewise.mu = *a.mu;
    c.heat_weights.mu = *a.mu;
  }
  if (a.nu) {
    c.piecewise.nu = *a.nu;
    c.heat_weights.nu = *a.nu;
  }
  c.resolve();
}

int run_solve_command(SolveArgs& a, SolveConfig& c) {
  finalize(a, c);
  const fs::path dir = prepare_dir(a.out_dir);
  const fs::path report_path = a.report.empty() ? dir / "report.json" : fs::path(a.report);
  const fs::path trace_path = a.trace.empty() ? dir / "trace.csv" : fs::path(a.trace);
  const fs::path history_path = a.history.empty() ? dir / "history.csv" : fs::path(a.history);

  const RunReport r = run_solve(c);

  write_json(report_path, to_json(r));
  {
    CsvWriter h(history_path, {"epoch", "loss"});
    for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
      h.row({static_cast<double>(e), r.loss_history[e]});
    }
  }
  if (c.problem == ProblemKind::heat) {
    CsvWriter t(trace_path, {"x", "t", "pred", "exact", "abs_error"});
    for (const auto& g : r.heat_grid) t.row({g.x, g.t, g.pred, g.exact, std::abs(g.pred - g.exact)});
    std::cout << "problem=heat model=horner2d params=" << r.param_count << " rmse_grid=" << r.rmse[0]
              << " final_loss=" << r.final_loss << " time=" << r.wall_time_seconds << "s\n";
  } else {
    CsvWriter t(trace_path, {"t", "pred", "exact", "pred_d1", "exact_d1", "pred_d2", "exact_d2"});
    for (const auto& row : r.trace) {
      t.row({row.t, row.pred[0], row.exact[0], row.pred[1], row.exact[1], row.pred[2], row.exact[2]});
    }
    std::cout << "problem=" << to_string(c.problem) << " model=" << to_string(c.model)
              << " params=" << r.param_count << " rmse=" << r.rmse[0] << " rmse_d1=" << r.rmse[1]
              << " rmse_d2=" << r.rmse[2] << " final_loss=" << r.final_loss
              << " time=" << r.wall_time_seconds << "s\n";
  }
  const bool finite = std::isfinite(r.rmse[0]) && std::isfinite(r.rmse[1]) && std::isfinite(r.rmse[2]);
  return finite ? kExitOk : kExitRunFailure;
}

struct BenchArgs {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  long epochs = 10000;
  bool full_width = false;
  bool no_piecewise = false;
  std::vector<std::string> problems;
  std::vector<std::string> models;
  std::string out_dir = "hornerde_out";
};

int run_bench_command(const BenchArgs& a) {
  BenchOptions opt;
  opt.seeds = a.seeds;
  opt.epochs = a.epochs;
  opt.full_width = a.full_width;
  opt.include_piecewise = !a.no_piecewise;
  if (!a.problems.empty()) {
    opt.problems.clear();
    for (const auto& p : a.problems) {
      const auto k = parse_problem_kind(p);
      if (k == ProblemKind::heat || k == ProblemKind::matched) {
        throw ConfigError("bench covers typeA, typeB and typeC only");
      }
      opt.problems.push_back(k);
    }
  }
  if (!a.models.empty()) {
    opt.models.clear();
    for (const auto& m : a.models) {
      const auto k = parse_model_kind(m);
      if (k != ModelKind::horner && k != ModelKind::mlp_sigmoid && k != ModelKind::mlp_lrelu &&
          k != ModelKind::siren) {
        throw ConfigError("bench models: mlp-lrelu, mlp-sigmoid, siren, horner");
      }
      opt.models.push_back(k);
    }
  }
  if (opt.seeds.empty()) throw ConfigError("need at least one seed");
  if (opt.epochs < 0) throw ConfigError("epochs must be non-negative");
  const fs::path dir = prepare_dir(a.out_dir);

  const BenchTable t = run_bench(opt);

  std::vector<std::string> header{"problem", "derivative"};
  for (auto m : t.models) header.emplace_back(to_string(m));
  CsvWriter csv(dir / "bench.csv", header);
  bool ok = true;
  std::cout << std::left << std::setw(8) << "problem" << std::setw(6) << "deriv";
  for (auto m : t.models) std::cout << std::setw(14) << to_string(m);
  std::cout << '\n';
  auto cell_text = [](double v) { return std::isfinite(v) ? fmt(v) : std::string("nan"); };
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (std::size_t d = 0; d < 3; ++d) {
      std::vector<std::string> row{std::string(to_string(t.problems[p])), std::to_string(d)};
      std::cout << std::setw(8) << to_string(t.problems[p]) << std::setw(6) << d;
      for (std::size_t m = 0; m < t.models.size(); ++m) {
        const double v = t.cells[p][m].median_rmse[d];
        row.push_back(cell_text(v));
        std::ostringstream s;
        s << std::setprecision(2) << std::scientific << v;
        std::cout << std::setw(14) << s.str();
        ok = ok && std::isfinite(v) && t.cells[p][m].error.empty();
      }
      std::cout << '\n';
      csv.row(row);
    }
  }
  if (t.piecewise_row) {
    const auto& c = *t.piecewise_row;
    std::cout << "piecewise typeA: rmse=" << c.median_rmse[0] << " rmse_d1=" << c.median_rmse[1]
              << " rmse_d2=" << c.median_rmse[2] << '\n';
    ok = ok && c.error.empty() && std::isfinite(c.median_rmse[0]);
    CsvWriter pcsv(dir / "bench_piecewise.csv", {"problem", "derivative", "piecewise"});
    for (std::size_t d = 0; d < 3; ++d) pcsv.row({"typeA", std::to_string(d), cell_text(c.median_rmse[d])});
  }
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (std::size_t m = 0; m < t.models.size(); ++m) {
      if (!t.cells[p][m].error.empty()) {
        std::cerr << "cell " << to_string(t.problems[p]) << "/" << to_string(t.models[m])
                  << " failed: " << t.cells[p][m].error << '\n';
      }
    }
  }
  write_json(dir / "bench.json", to_json(t));
  return ok ? kExitOk : kExitRunFailure;
}

int run_gradcheck_command(std::uint64_t seed, double corruption) {
  const auto results = run_gradcheck(seed, corruption);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << std::left << std::setw(26) << r.family << " params=" << std::setw(6) << r.param_count
              << " rel_error=" << std::scientific << std::setprecision(3) << r.relative_error
              << (r.passed ? "  ok" : "  FAIL") << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "gradcheck passed" : "gradcheck failed") << " (" << results.size()
            << " families, tolerance " << kGradientTolerance << ")\n";
  return ok ? kExitOk : kExitRunFailure;
}

// Flat key=value file named after the long flags of the chosen subcommand.
// Keys outside a section are routed to that subcommand.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    if (subcommand_.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents = {subcommand_};
    }
    return items;
  }

 private:
  std::string subcommand_;
};

std::string find_subcommand(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "solve" || a == "bench" || a == "gradcheck") return std::string(a);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horner-network differential equation solvers and baselines"};
  app.set_config("--config", "", "flat key=value config file; command-line flags take precedence");
  app.config_formatter(std::make_shared<FlatConfig>(find_subcommand(argc, argv)));
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  SolveArgs solve_args;
  SolveConfig solve_config;
  auto* solve = app.add_subcommand("solve", "train or fit one model on one problem");
  add_solve_options(*solve, solve_args, solve_config);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "median-of-seeds RMSE table for all baselines");
  bench->add_option("--seeds", bench_args.seeds)->delimiter(',')->capture_default_str();
  bench->add_option("--epochs", bench_args.epochs)->capture_default_str();
  bench->add_flag("--full-width", bench_args.full_width, "lrelu at 5 x 256");
  bench->add_flag("--no-piecewise", bench_args.no_piecewise, "skip the spline-like Type A row");
  bench->add_option("--problems", bench_args.problems)->delimiter(',');
  bench->add_option("--models", bench_args.models)->delimiter(',');
  bench->add_option("--out-dir", bench_args.out_dir)->capture_default_str();

  std::uint64_t gc_seed = 11;
  double gc_corruption = 0.0;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every model family");
  gradcheck->add_option("--seed", gc_seed)->capture_default_str();
  gradcheck->add_option("--corrupt-gradient", gc_corruption,
                        "test hook: perturb the analytic gradient by this relative amount");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (solve->parsed()) return run_solve_command(solve_args, solve_config);
    if (bench->parsed()) return run_bench_command(bench_args);
    return run_gradcheck_command(gc_seed, gc_corruption);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const TrainingError& e) {
    std::cerr << "training failed at epoch " << e.epoch() << ": " << e.what() << '\n';
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
}
