#include "hornerde/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hornerde/errors.hpp"
#include "hornerde/polyreg.hpp"

namespace hornerde {
namespace {

bool is_baseline(ModelKind m) {
  return m == ModelKind::mlp_sigmoid || m == ModelKind::mlp_lrelu || m == ModelKind::siren;
}

BaselineKind baseline_kind(ModelKind m) {
  switch (m) {
    case ModelKind::mlp_sigmoid: return BaselineKind::mlp_sigmoid;
    case ModelKind::mlp_lrelu: return BaselineKind::mlp_lrelu;
    default: return BaselineKind::siren;
  }
}

std::string_view to_string(ParamBasis b) {
  return b == ParamBasis::orthonormal ? "orthonormal" : "monomial";
}

std::vector<TraceRow> make_trace(const JetFunction& model, const OdeProblem& problem, int points) {
  std::vector<TraceRow> rows;
  if (points < 2) return rows;
  rows.reserve(static_cast<std::size_t>(points));
  const Interval iv = problem.interval;
  for (int k = 0; k < points; ++k) {
    const double t = iv.start + iv.length() * k / (points - 1);
    const Jet p = model(t, 2);
    const Jet e = exact_solution(problem.kind, t, 2);
    rows.push_back({t, {p[0], p[1], p[2]}, {e[0], e[1], e[2]}});
  }
  return rows;
}

void fill_ode_metrics(RunReport& report, const JetFunction& model, const OdeProblem& problem,
                      const BatchJetFunction& batch = {}) {
  const BatchJetFunction eval = batch ? batch : BatchJetFunction([&model](std::span<const double> ts) {
    std::vector<Jet> jets;
    jets.reserve(ts.size());
    for (double t : ts) jets.push_back(model(t, 2));
    return jets;
  });
  report.rmse = rmse_all(eval, problem, report.config.eval_points);
  for (double v : report.rmse) {
    if (!std::isfinite(v)) throw TrainingError("non-finite RMSE", report.config.train.epochs);
  }
  report.trace = make_trace(model, problem, report.config.trace_points);
}

void apply_train(RunReport& report, const Objective& objective, std::vector<double> initial) {
  TrainResult tr = train(objective, std::move(initial), report.config.train);
  report.loss_history = std::move(tr.loss_history);
  report.final_loss = tr.final_loss;
  report.param_count = objective.param_count();
  report.model_serialization = std::move(tr.params);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::horner: return "horner";
    case ModelKind::piecewise: return "piecewise";
    case ModelKind::polyreg: return "polyreg";
    case ModelKind::mlp_sigmoid: return "mlp-sigmoid";
    case ModelKind::mlp_lrelu: return "mlp-lrelu";
    case ModelKind::siren: return "siren";
    case ModelKind::horner2d: return "horner2d";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::horner, ModelKind::piecewise, ModelKind::polyreg,
                 ModelKind::mlp_sigmoid, ModelKind::mlp_lrelu, ModelKind::siren,
                 ModelKind::horner2d}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

void SolveConfig::resolve() {
  const bool heat = problem == ProblemKind::heat;
  if (heat != (model == ModelKind::horner2d)) {
    throw UnsupportedProblem("model " + std::string(to_string(model)) +
                             " does not support problem " + std::string(to_string(problem)));
  }
  if (model == ModelKind::polyreg && problem == ProblemKind::type_b) {
    throw UnsupportedProblem("polyreg handles linear problems only; typeB is nonlinear");
  }
  if (trainable == 0) trainable = problem == ProblemKind::type_c ? 13 : 10;
  if (widths.empty() && is_baseline(model)) {
    if (model == ModelKind::mlp_lrelu) {
      widths.assign(5, full_width ? kLreluFullWidth : kLreluStandInWidth);
    } else {
      widths.assign(4, 5);
    }
  }
  if (!collocation_set) {
    train.collocation_count = model == ModelKind::polyreg ? 10000 : is_baseline(model) ? 400 : 200;
    collocation_set = true;
  }
  if (trainable < 1) throw ConfigError("trainable must be >= 1");
  if (eval_points < 2) throw ConfigError("eval-points must be >= 2");
  if (order2d < 0) throw ConfigError("order must be >= 0");
  if (!(t_max > 0.0)) throw ConfigError("t-max must be positive");
  if (!(init.stddev >= 0.0)) throw ConfigError("init-std must be non-negative");
  train.validate();
}

nlohmann::json to_json(const SolveConfig& c) {
  nlohmann::json j;
  j["problem"] = std::string(to_string(c.problem));
  j["model"] = std::string(to_string(c.model));
  j["epochs"] = c.train.epochs;
  j["learning_rate"] = c.train.learning_rate;
  j["collocation"] = c.train.collocation_count;
  j["seed"] = c.train.seed;
  j["gradient_mode"] =
      c.train.gradient_mode == GradientMode::analytic ? "analytic" : "finite-difference-check";
  j["lr_decay"] = c.train.lr_decay;
  j["decay_rate"] = c.train.decay_rate;
  j["decay_steps"] = c.train.decay_steps;
  j["eval_points"] = c.eval_points;
  j["trace_points"] = c.trace_points;
  switch (c.model) {
    case ModelKind::horner:
      j["trainable"] = c.trainable;
      j["init_std"] = c.init.stddev;
      j["param_basis"] = std::string(to_string(c.init.basis));
      break;
    case ModelKind::polyreg:
      j["degree"] = c.degree;
      break;
    case ModelKind::piecewise:
      j["knots"] = c.piecewise.knots;
      j["segment_params"] = c.piecewise.segment_params;
      j["ic_mode"] = c.piecewise.ic_mode == IcMode::hard ? "hard" : "soft";
      j["lambda0"] = c.piecewise.lambda0;
      j["mu"] = c.piecewise.mu;
      j["nu"] = c.piecewise.nu;
      j["penalty"] = c.piecewise.norm == PenaltyNorm::absolute ? "absolute" : "squared";
      j["init_std"] = c.init.stddev;
      j["param_basis"] = std::string(to_string(c.init.basis));
      break;
    case ModelKind::horner2d:
      j["order"] = c.order2d;
      j["m1"] = c.clouds.interior;
      j["m2"] = c.clouds.initial;
      j["m3"] = c.clouds.left;
      j["m4"] = c.clouds.right;
      j["lambda"] = c.heat_weights.lambda;
      j["mu"] = c.heat_weights.mu;
      j["nu"] = c.heat_weights.nu;
      j["t_max"] = c.t_max;
      j["grid_points"] = c.grid_points;
      j["init_std"] = c.init.stddev;
      j["param_basis"] = std::string(to_string(c.init.basis));
      break;
    default:
      j["widths"] = c.widths;
      j["full_width"] = c.full_width;
      j["lambda0"] = c.lambda0;
      if (c.model == ModelKind::siren) {
        j["omega0"] = c.omega0;
      }
      j["normalize_input"] = c.normalize_input;
      break;
  }
  return j;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  if (r.config.problem == ProblemKind::heat) {
    j["rmse_grid"] = r.rmse[0];
  } else {
    j["rmse_solution"] = r.rmse[0];
    j["rmse_d1"] = r.rmse[1];
    j["rmse_d2"] = r.rmse[2];
  }
  j["final_loss"] = r.final_loss;
  j["param_count"] = r.param_count;
  j["wall_time_seconds"] = r.wall_time_seconds;
  j["model"] = r.model_serialization;
  if (r.knot_jumps) {
    j["knot_value_jumps"] = r.knot_jumps->value;
    j["knot_slope_jumps"] = r.knot_jumps->slope;
  }
  return j;
}

RunReport run_solve(SolveConfig config) {
  config.resolve();
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  const TrainConfig& tc = config.train;

  if (config.model == ModelKind::horner2d) {
    const HeatProblem heat = make_heat_benchmark(config.t_max);
    Horner2D model = new_horner2d(config.order2d, heat.length, config.init, tc.seed);
    PointClouds clouds = sample_clouds(heat, config.clouds, tc.seed + 1);
    const HeatObjective objective(model, heat, std::move(clouds), config.heat_weights);
    TrainResult tr = train(objective, model.get_params(), tc);
    model.set_params(tr.params);
    report.loss_history = std::move(tr.loss_history);
    report.final_loss = tr.final_loss;
    report.param_count = model.param_count();
    for (const auto& p : model.inner_polys()) {
      report.model_serialization.insert(report.model_serialization.end(), p.coeffs().begin(),
                                        p.coeffs().end());
    }
    report.heat_grid = heat_grid(model, heat, config.grid_points);
    report.rmse[0] = heat_grid_rmse(report.heat_grid);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  }

  const OdeProblem problem = make_ode_benchmark(config.problem);
  // Collocation samples use a stream distinct from the model initialization.
  const std::vector<double> points =
      sample_collocation(problem.interval, tc.collocation_count, tc.seed + 1);

  switch (config.model) {
    case ModelKind::horner: {
      HornerModel model = new_horner(problem, config.trainable, config.init, tc.seed);
      const HornerResidualObjective objective(model, problem, points);
      apply_train(report, objective, get_params(model));
      model.set_params(report.model_serialization);
      report.model_serialization = model.serialize();
      fill_ode_metrics(report, [&model](double t, int k) { return model.eval_jet(t, k); }, problem);
      break;
    }
    case ModelKind::piecewise: {
      PiecewiseModel model = new_piecewise(problem, config.piecewise, config.init, tc.seed);
      const PiecewiseObjective objective(model, problem, points);
      apply_train(report, objective, model.get_params());
      model.set_params(report.model_serialization);
      report.model_serialization.clear();
      for (const auto& s : model.segments()) {
        const auto ser = s.serialize();
        report.model_serialization.insert(report.model_serialization.end(), ser.begin(), ser.end());
      }
      report.knot_jumps = knot_jumps(model);
      fill_ode_metrics(report, [&model](double t, int k) { return model.eval_jet(t, k); }, problem);
      break;
    }
    case ModelKind::polyreg: {
      const auto p = polyreg::fit(problem, config.degree, points);
      const JetFunction fn = [&p](double t, int k) { return polyreg::eval_factorial_poly(p, t, k); };
      report.final_loss = residual_loss(fn, problem, points);
      report.param_count = static_cast<std::size_t>(p.degree() + 1 - problem.order);
      report.model_serialization = p.coeffs;
      fill_ode_metrics(report, fn, problem);
      break;
    }
    default: {
      BaselineOptions opts;
      opts.omega0 = config.omega0;
      opts.normalize_input = config.normalize_input;
      opts.interval = problem.interval;
      MlpModel model = make_baseline(baseline_kind(config.model), config.widths, tc.seed, opts);
      const std::vector<double> lambdas(static_cast<std::size_t>(problem.order), config.lambda0);
      const BaselineObjective objective(model, problem, points, lambdas);
      apply_train(report, objective, model.params);
      model.params = report.model_serialization;
      fill_ode_metrics(
          report, [&model](double t, int k) { return mlp_eval_jet(model, t, k); }, problem,
          [&model](std::span<const double> ts) { return mlp_eval_jet_batch(model, ts, 2); });
      break;
    }
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SolveConfig bench_config(ProblemKind problem, ModelKind model, std::uint64_t seed, long epochs,
                         bool full_width) {
  SolveConfig c;
  c.problem = problem;
  c.model = model;
  c.train.seed = seed;
  c.train.epochs = epochs;
  c.full_width = full_width;
  c.trace_points = 0;
  if (model == ModelKind::siren) {
    // The omega0 = 30 scheme diverges or stalls on these intervals; see README.
    c.omega0 = 3.0;
    c.normalize_input = true;
  }
  return c;
}

SolveConfig piecewise_bench_config(std::uint64_t seed, long epochs) {
  SolveConfig c;
  c.problem = ProblemKind::type_a;
  c.model = ModelKind::piecewise;
  c.train.seed = seed;
  c.train.epochs = epochs;
  c.train.lr_decay = true;
  c.train.decay_rate = 0.01;
  c.train.decay_steps = epochs;
  c.piecewise.norm = PenaltyNorm::squared;
  c.init.stddev = 1e-3;
  c.trace_points = 0;
  return c;
}

namespace {

BenchCell run_cell(const std::vector<SolveConfig>& configs) {
  BenchCell cell;
  std::array<std::vector<double>, 3> cols;
  for (const auto& c : configs) {
    try {
      const RunReport r = run_solve(c);
      cell.per_seed.push_back(r.rmse);
      for (std::size_t j = 0; j < 3; ++j) cols[j].push_back(r.rmse[j]);
    } catch (const std::exception& e) {
      if (!cell.error.empty()) cell.error += "; ";
      cell.error += "seed " + std::to_string(c.train.seed) + ": " + e.what();
    }
  }
  for (std::size_t j = 0; j < 3; ++j) cell.median_rmse[j] = median(cols[j]);
  return cell;
}

nlohmann::json cell_json(const BenchCell& cell) {
  nlohmann::json j;
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["median"] = {num(cell.median_rmse[0]), num(cell.median_rmse[1]), num(cell.median_rmse[2])};
  j["per_seed"] = nlohmann::json::array();
  for (const auto& s : cell.per_seed) j["per_seed"].push_back({s[0], s[1], s[2]});
  if (!cell.error.empty()) j["error"] = cell.error;
  return j;
}

}  // namespace

BenchTable run_bench(const BenchOptions& options) {
  BenchTable table;
  table.problems = options.problems;
  table.models = options.models;
  table.seeds = options.seeds;
  table.epochs = options.epochs;
  table.full_width = options.full_width;
  for (auto p : options.problems) {
    std::vector<BenchCell> row;
    for (auto m : options.models) {
      std::vector<SolveConfig> configs;
      for (auto s : options.seeds) configs.push_back(bench_config(p, m, s, options.epochs, options.full_width));
      row.push_back(run_cell(configs));
    }
    table.cells.push_back(std::move(row));
  }
  if (options.include_piecewise) {
    std::vector<SolveConfig> configs;
    for (auto s : options.seeds) configs.push_back(piecewise_bench_config(s, options.epochs));
    table.piecewise_config = configs.front();
    table.piecewise_config.resolve();
    table.piecewise_row = run_cell(configs);
  }
  return table;
}

nlohmann::json to_json(const BenchTable& t) {
  nlohmann::json j;
  j["seeds"] = t.seeds;
  j["statistic"] = "median";
  j["rows"] = nlohmann::json::array();
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (int d = 0; d < 3; ++d) {
      nlohmann::json row;
      row["problem"] = std::string(to_string(t.problems[p]));
      row["derivative"] = d;
      for (std::size_t m = 0; m < t.models.size(); ++m) {
        const double v = t.cells[p][m].median_rmse[static_cast<std::size_t>(d)];
        row[std::string(to_string(t.models[m]))] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
      }
      j["rows"].push_back(row);
    }
  }
  j["cells"] = nlohmann::json::array();
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (std::size_t m = 0; m < t.models.size(); ++m) {
      nlohmann::json c = cell_json(t.cells[p][m]);
      c["problem"] = std::string(to_string(t.problems[p]));
      c["model"] = std::string(to_string(t.models[m]));
      SolveConfig cfg = bench_config(t.problems[p], t.models[m], t.seeds.front(), t.epochs, t.full_width);
      cfg.resolve();
      c["config"] = to_json(cfg);
      c["config"].erase("seed");
      j["cells"].push_back(c);
    }
  }
  if (t.piecewise_row) {
    j["piecewise"] = cell_json(*t.piecewise_row);
    j["piecewise"]["config"] = to_json(t.piecewise_config);
  }
  return j;
}

}  // namespace hornerde

namespace hornerde {
namespace {

// Forwards to another objective, optionally corrupting the gradient.
class CorruptedObjective final : public Objective {
 public:
  CorruptedObjective(const Objective& inner, double corruption)
      : inner_(inner), corruption_(corruption) {}
  std::size_t param_count() const override { return inner_.param_count(); }
  double value(std::span<const double> params) const override { return inner_.value(params); }
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const override {
    const double v = inner_.value_and_gradient(params, grad);
    if (corruption_ != 0.0 && !grad.empty()) {
      // Shift one component by corruption * ||grad||, so the relative error is about |corruption|.
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      grad[0] += corruption_ * std::max(std::sqrt(norm), 1e-12);
    }
    return v;
  }

 private:
  const Objective& inner_;
  double corruption_;
};

GradcheckResult check_family(std::string family, const Objective& objective,
                             std::span<const double> params, double corruption) {
  const CorruptedObjective wrapped(objective, corruption);
  const auto g = loss_gradient(wrapped, params);
  const auto fd = finite_difference_gradient(objective, params);
  GradcheckResult r;
  r.family = std::move(family);
  r.param_count = objective.param_count();
  r.relative_error = gradient_relative_error(g, fd);
  r.passed = r.relative_error <= kGradientTolerance;
  return r;
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck(std::uint64_t seed, double corruption) {
  std::vector<GradcheckResult> out;
  const InitSpec init;
  const OdeProblem a = make_ode_benchmark(ProblemKind::type_a);
  const OdeProblem b = make_ode_benchmark(ProblemKind::type_b);
  const OdeProblem c = make_ode_benchmark(ProblemKind::type_c);
  const auto pts_a = sample_collocation(a.interval, 50, seed + 1);
  const auto pts_b = sample_collocation(b.interval, 50, seed + 2);
  const auto pts_c = sample_collocation(c.interval, 50, seed + 3);

  {
    const HornerModel m = new_horner(a, 10, init, seed);
    out.push_back(check_family("horner/typeA", HornerResidualObjective(m, a, pts_a),
                               get_params(m), corruption));
  }
  {
    // Monomial coordinates: in the orthonormal ones the degree-14 coefficients
    // cancel so strongly that a 1e-6 central difference is noise-limited.
    const HornerModel m = new_horner(c, 13, InitSpec{init.stddev, ParamBasis::monomial}, seed);
    out.push_back(check_family("horner/typeC-monomial", HornerResidualObjective(m, c, pts_c),
                               get_params(m), corruption));
  }
  {
    const PiecewiseModel m = new_piecewise(a, PiecewiseSpec{}, init, seed);
    out.push_back(check_family("piecewise/hard-absolute", PiecewiseObjective(m, a, pts_a),
                               m.get_params(), corruption));
  }
  {
    PiecewiseSpec spec;
    spec.ic_mode = IcMode::soft;
    spec.norm = PenaltyNorm::squared;
    const PiecewiseModel m = new_piecewise(a, spec, init, seed);
    out.push_back(check_family("piecewise/soft-squared", PiecewiseObjective(m, a, pts_a),
                               m.get_params(), corruption));
  }
  {
    const HeatProblem heat = make_heat_benchmark();
    const Horner2D m = new_horner2d(8, heat.length, init, seed);
    auto clouds = sample_clouds(heat, CloudSizes{400, 200, 200, 200}, seed + 4);
    out.push_back(check_family("horner2d/heat", HeatObjective(m, heat, std::move(clouds), HeatWeights{}),
                               m.get_params(), corruption));
  }
  const std::vector<int> compact{5, 5, 5, 5};
  const std::vector<int> wide{16, 16};
  {
    const MlpModel m = make_baseline(BaselineKind::mlp_sigmoid, compact, seed);
    out.push_back(check_family("mlp-sigmoid/typeC", BaselineObjective(m, c, pts_c, {0.1, 0.1}),
                               m.params, corruption));
  }
  {
    const MlpModel m = make_baseline(BaselineKind::mlp_lrelu, wide, seed);
    out.push_back(check_family("mlp-lrelu/typeA", BaselineObjective(m, a, pts_a, {0.1}),
                               m.params, corruption));
  }
  {
    const MlpModel m = make_baseline(BaselineKind::siren, compact, seed);
    out.push_back(check_family("siren/typeB", BaselineObjective(m, b, pts_b, {0.1}), m.params,
                               corruption));
  }
  {
    BaselineOptions opts;
    opts.omega0 = 1.0;
    opts.normalize_input = true;
    opts.interval = c.interval;
    const MlpModel m = make_baseline(BaselineKind::siren, compact, seed, opts);
    out.push_back(check_family("siren/typeC", BaselineObjective(m, c, pts_c, {0.1, 0.1}),
                               m.params, corruption));
  }
  return out;
}

}  // namespace hornerde
