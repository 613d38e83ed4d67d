#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hornerde/baselines.hpp"
#include "hornerde/horner.hpp"
#include "hornerde/pde2d.hpp"
#include "hornerde/piecewise.hpp"
#include "hornerde/problems.hpp"
#include "hornerde/training.hpp"

namespace hornerde {

enum class ModelKind { horner, piecewise, polyreg, mlp_sigmoid, mlp_lrelu, siren, horner2d };

// "horner", "piecewise", "polyreg", "mlp-sigmoid", "mlp-lrelu", "siren", "horner2d".
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

inline constexpr int kLreluStandInWidth = 64;
inline constexpr int kLreluFullWidth = 256;

// Fully resolved description of one run. Zero / empty fields marked "auto"
// are filled in by resolve() from the problem and model.
struct SolveConfig {
  ProblemKind problem = ProblemKind::type_a;
  ModelKind model = ModelKind::horner;
  TrainConfig train;
  bool collocation_set = false;  // false: model default (200, 400 for baselines, 10000 polyreg)
  int eval_points = kDefaultEvalPoints;
  int trace_points = 1001;

  // horner
  int trainable = 0;  // auto: 10, 13 for typeC
  InitSpec init;

  // polyreg
  int degree = 15;

  // piecewise
  PiecewiseSpec piecewise;

  // baselines
  std::vector<int> widths;  // auto: 5,5,5,5 (lrelu: 5 x 64, or 5 x 256 with full_width)
  bool full_width = false;
  double lambda0 = 0.1;     // IC penalty, used for every derivative order
  double omega0 = 30.0;
  bool normalize_input = false;

  // horner2d / heat
  int order2d = 8;
  CloudSizes clouds;
  HeatWeights heat_weights;
  double t_max = 1.0;
  int grid_points = 101;

  // Fill auto fields; throws ConfigError / UnsupportedProblem on bad combinations.
  void resolve();
};

nlohmann::json to_json(const SolveConfig& config);

struct TraceRow {
  double t = 0.0;
  std::array<double, 3> pred{};
  std::array<double, 3> exact{};
};

struct RunReport {
  SolveConfig config;
  std::array<double, 3> rmse{};  // solution, first, second derivative (ODE runs)
  double final_loss = 0.0;
  std::size_t param_count = 0;
  double wall_time_seconds = 0.0;
  std::vector<double> model_serialization;
  std::vector<double> loss_history;
  std::vector<TraceRow> trace;         // ODE runs
  std::vector<GridSample> heat_grid;   // heat runs; rmse[0] holds the grid RMSE
  std::optional<KnotJumps> knot_jumps; // piecewise runs
};

nlohmann::json to_json(const RunReport& report);

// Train (or fit) one model on one problem.
RunReport run_solve(SolveConfig config);

struct BenchCell {
  std::array<double, 3> median_rmse{};
  std::vector<std::array<double, 3>> per_seed;
  std::string error;  // non-empty if any seed failed
};

struct BenchTable {
  std::vector<ProblemKind> problems;
  std::vector<ModelKind> models;
  std::vector<std::uint64_t> seeds;
  long epochs = 0;
  bool full_width = false;
  // cells[p][m]
  std::vector<std::vector<BenchCell>> cells;
  std::optional<BenchCell> piecewise_row;  // spline-like Type A
  SolveConfig piecewise_config;
};

struct BenchOptions {
  std::vector<ProblemKind> problems{ProblemKind::type_a, ProblemKind::type_b, ProblemKind::type_c};
  std::vector<ModelKind> models{ModelKind::mlp_lrelu, ModelKind::mlp_sigmoid, ModelKind::siren,
                                ModelKind::horner};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  long epochs = 10000;
  bool full_width = false;
  bool include_piecewise = true;
};

// Configuration used for every cell of the benchmark table.
SolveConfig bench_config(ProblemKind problem, ModelKind model, std::uint64_t seed,
                         long epochs, bool full_width);
// Tuned spline-like Type A setup: squared penalties, decayed step, small init.
SolveConfig piecewise_bench_config(std::uint64_t seed, long epochs);

BenchTable run_bench(const BenchOptions& options);
nlohmann::json to_json(const BenchTable& table);

double median(std::vector<double> values);

struct GradcheckResult {
  std::string family;
  std::size_t param_count = 0;
  double relative_error = 0.0;
  bool passed = false;
};

inline constexpr double kGradientTolerance = 1e-4;

// Analytic vs central-difference gradients for every model family on freshly
// initialized models. corruption != 0 perturbs the first analytic gradient
// component (negative control for the checker itself).
std::vector<GradcheckResult> run_gradcheck(std::uint64_t seed, double corruption = 0.0);

}  // namespace hornerde
