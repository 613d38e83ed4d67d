#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hornerde/horner.hpp"
#include "hornerde/jet.hpp"
#include "hornerde/objective.hpp"
#include "hornerde/problems.hpp"

namespace hornerde {

enum class GradientMode {
  analytic,
  // Analytic gradients, but the first step is cross-checked against central
  // differences and training aborts if they disagree beyond 1e-4.
  finite_difference_check,
};

struct TrainConfig {
  long epochs = 10000;
  double learning_rate = 1e-3;
  int collocation_count = 200;
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::analytic;
  // Off by default; when on, lr_t = lr * decay_rate^(t / decay_steps).
  bool lr_decay = false;
  double decay_rate = 0.5;
  long decay_steps = 5000;

  void validate() const;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step_count = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// Bias-corrected Adam update in place; increments step_count.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double learning_rate);

// M i.i.d. uniform samples on the interval, reproducible under seed.
std::vector<double> sample_collocation(Interval interval, int count, std::uint64_t seed);

using JetFunction = std::function<Jet(double t, int order)>;

// (1/M) sum_k residual(problem, t_k, model jet)^2
double residual_loss(const JetFunction& model, const OdeProblem& problem,
                     std::span<const double> points);

// d loss / d params; throws TrainingError if the loss or gradient is not finite.
std::vector<double> loss_gradient(const Objective& objective, std::span<const double> params);

std::vector<double> finite_difference_gradient(const Objective& objective,
                                               std::span<const double> params,
                                               double step = 1e-6);

// ||g - fd||_2 / max(||fd||_2, 1e-12)
double gradient_relative_error(std::span<const double> analytic, std::span<const double> reference);

struct TrainResult {
  std::vector<double> params;
  std::vector<double> loss_history;  // loss before each update
  double final_loss = 0.0;           // loss at the returned params
  double wall_time_seconds = 0.0;
};

// Full-batch Adam for config.epochs steps starting from `initial`.
// Single-threaded; identical inputs give bit-identical histories.
TrainResult train(const Objective& objective, std::vector<double> initial,
                  const TrainConfig& config);

inline constexpr int kDefaultEvalPoints = 100000;

// sqrt(mean((N^(j) - x^(j))^2)) over an inclusive uniform grid on the interval.
double rmse(const JetFunction& model, const OdeProblem& problem, int deriv_order,
            int n_eval = kDefaultEvalPoints);

// Jets of order 2 for a block of inputs.
using BatchJetFunction = std::function<std::vector<Jet>(std::span<const double> ts)>;
// rmse for orders 0, 1, 2 on the same grid, evaluating the model once per point.
std::array<double, 3> rmse_all(const BatchJetFunction& model, const OdeProblem& problem,
                               int n_eval = kDefaultEvalPoints);

// Mean squared ODE residual of a Horner model, gradient w.r.t. its parameters.
class HornerResidualObjective final : public Objective {
 public:
  HornerResidualObjective(HornerModel model, OdeProblem problem, std::vector<double> points);

  std::size_t param_count() const override;
  double value(std::span<const double> params) const override;
  double value_and_gradient(std::span<const double> params,
                            std::span<double> grad) const override;

 private:
  HornerModel model_;
  OdeProblem problem_;
  std::vector<double> points_;
};

}  // namespace hornerde
