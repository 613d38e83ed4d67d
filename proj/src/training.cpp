#include "hornerde/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "hornerde/errors.hpp"

namespace hornerde {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (collocation_count < 1) throw ConfigError("need at least one collocation point");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (lr_decay && (!(decay_rate > 0.0) || decay_steps < 1)) {
    throw ConfigError("invalid learning-rate decay settings");
  }
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double learning_rate) {
  if (params.size() != grad.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ContractViolation("Adam state, parameter and gradient sizes differ");
  }
  ++state.step_count;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grad[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grad[i] * grad[i];
    params[i] -= learning_rate * (m / c1) / (std::sqrt(v / c2) + state.epsilon);
  }
}

std::vector<double> sample_collocation(Interval interval, int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("need at least one collocation point");
  if (!(interval.end > interval.start)) throw ConfigError("degenerate collocation interval");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(interval.start, interval.end);
  std::vector<double> points(static_cast<std::size_t>(count));
  for (double& t : points) t = uniform(rng);
  return points;
}

double residual_loss(const JetFunction& model, const OdeProblem& problem,
                     std::span<const double> points) {
  if (points.empty()) throw ConfigError("empty collocation set");
  double sum = 0.0;
  for (double t : points) {
    const double r = residual(problem, t, model(t, problem.order));
    sum += r * r;
  }
  return sum / static_cast<double>(points.size());
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> loss_gradient(const Objective& objective, std::span<const double> params) {
  if (objective.param_count() < 1) throw ConfigError("objective has no parameters");
  std::vector<double> grad(objective.param_count(), 0.0);
  const double loss = objective.value_and_gradient(params, grad);
  if (!std::isfinite(loss) || !all_finite(grad)) {
    throw TrainingError("non-finite loss or gradient (loss = " + std::to_string(loss) + ")", -1);
  }
  return grad;
}

std::vector<double> finite_difference_gradient(const Objective& objective,
                                               std::span<const double> params, double step) {
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = objective.value(x);
    x[i] = saved - step;
    const double down = objective.value(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double gradient_relative_error(std::span<const double> analytic,
                               std::span<const double> reference) {
  if (analytic.size() != reference.size()) throw ContractViolation("gradient sizes differ");
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - reference[i]) * (analytic[i] - reference[i]);
    norm += reference[i] * reference[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

TrainResult train(const Objective& objective, std::vector<double> initial,
                  const TrainConfig& config) {
  config.validate();
  if (initial.size() != objective.param_count()) {
    throw ContractViolation("initial parameter vector has the wrong length");
  }
  const auto start = std::chrono::steady_clock::now();
  TrainResult result;
  result.params = std::move(initial);
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs));

  AdamState adam(result.params.size());
  std::vector<double> grad(result.params.size());
  for (long epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = objective.value_and_gradient(result.params, grad);
    if (!std::isfinite(loss) || !all_finite(grad)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch), epoch);
    }
    if (epoch == 0 && config.gradient_mode == GradientMode::finite_difference_check) {
      const auto fd = finite_difference_gradient(objective, result.params);
      const double err = gradient_relative_error(grad, fd);
      if (err > 1e-4) {
        throw TrainingError("gradient check failed: relative error " + std::to_string(err), epoch);
      }
    }
    result.loss_history.push_back(loss);
    double lr = config.learning_rate;
    if (config.lr_decay) {
      lr *= std::pow(config.decay_rate,
                     static_cast<double>(epoch) / static_cast<double>(config.decay_steps));
    }
    adam_step(adam, result.params, grad, lr);
  }
  result.final_loss = objective.value(result.params);
  if (!std::isfinite(result.final_loss)) {
    throw TrainingError("non-finite final loss", config.epochs);
  }
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double rmse(const JetFunction& model, const OdeProblem& problem, int deriv_order, int n_eval) {
  if (deriv_order < 0 || deriv_order > 2) throw ContractViolation("RMSE derivative order must be 0..2");
  if (n_eval < 2) throw ConfigError("evaluation grid needs at least two points");
  const Interval iv = problem.interval;
  double sum = 0.0;
  for (int k = 0; k < n_eval; ++k) {
    const double t = iv.start + iv.length() * static_cast<double>(k) / (n_eval - 1);
    const double d = model(t, deriv_order)[deriv_order] -
                     exact_solution(problem.kind, t, deriv_order)[deriv_order];
    sum += d * d;
  }
  return std::sqrt(sum / n_eval);
}

std::array<double, 3> rmse_all(const BatchJetFunction& model, const OdeProblem& problem,
                               int n_eval) {
  if (n_eval < 2) throw ConfigError("evaluation grid needs at least two points");
  constexpr int kBlock = 2048;
  const Interval iv = problem.interval;
  std::array<double, 3> sum{};
  std::vector<double> ts;
  ts.reserve(kBlock);
  for (int first = 0; first < n_eval; first += kBlock) {
    ts.clear();
    for (int k = first; k < std::min(n_eval, first + kBlock); ++k) {
      ts.push_back(iv.start + iv.length() * static_cast<double>(k) / (n_eval - 1));
    }
    const std::vector<Jet> jets = model(ts);
    if (jets.size() != ts.size()) throw ContractViolation("batch evaluator returned the wrong count");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Jet e = exact_solution(problem.kind, ts[i], 2);
      for (int d = 0; d < 3; ++d) {
        const double diff = jets[i][d] - e[d];
        sum[static_cast<std::size_t>(d)] += diff * diff;
      }
    }
  }
  for (double& v : sum) v = std::sqrt(v / n_eval);
  return sum;
}

HornerResidualObjective::HornerResidualObjective(HornerModel model, OdeProblem problem,
                                                 std::vector<double> points)
    : model_(std::move(model)), problem_(std::move(problem)), points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("empty collocation set");
  if (model_.fixed_count() != problem_.order) {
    throw ContractViolation("Horner model must freeze exactly the ODE order's coefficients");
  }
}

std::size_t HornerResidualObjective::param_count() const {
  return static_cast<std::size_t>(model_.trainable_count());
}

double HornerResidualObjective::value(std::span<const double> params) const {
  HornerModel m = model_;
  m.set_params(params);
  return residual_loss([&m](double t, int k) { return m.eval_jet(t, k); }, problem_, points_);
}

double HornerResidualObjective::value_and_gradient(std::span<const double> params,
                                                   std::span<double> grad) const {
  HornerModel m = model_;
  m.set_params(params);
  const int n = problem_.order;
  const double scale = 2.0 / static_cast<double>(points_.size());
  std::vector<double> free_grad(param_count(), 0.0);
  double sum = 0.0;
  for (double t : points_) {
    const Jet x = m.eval_jet(t, n);
    const double r = residual(problem_, t, x);
    sum += r * r;
    const auto s = residual_partials(problem_, t, x);
    double adjoint[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i <= n; ++i) adjoint[i] = scale * r * s[static_cast<std::size_t>(i)];
    m.accumulate_free_gradient(t, std::span<const double>(adjoint, static_cast<std::size_t>(n) + 1),
                               free_grad);
  }
  m.free_to_param_gradient(free_grad, grad);
  return sum / static_cast<double>(points_.size());
}

}  // namespace hornerde
