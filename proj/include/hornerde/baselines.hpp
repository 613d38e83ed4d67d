#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hornerde/jet.hpp"
#include "hornerde/objective.hpp"
#include "hornerde/problems.hpp"

namespace hornerde {

enum class BaselineKind { mlp_sigmoid, mlp_lrelu, siren };

// "mlp-sigmoid", "mlp-lrelu", "siren".
std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);

// Fully connected 1 -> hidden... -> 1 network. Every hidden layer applies the
// same activation; the output layer is affine. The scalar input is mapped to
// input_scale * t + input_shift before the first layer.
struct MlpModel {
  std::vector<int> widths;  // including the input and output width 1
  Activation activation;
  double input_scale = 1.0;
  double input_shift = 0.0;
  // Per layer: weights (out x in, row-major), then biases.
  std::vector<double> params;

  int layer_count() const noexcept { return static_cast<int>(widths.size()) - 1; }
  std::size_t param_count() const noexcept { return params.size(); }
};

// sum over layers of (in * out + out).
std::size_t mlp_param_count(std::span<const int> widths);

struct BaselineOptions {
  double omega0 = 30.0;      // SIREN frequency
  double leaky_slope = 0.01;
  // Map the problem interval onto [-1, 1] before the first layer.
  bool normalize_input = false;
  Interval interval{0.0, 1.0};
};

// sigmoid / leaky ReLU: weights and biases uniform in +-1/sqrt(fan_in).
// siren: first-layer weights uniform in +-1/fan_in, later weights in
// +-sqrt(6/fan_in)/omega0, biases +-1/sqrt(fan_in).
MlpModel make_baseline(BaselineKind kind, std::span<const int> hidden_widths, std::uint64_t seed,
                       const BaselineOptions& options = {});

double mlp_eval(const MlpModel& model, double t);
Jet mlp_eval_jet(const MlpModel& model, double t, int order);
// Same jets for many inputs at once through the batched (matrix) forward pass.
std::vector<Jet> mlp_eval_jet_batch(const MlpModel& model, std::span<const double> ts, int order);

// (1/M) sum r(t_i)^2 + sum_j lambda_j (N^(j)(0) - x_j)^2
double baseline_loss(const MlpModel& model, const OdeProblem& problem,
                     std::span<const double> points, std::span<const double> lambdas);

// Batched forward and reverse pass through the derivative jets of all points.
class BaselineObjective final : public Objective {
 public:
  BaselineObjective(MlpModel model, OdeProblem problem, std::vector<double> points,
                    std::vector<double> lambdas);

  std::size_t param_count() const override { return model_.param_count(); }
  double value(std::span<const double> params) const override;
  double value_and_gradient(std::span<const double> params,
                            std::span<double> grad) const override;

 private:
  MlpModel model_;
  OdeProblem problem_;
  std::vector<double> points_;
  std::vector<double> lambdas_;
};

}  // namespace hornerde
