#include "hornerde/baselines.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "hornerde/errors.hpp"

namespace hornerde {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LayerView {
  Eigen::Map<const RowMatrix> w;
  Eigen::Map<const Eigen::VectorXd> b;
};

std::vector<LayerView> layer_views(const MlpModel& model, std::span<const double> params) {
  std::vector<LayerView> layers;
  std::size_t offset = 0;
  for (int l = 0; l < model.layer_count(); ++l) {
    const int in = model.widths[static_cast<std::size_t>(l)];
    const int out = model.widths[static_cast<std::size_t>(l) + 1];
    layers.push_back({Eigen::Map<const RowMatrix>(params.data() + offset, out, in),
                      Eigen::Map<const Eigen::VectorXd>(params.data() + offset +
                                                            static_cast<std::size_t>(in * out),
                                                        out)});
    offset += static_cast<std::size_t>(in * out + out);
  }
  return layers;
}

// Batched jet forward pass. acts[l][k] is the k-th derivative of the layer-l
// input (one column per t), pre[l][k] the matching pre-activation.
struct Forward {
  std::vector<std::array<Eigen::MatrixXd, 3>> acts;
  std::vector<std::array<Eigen::MatrixXd, 3>> pre;
};

Forward forward_batch(const MlpModel& model, const std::vector<LayerView>& layers,
                      std::span<const double> ts, int order) {
  const int comps = order + 1;
  const auto batch = static_cast<Eigen::Index>(ts.size());
  const std::size_t nl = layers.size();
  Forward f;
  f.acts.resize(nl + 1);
  f.pre.resize(nl);
  for (int k = 0; k < comps; ++k) f.acts[0][static_cast<std::size_t>(k)].setZero(1, batch);
  for (Eigen::Index c = 0; c < batch; ++c) {
    f.acts[0][0](0, c) = model.input_scale * ts[static_cast<std::size_t>(c)] + model.input_shift;
    if (order >= 1) f.acts[0][1](0, c) = model.input_scale;
  }
  for (std::size_t l = 0; l < nl; ++l) {
    for (int k = 0; k < comps; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      f.pre[l][ku].noalias() = layers[l].w * f.acts[l][ku];
      if (k == 0) f.pre[l][ku].colwise() += layers[l].b;
    }
    if (l + 1 == nl) {
      for (int k = 0; k < comps; ++k) f.acts[l + 1][static_cast<std::size_t>(k)] = f.pre[l][static_cast<std::size_t>(k)];
      continue;
    }
    const auto rows = f.pre[l][0].rows();
    for (int k = 0; k < comps; ++k) f.acts[l + 1][static_cast<std::size_t>(k)].resize(rows, batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto g = activation_derivatives(model.activation, f.pre[l][0](r, c));
        f.acts[l + 1][0](r, c) = g[0];
        if (order >= 1) f.acts[l + 1][1](r, c) = g[1] * f.pre[l][1](r, c);
        if (order >= 2) {
          const double z1 = f.pre[l][1](r, c);
          f.acts[l + 1][2](r, c) = g[2] * z1 * z1 + g[1] * f.pre[l][2](r, c);
        }
      }
    }
  }
  return f;
}

void check_model(const MlpModel& model) {
  if (model.widths.size() < 2 || model.widths.front() != 1 || model.widths.back() != 1) {
    throw ConfigError("MLP widths must start and end with 1");
  }
  if (mlp_param_count(model.widths) != model.params.size()) {
    throw ContractViolation("MLP parameter vector does not match its widths");
  }
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::mlp_sigmoid: return "mlp-sigmoid";
    case BaselineKind::mlp_lrelu: return "mlp-lrelu";
    case BaselineKind::siren: return "siren";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "mlp-sigmoid") return BaselineKind::mlp_sigmoid;
  if (name == "mlp-lrelu") return BaselineKind::mlp_lrelu;
  if (name == "siren") return BaselineKind::siren;
  throw ConfigError("unknown baseline model '" + std::string(name) + "'");
}

std::size_t mlp_param_count(std::span<const int> widths) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    n += static_cast<std::size_t>(widths[l] * widths[l + 1] + widths[l + 1]);
  }
  return n;
}

MlpModel make_baseline(BaselineKind kind, std::span<const int> hidden_widths, std::uint64_t seed,
                       const BaselineOptions& options) {
  if (hidden_widths.empty()) throw ConfigError("need at least one hidden layer");
  for (int w : hidden_widths) {
    if (w < 1) throw ConfigError("hidden widths must be positive");
  }
  MlpModel model;
  model.widths.push_back(1);
  model.widths.insert(model.widths.end(), hidden_widths.begin(), hidden_widths.end());
  model.widths.push_back(1);
  switch (kind) {
    case BaselineKind::mlp_sigmoid: model.activation = Activation::sigmoid(); break;
    case BaselineKind::mlp_lrelu: model.activation = Activation::leaky_relu(options.leaky_slope); break;
    case BaselineKind::siren: model.activation = Activation::sine(options.omega0); break;
  }
  if (options.normalize_input) {
    if (!(options.interval.length() > 0.0)) throw ConfigError("degenerate input interval");
    model.input_scale = 2.0 / options.interval.length();
    model.input_shift = -(options.interval.start + options.interval.end) / options.interval.length();
  }

  std::mt19937_64 rng(seed);
  model.params.reserve(mlp_param_count(model.widths));
  for (int l = 0; l < model.layer_count(); ++l) {
    const int in = model.widths[static_cast<std::size_t>(l)];
    const int out = model.widths[static_cast<std::size_t>(l) + 1];
    const double bias_bound = 1.0 / std::sqrt(static_cast<double>(in));
    double weight_bound = bias_bound;
    if (kind == BaselineKind::siren) {
      weight_bound = l == 0 ? 1.0 / in : std::sqrt(6.0 / in) / options.omega0;
    }
    std::uniform_real_distribution<double> wdist(-weight_bound, weight_bound);
    std::uniform_real_distribution<double> bdist(-bias_bound, bias_bound);
    for (int k = 0; k < in * out; ++k) model.params.push_back(wdist(rng));
    for (int k = 0; k < out; ++k) model.params.push_back(bdist(rng));
  }
  return model;
}

double mlp_eval(const MlpModel& model, double t) {
  check_model(model);
  const auto layers = layer_views(model, model.params);
  Eigen::VectorXd h(1);
  h(0) = model.input_scale * t + model.input_shift;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::VectorXd z = layers[l].w * h + layers[l].b;
    if (l + 1 < layers.size()) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = activation_derivatives(model.activation, z(i))[0];
    }
    h = std::move(z);
  }
  return h(0);
}

Jet mlp_eval_jet(const MlpModel& model, double t, int order) {
  check_model(model);
  const auto layers = layer_views(model, model.params);
  std::vector<Jet> h{Jet::variable(t, order) * model.input_scale +
                     Jet::constant(model.input_shift, order)};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].w;
    std::vector<Jet> z;
    z.reserve(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      Jet acc = Jet::constant(layers[l].b(o), order);
      for (Eigen::Index i = 0; i < w.cols(); ++i) acc += h[static_cast<std::size_t>(i)] * w(o, i);
      z.push_back(l + 1 < layers.size() ? apply_activation(acc, model.activation) : acc);
    }
    h = std::move(z);
  }
  return h.front();
}

std::vector<Jet> mlp_eval_jet_batch(const MlpModel& model, std::span<const double> ts, int order) {
  check_model(model);
  if (order < 0 || order > 2) throw ContractViolation("MLP jets support orders 0..2");
  const auto layers = layer_views(model, model.params);
  const Forward f = forward_batch(model, layers, ts, order);
  const auto& out = f.acts.back();
  std::vector<Jet> jets;
  jets.reserve(ts.size());
  for (std::size_t c = 0; c < ts.size(); ++c) {
    Jet j(order);
    for (int k = 0; k <= order; ++k) j[k] = out[static_cast<std::size_t>(k)](0, static_cast<Eigen::Index>(c));
    jets.push_back(j);
  }
  return jets;
}

double baseline_loss(const MlpModel& model, const OdeProblem& problem,
                     std::span<const double> points, std::span<const double> lambdas) {
  if (lambdas.size() != static_cast<std::size_t>(problem.order)) {
    throw ConfigError("need one IC penalty weight per ODE order");
  }
  if (points.empty()) throw ConfigError("empty collocation set");
  double sum = 0.0;
  for (double t : points) {
    const double r = residual(problem, t, mlp_eval_jet(model, t, problem.order));
    sum += r * r;
  }
  double loss = sum / static_cast<double>(points.size());
  const Jet at0 = mlp_eval_jet(model, problem.interval.start, problem.order);
  for (int j = 0; j < problem.order; ++j) {
    const double d = at0[j] - problem.initial_conditions[static_cast<std::size_t>(j)];
    loss += lambdas[static_cast<std::size_t>(j)] * d * d;
  }
  return loss;
}

BaselineObjective::BaselineObjective(MlpModel model, OdeProblem problem,
                                     std::vector<double> points, std::vector<double> lambdas)
    : model_(std::move(model)),
      problem_(std::move(problem)),
      points_(std::move(points)),
      lambdas_(std::move(lambdas)) {
  check_model(model_);
  if (points_.empty()) throw ConfigError("empty collocation set");
  if (lambdas_.size() != static_cast<std::size_t>(problem_.order)) {
    throw ConfigError("need one IC penalty weight per ODE order");
  }
}

double BaselineObjective::value(std::span<const double> params) const {
  MlpModel m = model_;
  m.params.assign(params.begin(), params.end());
  return baseline_loss(m, problem_, points_, lambdas_);
}

double BaselineObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> grad) const {
  using Eigen::MatrixXd;
  const int order = problem_.order;
  const int comps = order + 1;
  const auto batch = static_cast<Eigen::Index>(points_.size()) + 1;
  const auto layers = layer_views(model_, params);
  const std::size_t nl = layers.size();

  std::vector<double> ts(points_.begin(), points_.end());
  ts.push_back(problem_.interval.start);  // last column: the IC penalty point
  const Forward f = forward_batch(model_, layers, ts, order);
  const auto& acts = f.acts;
  const auto& pre = f.pre;

  // Output adjoints.
  const auto& out = acts[nl];
  std::array<MatrixXd, 3> adj;
  for (int k = 0; k < comps; ++k) adj[static_cast<std::size_t>(k)].setZero(1, batch);
  const auto m = static_cast<double>(points_.size());
  double sum = 0.0;
  for (Eigen::Index c = 0; c + 1 < batch; ++c) {
    Jet x(order);
    for (int k = 0; k < comps; ++k) x[k] = out[static_cast<std::size_t>(k)](0, c);
    const double t = points_[static_cast<std::size_t>(c)];
    const double r = residual(problem_, t, x);
    sum += r * r;
    const auto s = residual_partials(problem_, t, x);
    for (int k = 0; k < comps; ++k) adj[static_cast<std::size_t>(k)](0, c) = 2.0 * r * s[static_cast<std::size_t>(k)] / m;
  }
  double loss = sum / m;
  for (int j = 0; j < order; ++j) {
    const double d = out[static_cast<std::size_t>(j)](0, batch - 1) -
                     problem_.initial_conditions[static_cast<std::size_t>(j)];
    loss += lambdas_[static_cast<std::size_t>(j)] * d * d;
    adj[static_cast<std::size_t>(j)](0, batch - 1) = 2.0 * lambdas_[static_cast<std::size_t>(j)] * d;
  }

  // Reverse sweep.
  std::size_t offset = params.size();
  for (std::size_t l = nl; l-- > 0;) {
    const auto& w = layers[l].w;
    const auto in = static_cast<std::size_t>(w.cols());
    const auto outw = static_cast<std::size_t>(w.rows());
    offset -= in * outw + outw;
    if (l + 1 < nl) {
      // adj currently holds d loss / d (activation outputs); pull back to pre-activations.
      std::array<MatrixXd, 3> dz;
      const auto rows = pre[l][0].rows();
      for (int k = 0; k < comps; ++k) dz[static_cast<std::size_t>(k)].setZero(rows, batch);
      for (Eigen::Index c = 0; c < batch; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
          const auto g = activation_derivatives(model_.activation, pre[l][0](r, c));
          const double a0 = adj[0](r, c);
          double d0 = a0 * g[1];
          if (order >= 1) {
            const double a1 = adj[1](r, c);
            const double z1 = pre[l][1](r, c);
            d0 += a1 * g[2] * z1;
            double d1 = a1 * g[1];
            if (order >= 2) {
              const double a2 = adj[2](r, c);
              const double z2 = pre[l][2](r, c);
              d0 += a2 * (g[3] * z1 * z1 + g[2] * z2);
              d1 += a2 * 2.0 * g[2] * z1;
              dz[2](r, c) = a2 * g[1];
            }
            dz[1](r, c) = d1;
          }
          dz[0](r, c) = d0;
        }
      }
      adj = std::move(dz);
    }
    Eigen::Map<RowMatrix> gw(grad.data() + offset, static_cast<Eigen::Index>(outw),
                             static_cast<Eigen::Index>(in));
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offset + in * outw, static_cast<Eigen::Index>(outw));
    gw.setZero();
    for (int k = 0; k < comps; ++k) {
      gw.noalias() += adj[static_cast<std::size_t>(k)] * acts[l][static_cast<std::size_t>(k)].transpose();
    }
    gb = adj[0].rowwise().sum();
    if (l > 0) {
      for (int k = 0; k < comps; ++k) {
        adj[static_cast<std::size_t>(k)] = w.transpose() * adj[static_cast<std::size_t>(k)];
      }
    }
  }
  return loss;
}

}  // namespace hornerde
