#include "hornerde/horner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hornerde/errors.hpp"

namespace hornerde {

HornerModel::HornerModel(std::vector<double> fixed, Eigen::MatrixXd basis,
                         std::vector<double> params)
    : fixed_count_(static_cast<int>(fixed.size())),
      basis_(std::move(basis)),
      params_(std::move(params)) {
  if (basis_.rows() != basis_.cols() ||
      basis_.cols() != static_cast<Eigen::Index>(params_.size())) {
    throw ContractViolation("basis must be square and match the parameter count");
  }
  coeffs_ = std::move(fixed);
  coeffs_.resize(coeffs_.size() + params_.size(), 0.0);
  if (coeffs_.empty()) throw ContractViolation("a Horner model needs at least one coefficient");
  refresh_coeffs();
}

HornerModel HornerModel::from_coefficients(std::vector<double> coeffs, int fixed_count) {
  if (fixed_count < 0 || fixed_count > static_cast<int>(coeffs.size())) {
    throw ContractViolation("fixed_count out of range");
  }
  std::vector<double> fixed(coeffs.begin(), coeffs.begin() + fixed_count);
  std::vector<double> params(coeffs.begin() + fixed_count, coeffs.end());
  const auto k = static_cast<Eigen::Index>(params.size());
  return HornerModel(std::move(fixed), Eigen::MatrixXd::Identity(k, k), std::move(params));
}

void HornerModel::set_params(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw ContractViolation("expected " + std::to_string(params_.size()) +
                            " parameters, got " + std::to_string(params.size()));
  }
  std::copy(params.begin(), params.end(), params_.begin());
  refresh_coeffs();
}

void HornerModel::refresh_coeffs() {
  const auto k = static_cast<Eigen::Index>(params_.size());
  const Eigen::Map<const Eigen::VectorXd> theta(params_.data(), k);
  Eigen::Map<Eigen::VectorXd> free(coeffs_.data() + fixed_count_, k);
  free.noalias() = basis_ * theta;
}

double HornerModel::eval(double t) const noexcept { return horner_eval(coeffs_, t); }

Jet HornerModel::eval_jet(double t, int order) const {
  return horner_eval_jet(coeffs_, t, order);
}

std::vector<double> HornerModel::serialize() const {
  std::vector<double> out;
  out.reserve(coeffs_.size() + 2);
  out.push_back(degree());
  out.push_back(fixed_count_);
  out.insert(out.end(), coeffs_.begin(), coeffs_.end());
  return out;
}

void HornerModel::accumulate_free_gradient(double t, std::span<const double> adjoint,
                                           std::span<double> free_grad) const {
  const int m = degree();
  const int order = static_cast<int>(adjoint.size()) - 1;
  // power[p] = t^p
  double power[64];
  if (m >= 64) throw ContractViolation("degree too large for gradient accumulation");
  power[0] = 1.0;
  for (int p = 1; p <= m; ++p) power[p] = power[p - 1] * t;
  for (int j = fixed_count_; j <= m; ++j) {
    double g = adjoint[0] * power[j];
    if (order >= 1 && j >= 1) g += adjoint[1] * j * power[j - 1];
    if (order >= 2 && j >= 2) g += adjoint[2] * j * (j - 1) * power[j - 2];
    free_grad[static_cast<std::size_t>(j - fixed_count_)] += g;
  }
}

void HornerModel::free_to_param_gradient(std::span<const double> free_grad,
                                         std::span<double> param_grad) const {
  const auto k = static_cast<Eigen::Index>(params_.size());
  const Eigen::Map<const Eigen::VectorXd> g(free_grad.data(), k);
  Eigen::Map<Eigen::VectorXd> out(param_grad.data(), k);
  out.noalias() = basis_.transpose() * g;
}

double horner_eval(std::span<const double> coeffs, double t) noexcept {
  if (coeffs.empty()) return 0.0;
  double z = coeffs.back();
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) z = coeffs[i] + t * z;
  return z;
}

Jet horner_eval_jet(std::span<const double> coeffs, double t, int order) {
  const Jet var = Jet::variable(t, order);
  if (coeffs.empty()) return Jet(order);
  Jet z = Jet::constant(coeffs.back(), order);
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) z = multiply_add(coeffs[i], var, z);
  return z;
}

Eigen::MatrixXd orthonormal_basis(Interval interval, int first_power, int last_power) {
  if (first_power < 0 || last_power < first_power) {
    throw ContractViolation("invalid power range for basis");
  }
  if (!(interval.length() > 0.0)) throw ConfigError("degenerate interval");
  const int k = last_power - first_power + 1;
  const int grid = std::max(1000, 40 * (last_power + 1));
  const double scale = std::max(std::abs(interval.start), std::abs(interval.end));

  Eigen::MatrixXd v(grid, k);
  const double norm = 1.0 / std::sqrt(static_cast<double>(grid));
  for (int g = 0; g < grid; ++g) {
    const double s = (interval.start + interval.length() * g / (grid - 1)) / scale;
    double p = std::pow(s, first_power);
    for (int q = 0; q < k; ++q) {
      v(g, q) = p * norm;
      p *= s;
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd basis = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  for (int q = 0; q < k; ++q) basis.row(q) /= std::pow(scale, first_power + q);
  return basis;
}

HornerModel new_horner(const OdeProblem& problem, int trainable_count,
                       const InitSpec& init, std::uint64_t seed) {
  if (trainable_count < 1) throw ConfigError("need at least one trainable coefficient");
  const int n = problem.order;
  const int degree = n - 1 + trainable_count;
  Eigen::MatrixXd basis =
      init.basis == ParamBasis::orthonormal
          ? orthonormal_basis(problem.interval, n, degree)
          : Eigen::MatrixXd::Identity(trainable_count, trainable_count);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, init.stddev);
  std::vector<double> params(static_cast<std::size_t>(trainable_count));
  for (double& p : params) p = init.stddev > 0.0 ? normal(rng) : 0.0;
  return HornerModel(problem.initial_conditions, std::move(basis), std::move(params));
}

std::vector<double> get_params(const HornerModel& model) {
  return {model.params().begin(), model.params().end()};
}

void set_params(HornerModel& model, std::span<const double> params) {
  model.set_params(params);
}

}  // namespace hornerde
