#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hornerde/jet.hpp"
#include "hornerde/problems.hpp"

namespace hornerde {

// Coordinates the optimizer sees for the trainable coefficients.
//   monomial:    params are a_n..a_m themselves.
//   orthonormal: a_n..a_m = B * params, where the columns of B are the
//                monomial coefficients of polynomials t^n q(t) that are
//                orthonormal over the training interval. The evaluated model
//                is still the plain Horner polynomial in t.
enum class ParamBasis { monomial, orthonormal };

struct InitSpec {
  double stddev = 0.01;
  ParamBasis basis = ParamBasis::orthonormal;
};

// Degree-m polynomial sum_j a_j t^j evaluated by Horner's rule. The first
// fixed_count coefficients are frozen; the rest are an affine image of the
// trainable parameter vector.
class HornerModel {
 public:
  HornerModel() = default;
  HornerModel(std::vector<double> fixed, Eigen::MatrixXd basis, std::vector<double> params);

  // Plain polynomial with identity basis over coeffs[fixed_count..].
  static HornerModel from_coefficients(std::vector<double> coeffs, int fixed_count = 0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  int fixed_count() const noexcept { return fixed_count_; }
  int trainable_count() const noexcept { return static_cast<int>(params_.size()); }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<const double> params() const noexcept { return params_; }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }

  void set_params(std::span<const double> params);

  double eval(double t) const noexcept;
  Jet eval_jet(double t, int order) const;

  // [degree, fixed_count, a_0..a_m]
  std::vector<double> serialize() const;

  // free_grad[q] += sum_i adjoint[i] * d^i/dt^i t^(fixed_count + q), i.e. the
  // pullback of a jet adjoint at t onto the free coefficients.
  void accumulate_free_gradient(double t, std::span<const double> adjoint,
                                std::span<double> free_grad) const;
  // param_grad = B^T free_grad.
  void free_to_param_gradient(std::span<const double> free_grad,
                              std::span<double> param_grad) const;

 private:
  void refresh_coeffs();

  std::vector<double> coeffs_;
  int fixed_count_ = 0;
  Eigen::MatrixXd basis_;
  std::vector<double> params_;
};

// z_m = a_m, z_i = a_i + t z_{i+1}; returns z_0.
double horner_eval(std::span<const double> coeffs, double t) noexcept;
Jet horner_eval_jet(std::span<const double> coeffs, double t, int order);

// Monomial coefficients (rows: powers first_power..last_power) of a basis
// orthonormal in the mean-square sense over a uniform grid on the interval.
Eigen::MatrixXd orthonormal_basis(Interval interval, int first_power, int last_power);

// Degree n - 1 + trainable_count, a_0..a_{n-1} taken from the ICs.
HornerModel new_horner(const OdeProblem& problem, int trainable_count,
                       const InitSpec& init, std::uint64_t seed);

std::vector<double> get_params(const HornerModel& model);
void set_params(HornerModel& model, std::span<const double> params);

}  // namespace hornerde
