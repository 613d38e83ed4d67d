#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "hornerde/errors.hpp"

namespace hornerde {

inline constexpr int kMaxJetOrder = 6;

// Value of a scalar quantity together with its derivatives with respect to
// the model input, d^j/dt^j for j = 0..order. Entries are derivative values,
// not Taylor coefficients.
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order) : order_(check_order(order)) {}
  Jet(std::initializer_list<double> derivs);

  static Jet variable(double t, int order);
  static Jet constant(double c, int order);

  int order() const noexcept { return order_; }
  double operator[](int j) const { return d_[static_cast<std::size_t>(j)]; }
  double& operator[](int j) { return d_[static_cast<std::size_t>(j)]; }
  double value() const noexcept { return d_[0]; }
  std::span<const double> derivs() const noexcept {
    return {d_.data(), static_cast<std::size_t>(order_) + 1};
  }

  Jet& operator+=(const Jet& other);
  Jet& operator*=(double s) noexcept;

 private:
  static int check_order(int order);

  int order_ = 0;
  std::array<double, kMaxJetOrder + 1> d_{};
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, double s);
inline Jet operator*(double s, const Jet& a) { return a * s; }
// Leibniz rule with binomial weights.
Jet operator*(const Jet& a, const Jet& b);

// Fused a + t * z, the single Horner stage, with a a plain coefficient.
Jet multiply_add(double a, const Jet& t, const Jet& z);

enum class ActivationKind { sigmoid, leaky_relu, sine };

struct Activation {
  ActivationKind kind = ActivationKind::sigmoid;
  // leaky_relu: negative-side slope. sine: frequency omega.
  double param = 0.0;

  static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
  static Activation leaky_relu(double slope = 0.01) {
    return {ActivationKind::leaky_relu, slope};
  }
  static Activation sine(double omega = 1.0) {
    return {ActivationKind::sine, omega};
  }
};

// g(z), g'(z), g''(z), g'''(z). Leaky ReLU uses the positive-side slope at 0.
std::array<double, 4> activation_derivatives(const Activation& act, double z);

// Composition g(a) through order 2 (Faa di Bruno).
Jet apply_activation(const Jet& a, const Activation& act);

}  // namespace hornerde
