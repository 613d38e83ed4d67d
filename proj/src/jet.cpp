#include "hornerde/jet.hpp"

#include <string>

namespace hornerde {
namespace {

void require_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    throw ContractViolation("jet order mismatch: " + std::to_string(a.order()) +
                            " vs " + std::to_string(b.order()));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int Jet::check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw ContractViolation("jet order out of range: " + std::to_string(order));
  }
  return order;
}

Jet::Jet(std::initializer_list<double> derivs)
    : order_(check_order(static_cast<int>(derivs.size()) - 1)) {
  std::size_t j = 0;
  for (double v : derivs) d_[j++] = v;
}

Jet Jet::variable(double t, int order) {
  Jet j(order);
  j.d_[0] = t;
  if (order >= 1) j.d_[1] = 1.0;
  return j;
}

Jet Jet::constant(double c, int order) {
  Jet j(order);
  j.d_[0] = c;
  return j;
}

Jet& Jet::operator+=(const Jet& other) {
  require_same_order(*this, other);
  for (int j = 0; j <= order_; ++j) (*this)[j] += other[j];
  return *this;
}

Jet& Jet::operator*=(double s) noexcept {
  for (int j = 0; j <= order_; ++j) (*this)[j] *= s;
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  r += b;
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  Jet r = a;
  for (int j = 0; j <= a.order(); ++j) r[j] -= b[j];
  return r;
}

Jet operator*(const Jet& a, double s) {
  Jet r = a;
  r *= s;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  const int k = a.order();
  Jet r(k);
  r[0] = a[0] * b[0];
  if (k >= 1) r[1] = a[0] * b[1] + a[1] * b[0];
  if (k >= 2) r[2] = a[0] * b[2] + 2.0 * a[1] * b[1] + a[2] * b[0];
  for (int n = 3; n <= k; ++n) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += binomial(n, i) * a[i] * b[n - i];
    r[n] = s;
  }
  return r;
}

Jet multiply_add(double a, const Jet& t, const Jet& z) {
  Jet r = t * z;
  r[0] += a;
  return r;
}

std::array<double, 4> activation_derivatives(const Activation& act, double z) {
  switch (act.kind) {
    case ActivationKind::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      const double d1 = s * (1.0 - s);
      return {s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s * s)};
    }
    case ActivationKind::leaky_relu:
      if (z >= 0.0) return {z, 1.0, 0.0, 0.0};
      return {act.param * z, act.param, 0.0, 0.0};
    case ActivationKind::sine: {
      const double w = act.param;
      const double s = std::sin(w * z);
      const double c = std::cos(w * z);
      return {s, w * c, -w * w * s, -w * w * w * c};
    }
  }
  return {0.0, 0.0, 0.0, 0.0};
}

Jet apply_activation(const Jet& a, const Activation& act) {
  if (a.order() > 2) {
    throw ContractViolation("activation jets are limited to order 2");
  }
  const auto g = activation_derivatives(act, a[0]);
  Jet r(a.order());
  r[0] = g[0];
  if (a.order() >= 1) r[1] = g[1] * a[1];
  if (a.order() >= 2) r[2] = g[2] * a[1] * a[1] + g[1] * a[2];
  return r;
}

}  // namespace hornerde
