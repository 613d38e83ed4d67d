#include "hornerde/polyreg.hpp"

#include <string>

#include "hornerde/errors.hpp"

namespace hornerde::polyreg {
namespace {

constexpr int kRefinementSteps = 2;

void require_linear(const OdeProblem& problem) {
  if (!problem.is_linear()) {
    throw UnsupportedProblem("polynomial regression needs a linear constant-coefficient ODE, got " +
                             std::string(to_string(problem.kind)));
  }
}

// scaled[p] = t^p / p! for p = 0..max_power.
std::vector<double> scaled_powers(double t, int max_power) {
  std::vector<double> s(static_cast<std::size_t>(max_power) + 1);
  s[0] = 1.0;
  for (int p = 1; p <= max_power; ++p) {
    s[static_cast<std::size_t>(p)] = s[static_cast<std::size_t>(p) - 1] * t / p;
  }
  return s;
}

}  // namespace

double ic_corrected_forcing(const OdeProblem& problem, double t) {
  require_linear(problem);
  const int n = problem.order;
  const auto powers = scaled_powers(t, n);
  double correction = 0.0;
  for (int i = 0; i <= n; ++i) {
    double inner = 0.0;
    for (int j = i; j <= n - 1; ++j) {
      inner += problem.initial_conditions[static_cast<std::size_t>(j)] *
               powers[static_cast<std::size_t>(j - i)];
    }
    correction += problem.linear_coeffs[static_cast<std::size_t>(i)] * inner;
  }
  return problem.forcing(t) - correction;
}

CollocationSystem build_system(const OdeProblem& problem, int degree,
                               std::span<const double> points) {
  require_linear(problem);
  const int n = problem.order;
  if (degree < n) {
    throw ConfigError("polynomial degree " + std::to_string(degree) +
                      " is below the ODE order " + std::to_string(n));
  }
  const int unknowns = degree - n + 1;
  if (static_cast<long>(points.size()) <= unknowns) {
    throw SystemError("collocation system is not overdetermined: " +
                      std::to_string(points.size()) + " points for " +
                      std::to_string(unknowns) + " unknowns");
  }

  CollocationSystem sys;
  sys.column_offset = n;
  sys.matrix.resize(static_cast<Eigen::Index>(points.size()), unknowns);
  sys.rhs.resize(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double t = points[k];
    const auto powers = scaled_powers(t, degree);
    for (int j = n; j <= degree; ++j) {
      double entry = 0.0;
      for (int i = 0; i <= n && i <= j; ++i) {
        entry += problem.linear_coeffs[static_cast<std::size_t>(i)] *
                 powers[static_cast<std::size_t>(j - i)];
      }
      sys.matrix(static_cast<Eigen::Index>(k), j - n) = entry;
    }
    sys.rhs(static_cast<Eigen::Index>(k)) = ic_corrected_forcing(problem, t);
  }
  return sys;
}

Eigen::VectorXd solve_least_squares(const CollocationSystem& system) {
  if (system.matrix.rows() == 0) throw SystemError("empty collocation system");
  if (system.matrix.rows() != system.rhs.size()) {
    throw ContractViolation("matrix rows and rhs length differ");
  }
  // Monomial collocation matrices reach cond ~1e13 at m = 15, where a double
  // solve is only good to ~1e-4 in the coefficients. Factor in extended
  // precision and refine; corrections A^+ r keep the minimum-norm property.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const MatL a = system.matrix.cast<long double>();
  const VecL b = system.rhs.cast<long double>();
  const Eigen::CompleteOrthogonalDecomposition<MatL> cod(a);
  VecL x = cod.solve(b);
  for (int step = 0; step < kRefinementSteps; ++step) {
    const VecL r = b - a * x;
    x += cod.solve(r);
  }
  return x.cast<double>();
}

FactorialPolynomial fit(const OdeProblem& problem, int degree,
                        std::span<const double> points) {
  const auto sys = build_system(problem, degree, points);
  const Eigen::VectorXd free = solve_least_squares(sys);
  FactorialPolynomial p;
  p.coeffs.assign(problem.initial_conditions.begin(), problem.initial_conditions.end());
  for (Eigen::Index q = 0; q < free.size(); ++q) p.coeffs.push_back(free(q));
  return p;
}

Jet eval_factorial_poly(const FactorialPolynomial& p, double t, int order) {
  const int m = p.degree();
  const auto powers = scaled_powers(t, m < 0 ? 0 : m);
  Jet out(order);
  for (int l = 0; l <= order; ++l) {
    double s = 0.0;
    for (int j = l; j <= m; ++j) {
      s += p.coeffs[static_cast<std::size_t>(j)] * powers[static_cast<std::size_t>(j - l)];
    }
    out[l] = s;
  }
  return out;
}

}  // namespace hornerde::polyreg
