#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hornerde/jet.hpp"

namespace hornerde {

enum class ProblemKind { type_a, type_b, type_c, matched, heat };

// "typeA", "typeB", "typeC", "matched", "heat".
std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view name);

struct Interval {
  double start = 0.0;
  double end = 1.0;
  double length() const noexcept { return end - start; }
  bool contains(double t) const noexcept { return t >= start && t <= end; }
};

enum class ResidualForm {
  linear,   // sum_i a_i x^(i) - f(t)
  product,  // x' x - f(t), f(t) = t
};

using ScalarFunction = std::function<double(double)>;

struct OdeProblem {
  ProblemKind kind = ProblemKind::type_a;
  int order = 1;
  Interval interval;
  std::vector<double> initial_conditions;  // x^(i)(0), i < order
  ResidualForm form = ResidualForm::linear;
  std::vector<double> linear_coeffs;  // a_0..a_n, empty unless linear
  ScalarFunction forcing;

  // Throws ConfigError if the invariants do not hold.
  void validate() const;
  bool is_linear() const noexcept { return form == ResidualForm::linear; }
};

struct HeatProblem {
  double diffusivity = 0.1;
  double length = 1.0;
  double t_max = 1.0;
  ScalarFunction initial_profile;
  ScalarFunction boundary_left;
  ScalarFunction boundary_right;
  // g(x, t); the benchmark is homogeneous.
  std::function<double(double, double)> source;

  void validate() const;
};

OdeProblem make_ode_benchmark(ProblemKind kind);
HeatProblem make_heat_benchmark(double t_max = 1.0);

// F(t, x, ..., x^(n)) - f(t). The jet must carry at least `order` derivatives.
double residual(const OdeProblem& problem, double t, const Jet& solution);

// d residual / d x^(i) for i = 0..2, evaluated at the given jet.
std::array<double, 3> residual_partials(const OdeProblem& problem, double t,
                                        const Jet& solution);

// Closed-form solution with analytic derivatives up to max_deriv (<= 2).
Jet exact_solution(ProblemKind kind, double t, int max_deriv);

// u(x, t) = sin(pi x) exp(-k pi^2 t) for the heat benchmark.
double heat_exact(const HeatProblem& problem, double x, double t);

}  // namespace hornerde
