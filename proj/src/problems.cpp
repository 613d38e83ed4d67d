#include "hornerde/problems.hpp"

#include <cmath>
#include <numbers>

#include "hornerde/errors.hpp"

namespace hornerde {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::type_a: return "typeA";
    case ProblemKind::type_b: return "typeB";
    case ProblemKind::type_c: return "typeC";
    case ProblemKind::matched: return "matched";
    case ProblemKind::heat: return "heat";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
  for (auto k : {ProblemKind::type_a, ProblemKind::type_b, ProblemKind::type_c,
                 ProblemKind::matched, ProblemKind::heat}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown problem kind '" + std::string(name) + "'");
}

void OdeProblem::validate() const {
  if (order < 1) throw ConfigError("ODE order must be >= 1");
  if (static_cast<int>(initial_conditions.size()) != order) {
    throw ConfigError("need exactly one initial condition per order");
  }
  if (interval.start != 0.0) {
    throw ConfigError("initial conditions are posed at t=0; interval must start there");
  }
  if (!(interval.end > interval.start)) throw ConfigError("degenerate interval");
  if (form == ResidualForm::linear) {
    if (static_cast<int>(linear_coeffs.size()) != order + 1) {
      throw ConfigError("linear problem needs order+1 coefficients");
    }
    if (linear_coeffs.back() == 0.0) {
      throw ConfigError("leading coefficient a_n must be nonzero");
    }
  } else if (!linear_coeffs.empty()) {
    throw ConfigError("nonlinear problem must not carry linear coefficients");
  }
  if (!forcing) throw ConfigError("missing forcing");
}

void HeatProblem::validate() const {
  if (!(diffusivity > 0.0)) throw ConfigError("diffusivity must be positive");
  if (!(length > 0.0)) throw ConfigError("rod length must be positive");
  if (!(t_max > 0.0)) throw ConfigError("time horizon must be positive");
}

OdeProblem make_ode_benchmark(ProblemKind kind) {
  OdeProblem p;
  p.kind = kind;
  switch (kind) {
    case ProblemKind::type_a:
      p.order = 1;
      p.interval = {0.0, 4.0};
      p.initial_conditions = {1.0};
      p.linear_coeffs = {2.0, 1.0};
      p.forcing = [](double) { return 1.0; };
      break;
    case ProblemKind::type_b:
      p.order = 1;
      p.interval = {0.0, 3.0};
      p.initial_conditions = {1.0};
      p.form = ResidualForm::product;
      p.forcing = [](double t) { return t; };
      break;
    case ProblemKind::type_c:
      p.order = 2;
      p.interval = {0.0, 3.0};
      p.initial_conditions = {0.0, 1.0};
      p.linear_coeffs = {13.0, 4.0, 1.0};
      p.forcing = [](double) { return 2.0; };
      break;
    case ProblemKind::matched:
      p.order = 1;
      p.interval = {0.0, 4.0};
      p.initial_conditions = {0.0};
      p.linear_coeffs = {2.0, 1.0};
      p.forcing = [](double t) { return std::exp(-2.0 * t); };
      break;
    case ProblemKind::heat:
      throw ConfigError("heat is a PDE benchmark; use make_heat_benchmark");
  }
  p.validate();
  return p;
}

HeatProblem make_heat_benchmark(double t_max) {
  HeatProblem h;
  h.diffusivity = 0.1;
  h.length = 1.0;
  h.t_max = t_max;
  h.initial_profile = [](double x) { return std::sin(std::numbers::pi * x); };
  h.boundary_left = [](double) { return 0.0; };
  h.boundary_right = [](double) { return 0.0; };
  h.source = [](double, double) { return 0.0; };
  h.validate();
  return h;
}

double residual(const OdeProblem& problem, double t, const Jet& solution) {
  if (solution.order() < problem.order) {
    throw ContractViolation("solution jet order below ODE order");
  }
  const double f = problem.forcing(t);
  if (problem.form == ResidualForm::product) {
    return solution[1] * solution[0] - f;
  }
  double s = 0.0;
  for (int i = 0; i <= problem.order; ++i) {
    s += problem.linear_coeffs[static_cast<std::size_t>(i)] * solution[i];
  }
  return s - f;
}

std::array<double, 3> residual_partials(const OdeProblem& problem, double /*t*/,
                                        const Jet& solution) {
  std::array<double, 3> d{};
  if (problem.form == ResidualForm::product) {
    d[0] = solution[1];
    d[1] = solution[0];
    return d;
  }
  for (int i = 0; i <= problem.order; ++i) {
    d[static_cast<std::size_t>(i)] = problem.linear_coeffs[static_cast<std::size_t>(i)];
  }
  return d;
}

Jet exact_solution(ProblemKind kind, double t, int max_deriv) {
  if (max_deriv < 0 || max_deriv > 2) {
    throw ContractViolation("exact solution derivatives are available up to order 2");
  }
  std::array<double, 3> d{};
  const double e = std::exp(-2.0 * t);
  switch (kind) {
    case ProblemKind::type_a:
      d = {0.5 * (1.0 + e), -e, 2.0 * e};
      break;
    case ProblemKind::type_b: {
      const double r = std::sqrt(t * t + 1.0);
      d = {r, t / r, 1.0 / (r * r * r)};
      break;
    }
    case ProblemKind::type_c: {
      const double s = std::sin(3.0 * t);
      const double c = std::cos(3.0 * t);
      d = {2.0 / 13.0 + e * (3.0 / 13.0 * s - 2.0 / 13.0 * c), e * c,
           -e * (2.0 * c + 3.0 * s)};
      break;
    }
    case ProblemKind::matched:
      d = {t * e, e * (1.0 - 2.0 * t), e * (4.0 * t - 4.0)};
      break;
    case ProblemKind::heat:
      throw ConfigError("heat exact solution takes (x, t); use heat_exact");
  }
  Jet j(max_deriv);
  for (int i = 0; i <= max_deriv; ++i) j[i] = d[static_cast<std::size_t>(i)];
  return j;
}

double heat_exact(const HeatProblem& problem, double x, double t) {
  constexpr double pi = std::numbers::pi;
  return std::sin(pi * x) * std::exp(-problem.diffusivity * pi * pi * t);
}

}  // namespace hornerde
