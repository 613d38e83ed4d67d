#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hornerde/errors.hpp"
#include "hornerde/problems.hpp"

using namespace hornerde;

namespace {

constexpr ProblemKind kOdeKinds[] = {ProblemKind::type_a, ProblemKind::type_b, ProblemKind::type_c,
                                     ProblemKind::matched};

}  // namespace

TEST_CASE("benchmark definitions") {
  const auto a = make_ode_benchmark(ProblemKind::type_a);
  CHECK(a.order == 1);
  CHECK(a.forcing(1.7) == 1.0);
  CHECK(a.interval.end == 4.0);
  CHECK(a.linear_coeffs == std::vector<double>{2, 1});

  const auto b = make_ode_benchmark(ProblemKind::type_b);
  CHECK(b.form == ResidualForm::product);
  CHECK(b.interval.end == 3.0);
  CHECK(b.initial_conditions == std::vector<double>{1});

  const auto c = make_ode_benchmark(ProblemKind::type_c);
  CHECK(c.initial_conditions == std::vector<double>{0, 1});
  CHECK(c.linear_coeffs == std::vector<double>{13, 4, 1});
  CHECK(c.forcing(0.4) == 2.0);

  const auto m = make_ode_benchmark(ProblemKind::matched);
  CHECK(m.forcing(0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(m.initial_conditions == std::vector<double>{0});

  const auto h = make_heat_benchmark();
  CHECK(h.diffusivity == 0.1);
  CHECK(h.length == 1.0);
  CHECK(h.t_max == 1.0);
  CHECK(h.initial_profile(0.5) == doctest::Approx(1.0));
  CHECK(h.boundary_left(0.3) == 0.0);
  CHECK(h.boundary_right(0.3) == 0.0);

  CHECK_THROWS_AS(make_ode_benchmark(ProblemKind::heat), ConfigError);
  CHECK_THROWS_AS(parse_problem_kind("typeD"), ConfigError);
}

TEST_CASE("problem names round-trip") {
  for (auto k : {ProblemKind::type_a, ProblemKind::type_b, ProblemKind::type_c,
                 ProblemKind::matched, ProblemKind::heat}) {
    CHECK(parse_problem_kind(to_string(k)) == k);
  }
  CHECK(to_string(ProblemKind::type_a) == "typeA");
  CHECK(to_string(ProblemKind::matched) == "matched");
}

TEST_CASE("problem validation") {
  auto p = make_ode_benchmark(ProblemKind::type_c);
  p.initial_conditions = {0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = make_ode_benchmark(ProblemKind::type_a);
  p.interval.start = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = make_ode_benchmark(ProblemKind::type_a);
  p.linear_coeffs = {2, 0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  auto h = make_heat_benchmark();
  h.diffusivity = 0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("residual examples") {
  const auto a = make_ode_benchmark(ProblemKind::type_a);
  CHECK(residual(a, 0.0, Jet{1, -1}) == doctest::Approx(0.0));
  const auto b = make_ode_benchmark(ProblemKind::type_b);
  CHECK(residual(b, 1.0, Jet{2, 1}) == doctest::Approx(1.0));
  const auto c = make_ode_benchmark(ProblemKind::type_c);
  for (double t : {0.0, 0.3, 1.7, 2.9}) {
    CHECK(std::abs(residual(c, t, exact_solution(ProblemKind::type_c, t, 2))) <= 1e-10);
  }
  CHECK_THROWS_AS(residual(c, 0.5, Jet{0, 1}), ContractViolation);
}

TEST_CASE("exact solution examples") {
  const Jet a0 = exact_solution(ProblemKind::type_a, 0.0, 2);
  CHECK(a0[0] == doctest::Approx(1));
  CHECK(a0[1] == doctest::Approx(-1));
  CHECK(a0[2] == doctest::Approx(2));
  const Jet b0 = exact_solution(ProblemKind::type_b, 0.0, 1);
  CHECK(b0[0] == 1.0);
  CHECK(b0[1] == 0.0);
  CHECK(exact_solution(ProblemKind::type_a, 4.0, 0)[0] ==
        doctest::Approx(0.5 * (1.0 + std::exp(-8.0))).epsilon(1e-15));
  CHECK(exact_solution(ProblemKind::type_a, 4.0, 0)[0] == doctest::Approx(0.5001677).epsilon(1e-7));
  CHECK_THROWS_AS(exact_solution(ProblemKind::type_a, 1.0, 3), ContractViolation);
}

TEST_CASE("exact solutions satisfy their ODEs and initial conditions") {
  std::mt19937_64 rng(1);
  for (auto kind : kOdeKinds) {
    const auto p = make_ode_benchmark(kind);
    std::uniform_real_distribution<double> u(p.interval.start, p.interval.end);
    for (int k = 0; k < 1000; ++k) {
      const double t = u(rng);
      CHECK(std::abs(residual(p, t, exact_solution(kind, t, 2))) <= 1e-9);
    }
    const Jet at0 = exact_solution(kind, 0.0, 2);
    for (int i = 0; i < p.order; ++i) {
      CHECK(at0[i] == doctest::Approx(p.initial_conditions[static_cast<std::size_t>(i)]).scale(1.0));
    }
  }
}

TEST_CASE("exact derivatives match central differences") {
  const double h = 1e-5;
  for (auto kind : kOdeKinds) {
    const auto p = make_ode_benchmark(kind);
    for (double t = 0.05; t < p.interval.end; t += 0.173) {
      const Jet e = exact_solution(kind, t, 2);
      const double v_up = exact_solution(kind, t + h, 0)[0];
      const double v_dn = exact_solution(kind, t - h, 0)[0];
      const double d_up = exact_solution(kind, t + h, 1)[1];
      const double d_dn = exact_solution(kind, t - h, 1)[1];
      const double fd1 = (v_up - v_dn) / (2 * h);
      const double fd2 = (d_up - d_dn) / (2 * h);
      CHECK(std::abs(e[1] - fd1) <= 1e-5 * std::max(1.0, std::abs(e[1])));
      CHECK(std::abs(e[2] - fd2) <= 1e-5 * std::max(1.0, std::abs(e[2])));
    }
  }
}

TEST_CASE("type B takes the positive branch") {
  const auto p = make_ode_benchmark(ProblemKind::type_b);
  for (double t = 0.0; t <= p.interval.end; t += 0.01) {
    CHECK(exact_solution(ProblemKind::type_b, t, 0)[0] > 0.0);
  }
}

TEST_CASE("residual partials match differences of the residual") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto kind : kOdeKinds) {
    const auto p = make_ode_benchmark(kind);
    for (int trial = 0; trial < 20; ++trial) {
      const double t = std::abs(u(rng));
      Jet x(2);
      for (int k = 0; k <= 2; ++k) x[k] = u(rng);
      const auto s = residual_partials(p, t, x);
      for (int i = 0; i <= p.order; ++i) {
        Jet up = x, dn = x;
        up[i] += 1e-6;
        dn[i] -= 1e-6;
        const double fd = (residual(p, t, up) - residual(p, t, dn)) / 2e-6;
        CHECK(s[static_cast<std::size_t>(i)] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("heat solution satisfies the PDE and boundary data") {
  const auto h = make_heat_benchmark();
  const double e = 1e-4;
  for (double x = 0.1; x < 1.0; x += 0.2) {
    for (double t = 0.1; t < 1.0; t += 0.2) {
      const double ut = (heat_exact(h, x, t + e) - heat_exact(h, x, t - e)) / (2 * e);
      const double uxx =
          (heat_exact(h, x + e, t) - 2 * heat_exact(h, x, t) + heat_exact(h, x - e, t)) / (e * e);
      CHECK(std::abs(ut - h.diffusivity * uxx) <= 1e-6);
    }
  }
  CHECK(heat_exact(h, 0.3, 0.0) == doctest::Approx(std::sin(std::numbers::pi * 0.3)));
  CHECK(std::abs(heat_exact(h, 0.0, 0.5)) <= 1e-15);
  CHECK(std::abs(heat_exact(h, 1.0, 0.5)) <= 1e-15);
}
