#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hornerde/errors.hpp"
#include "hornerde/horner.hpp"

using namespace hornerde;

namespace {

long double naive_sum(const std::vector<double>& a, double t) {
  long double s = 0.0L;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::pow(static_cast<long double>(t), static_cast<long double>(j));
  return s;
}

}  // namespace

TEST_CASE("horner_eval examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(horner_eval(a, 2.0) == 17.0);
  const std::vector<double> b{4.5, -2, 7, 1};
  CHECK(horner_eval(b, 0.0) == 4.5);
  const std::vector<double> c{0, 0, 0, 0, 0, 1};
  CHECK(horner_eval(c, 2.0) == 32.0);
  CHECK(horner_eval(std::vector<double>{}, 3.0) == 0.0);
}

TEST_CASE("Horner agrees with the naive power sum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-10.0, 10.0);
  std::uniform_real_distribution<double> tdist(-10.0, 10.0);
  int checked = 0;
  for (int degree = 0; degree <= 20; ++degree) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(static_cast<std::size_t>(degree) + 1);
      for (double& v : a) v = coef(rng);
      const double t = tdist(rng);
      const long double ref = naive_sum(a, t);
      const double h = horner_eval(a, t);
      CHECK(std::abs(static_cast<long double>(h) - ref) <= 1e-12L * std::abs(ref));
      ++checked;
    }
  }
  CHECK(checked == 21 * 50);
}

TEST_CASE("horner_eval_jet examples") {
  const std::vector<double> a{1, 0, 1};
  const Jet j = horner_eval_jet(a, 3.0, 2);
  CHECK(j[0] == 10.0);
  CHECK(j[1] == 6.0);
  CHECK(j[2] == 2.0);
  const Jet c = horner_eval_jet(std::vector<double>{0.25}, 1.5, 1);
  CHECK(c[0] == 0.25);
  CHECK(c[1] == 0.0);
}

TEST_CASE("Horner jets match analytic monomial derivatives") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> tdist(-1.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(9);
    for (double& v : a) v = coef(rng);
    const double t = tdist(rng);
    double d[3] = {0, 0, 0};
    for (int j = 0; j <= 8; ++j) {
      const double aj = a[static_cast<std::size_t>(j)];
      d[0] += aj * std::pow(t, j);
      if (j >= 1) d[1] += aj * j * std::pow(t, j - 1);
      if (j >= 2) d[2] += aj * j * (j - 1) * std::pow(t, j - 2);
    }
    const Jet h = horner_eval_jet(a, t, 2);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(h[k] - d[k]) <= 1e-11);
  }
}

TEST_CASE("new_horner embeds the initial conditions") {
  const auto a = make_ode_benchmark(ProblemKind::type_a);
  const auto m = new_horner(a, 10, InitSpec{}, 1);
  CHECK(m.degree() == 10);
  CHECK(m.fixed_count() == 1);
  CHECK(m.trainable_count() == 10);
  CHECK(m.coeffs()[0] == 1.0);
  CHECK(m.eval(0.0) == 1.0);

  const auto c = make_ode_benchmark(ProblemKind::type_c);
  const auto mc = new_horner(c, 13, InitSpec{}, 1);
  CHECK(mc.degree() == 14);
  CHECK(mc.coeffs()[0] == 0.0);
  CHECK(mc.coeffs()[1] == 1.0);
  const Jet at0 = mc.eval_jet(0.0, 1);
  CHECK(at0[0] == 0.0);
  CHECK(at0[1] == 1.0);

  const auto m2 = new_horner(a, 10, InitSpec{}, 1);
  CHECK(std::vector<double>(m.coeffs().begin(), m.coeffs().end()) ==
        std::vector<double>(m2.coeffs().begin(), m2.coeffs().end()));
  const auto m3 = new_horner(a, 10, InitSpec{}, 2);
  CHECK(get_params(m3) != get_params(m));
  CHECK_THROWS_AS(new_horner(a, 0, InitSpec{}, 1), ConfigError);

  for (auto basis : {ParamBasis::monomial, ParamBasis::orthonormal}) {
    const auto z = new_horner(c, 5, InitSpec{0.0, basis}, 3);
    for (double p : z.params()) CHECK(p == 0.0);
    CHECK(z.trainable_count() + z.fixed_count() == z.degree() + 1);
  }
}

TEST_CASE("parameter round trip leaves frozen coefficients alone") {
  const auto a = make_ode_benchmark(ProblemKind::type_a);
  auto m = new_horner(a, 10, InitSpec{0.1, ParamBasis::orthonormal}, 4);
  const auto before = std::vector<double>(m.coeffs().begin(), m.coeffs().end());
  const auto p = get_params(m);
  CHECK(p.size() == 10);
  set_params(m, p);
  CHECK(std::vector<double>(m.coeffs().begin(), m.coeffs().end()) == before);

  std::vector<double> q(10, 3.0);
  set_params(m, q);
  CHECK(m.coeffs()[0] == 1.0);
  CHECK(get_params(m) == q);
  CHECK_THROWS_AS(set_params(m, std::vector<double>(9, 0.0)), ContractViolation);
}

TEST_CASE("monomial basis maps parameters straight to coefficients") {
  const auto c = make_ode_benchmark(ProblemKind::type_c);
  auto m = new_horner(c, 3, InitSpec{0.0, ParamBasis::monomial}, 1);
  m.set_params(std::vector<double>{0.5, -0.25, 2.0});
  CHECK(std::vector<double>(m.coeffs().begin(), m.coeffs().end()) ==
        std::vector<double>{0.0, 1.0, 0.5, -0.25, 2.0});
}

TEST_CASE("orthonormal basis is orthonormal on its grid") {
  const Interval iv{0.0, 4.0};
  const int first = 1, last = 10;
  const Eigen::MatrixXd b = orthonormal_basis(iv, first, last);
  REQUIRE(b.rows() == 10);
  const int grid = std::max(1000, 40 * (last + 1));
  Eigen::MatrixXd v(grid, last - first + 1);
  for (int g = 0; g < grid; ++g) {
    const double t = iv.start + iv.length() * g / (grid - 1);
    for (int q = 0; q <= last - first; ++q) v(g, q) = std::pow(t, first + q);
  }
  const Eigen::MatrixXd gram = (v * b).transpose() * (v * b) / grid;
  CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK_THROWS_AS(orthonormal_basis(iv, 3, 2), ContractViolation);
  CHECK_THROWS_AS(orthonormal_basis({1.0, 1.0}, 0, 2), ConfigError);
}

TEST_CASE("serialization layout") {
  const auto m = HornerModel::from_coefficients({1.0, 2.0, 3.0}, 1);
  CHECK(m.serialize() == std::vector<double>{2, 1, 1, 2, 3});
  CHECK(m.trainable_count() == 2);
}

TEST_CASE("free-coefficient pullback matches finite differences") {
  const auto c = make_ode_benchmark(ProblemKind::type_c);
  auto m = new_horner(c, 6, InitSpec{0.3, ParamBasis::monomial}, 8);
  const double t = 0.8;
  const double adj[3] = {0.7, -1.3, 0.4};
  std::vector<double> g(6, 0.0);
  m.accumulate_free_gradient(t, adj, g);
  const auto p = get_params(m);
  for (std::size_t q = 0; q < p.size(); ++q) {
    auto up = p, dn = p;
    up[q] += 1e-6;
    dn[q] -= 1e-6;
    auto f = [&](const std::vector<double>& x) {
      m.set_params(x);
      const Jet j = m.eval_jet(t, 2);
      return adj[0] * j[0] + adj[1] * j[1] + adj[2] * j[2];
    };
    CHECK(g[q] == doctest::Approx((f(up) - f(dn)) / 2e-6).epsilon(1e-6));
  }
}
