#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hornerde/errors.hpp"
#include "hornerde/pde2d.hpp"
#include "hornerde/training.hpp"

using namespace hornerde;

namespace {

// a[i][j] multiplies x^j y^i.
Horner2D from_table(const std::vector<std::vector<double>>& a) {
  std::vector<HornerModel> inner;
  for (const auto& row : a) inner.push_back(HornerModel::from_coefficients(row));
  return Horner2D(std::move(inner));
}

std::vector<std::vector<double>> random_table(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    a[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n - i) + 1);
    for (double& v : a[static_cast<std::size_t>(i)]) v = u(rng);
  }
  return a;
}

Horner2D zero_model(int n) {
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) a[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(n - i) + 1, 0.0);
  return from_table(a);
}

}  // namespace

TEST_CASE("horner2d_eval examples") {
  const auto c = from_table({{2.5}});
  CHECK(horner2d_eval(c, 0.3, 0.9) == 2.5);
  CHECK(horner2d_eval(c, -4.0, 7.0) == 2.5);
  const auto xy = from_table({{0.0, 1.0}, {1.0}});
  CHECK(horner2d_eval(xy, 0.25, 0.5) == 0.75);
  const auto r = from_table({{0.7, 1.0, 2.0}, {3.0, 4.0}, {5.0}});
  CHECK(horner2d_eval(r, 0.0, 0.0) == 0.7);
}

TEST_CASE("horner2d_partials examples") {
  const auto xy = from_table({{0.0, 1.0}, {1.0}});
  const auto p = horner2d_partials(xy, 0.3, 0.6);
  CHECK(p.u == doctest::Approx(0.9));
  CHECK(p.u_x == 1.0);
  CHECK(p.u_xx == 0.0);
  CHECK(p.u_y == 1.0);
  const auto sq = from_table({{0.0, 0.0, 1.0}, {0.0, 0.0}, {0.0}});
  for (double x : {-1.0, 0.2, 3.0}) CHECK(horner2d_partials(sq, x, 0.4).u_xx == 2.0);
}

TEST_CASE("partials match finite differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = from_table(random_table(rng, 4));
    const double x = u(rng), y = u(rng);
    const auto p = horner2d_partials(m, x, y);
    const double fx = (horner2d_eval(m, x + h, y) - horner2d_eval(m, x - h, y)) / (2 * h);
    const double fy = (horner2d_eval(m, x, y + h) - horner2d_eval(m, x, y - h)) / (2 * h);
    const double hx = 1e-4;
    const double fxx = (horner2d_eval(m, x + hx, y) - 2 * horner2d_eval(m, x, y) +
                        horner2d_eval(m, x - hx, y)) / (hx * hx);
    CHECK(p.u == horner2d_eval(m, x, y));
    CHECK(p.u_x == doctest::Approx(fx).epsilon(1e-5).scale(1.0));
    CHECK(p.u_y == doctest::Approx(fy).epsilon(1e-5).scale(1.0));
    CHECK(p.u_xx == doctest::Approx(fxx).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("nested evaluation agrees with the double power sum") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n <= 8; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_table(rng, n);
      const auto m = from_table(a);
      const double x = u(rng), y = u(rng);
      long double ref = 0.0L, scale = 0.0L;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
          const long double term = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                                   std::pow(static_cast<long double>(x), j) *
                                   std::pow(static_cast<long double>(y), i);
          ref += term;
          scale += std::abs(term);
        }
      }
      CHECK(std::abs(horner2d_eval(m, x, y) - ref) <= 1e-11L * std::max(std::abs(ref), scale));
    }
  }
}

TEST_CASE("triangular parameter structure") {
  CHECK(horner2d_param_count(8) == 45);
  CHECK(horner2d_param_count(0) == 1);
  const auto m = new_horner2d(8, 1.0, InitSpec{}, 1);
  CHECK(m.order() == 8);
  CHECK(m.param_count() == 45);
  for (int i = 0; i <= 8; ++i) CHECK(m.inner_polys()[static_cast<std::size_t>(i)].degree() == 8 - i);
  auto copy = m;
  std::vector<double> p(45);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.01 * static_cast<double>(k);
  copy.set_params(p);
  CHECK(copy.get_params() == p);
  CHECK_THROWS_AS(copy.set_params(std::vector<double>(44, 0.0)), ContractViolation);
  CHECK_THROWS_AS(Horner2D({HornerModel::from_coefficients({1.0}), HornerModel::from_coefficients({1.0})}),
                  ContractViolation);
  CHECK(new_horner2d(8, 1.0, InitSpec{}, 1).get_params() == m.get_params());
}

TEST_CASE("point clouds") {
  const auto h = make_heat_benchmark();
  const auto c = sample_clouds(h, CloudSizes{}, 3);
  CHECK(c.interior.size() == 5000);
  CHECK(c.initial.size() == 2500);
  CHECK(c.left.size() == 2500);
  CHECK(c.right.size() == 2500);
  for (const auto& p : c.interior) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(p.t >= 0.0);
    CHECK(p.t <= 1.0);
    CHECK(p.target == 0.0);
  }
  for (const auto& p : c.initial) {
    CHECK(p.t == 0.0);
    CHECK(p.target == doctest::Approx(std::sin(std::numbers::pi * p.x)));
  }
  for (const auto& p : c.left) CHECK(p.x == 0.0);
  for (const auto& p : c.right) CHECK(p.x == 1.0);
  const auto d = sample_clouds(h, CloudSizes{}, 3);
  CHECK(d.interior.front().x == c.interior.front().x);
  CHECK(d.right.back().t == c.right.back().t);
  CHECK_THROWS_AS(sample_clouds(h, CloudSizes{0, 1, 1, 1}, 3), ConfigError);
}

TEST_CASE("heat loss examples") {
  const auto h = make_heat_benchmark();
  const auto c = sample_clouds(h, CloudSizes{}, 5);

  const double k = h.diffusivity;
  const double pi = std::numbers::pi;
  const HeatField exact = [&](double x, double t) {
    const double e = std::exp(-k * pi * pi * t);
    return Partials2D{std::sin(pi * x) * e, pi * std::cos(pi * x) * e,
                      -pi * pi * std::sin(pi * x) * e, -k * pi * pi * std::sin(pi * x) * e};
  };
  CHECK(heat_loss(exact, h, c, HeatWeights{}) <= 1e-8);

  const double zero = heat_loss(zero_model(8), h, c, HeatWeights{});
  CHECK(zero == doctest::Approx(0.25).epsilon(0.03));
  double mean_sin2 = 0.0;
  for (const auto& p : c.initial) mean_sin2 += p.target * p.target;
  mean_sin2 /= static_cast<double>(c.initial.size());
  CHECK(zero == doctest::Approx(0.5 * mean_sin2).epsilon(1e-12));

  // Zero PDE residual (u = 1) with all penalty weights switched off.
  const auto one = from_table({{1.0, 0.0}, {0.0}});
  CHECK(heat_loss(one, h, c, HeatWeights{0.0, 0.0, 0.0}) == 0.0);

  PointClouds empty = c;
  empty.interior.clear();
  CHECK_THROWS_AS(heat_loss(one, h, empty, HeatWeights{}), ConfigError);
}

TEST_CASE("heat objective matches the direct loss and its differences") {
  const auto h = make_heat_benchmark();
  const auto c = sample_clouds(h, CloudSizes{400, 200, 200, 200}, 9);
  for (auto basis : {ParamBasis::orthonormal, ParamBasis::monomial}) {
    const auto m = new_horner2d(8, 1.0, InitSpec{0.1, basis}, 2);
    const HeatObjective obj(m, h, c, HeatWeights{});
    const auto p = m.get_params();
    std::vector<double> g(p.size());
    const double v = obj.value_and_gradient(p, g);
    CHECK(v == doctest::Approx(heat_loss(m, h, c, HeatWeights{})).epsilon(1e-10));
    CHECK(v == doctest::Approx(obj.value(p)).epsilon(1e-10));
    const auto fd = finite_difference_gradient(obj, p);
    CHECK(gradient_relative_error(g, fd) <= 1e-4);
  }
}

TEST_CASE("reporting grid") {
  const auto h = make_heat_benchmark();
  const auto m = zero_model(2);
  const auto grid = heat_grid(m, h);
  REQUIRE(grid.size() == 101 * 101);
  CHECK(grid[0].x == 0.0);
  CHECK(grid[0].t == 0.0);
  CHECK(grid[1].x == 0.0);
  CHECK(grid[1].t == doctest::Approx(0.01));
  CHECK(grid[101].x == doctest::Approx(0.01));
  CHECK(grid.back().x == 1.0);
  CHECK(grid.back().t == 1.0);
  for (const auto& s : grid) CHECK(s.pred == 0.0);

  // RMSE of the zero model is the RMS of the exact field on the grid.
  double ss = 0.0;
  for (const auto& s : grid) ss += s.exact * s.exact;
  CHECK(heat_grid_rmse(grid) == doctest::Approx(std::sqrt(ss / static_cast<double>(grid.size()))));
  CHECK(heat_grid(m, h, 11).size() == 121);
}
