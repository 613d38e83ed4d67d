#include <doctest.h>

#include <cmath>
#include <random>

#include "hornerde/baselines.hpp"
#include "hornerde/errors.hpp"
#include "hornerde/training.hpp"

using namespace hornerde;

namespace {

MlpModel linear(double w, double b) {
  MlpModel m;
  m.widths = {1, 1};
  m.activation = Activation::sigmoid();
  m.params = {w, b};
  return m;
}

}  // namespace

TEST_CASE("parameter counts") {
  const std::vector<int> small{1, 5, 5, 5, 5, 1};
  CHECK(mlp_param_count(small) == 106);
  const std::vector<int> wide{1, 256, 256, 256, 256, 256, 1};
  CHECK(mlp_param_count(wide) == 263937);
  const std::vector<int> hidden{5, 5, 5, 5};
  CHECK(make_baseline(BaselineKind::mlp_sigmoid, hidden, 1).param_count() == 106);
  CHECK(make_baseline(BaselineKind::siren, hidden, 1).param_count() == 106);
  const std::vector<int> wide_hidden(5, 256);
  CHECK(make_baseline(BaselineKind::mlp_lrelu, wide_hidden, 1).param_count() == 263937);
}

TEST_CASE("kind names") {
  for (auto k : {BaselineKind::mlp_sigmoid, BaselineKind::mlp_lrelu, BaselineKind::siren}) {
    CHECK(parse_baseline_kind(to_string(k)) == k);
  }
  CHECK(to_string(BaselineKind::mlp_lrelu) == "mlp-lrelu");
  CHECK_THROWS_AS(parse_baseline_kind("relu"), ConfigError);
}

TEST_CASE("jet forward pass examples") {
  const Jet l = mlp_eval_jet(linear(2.0, 1.0), 0.75, 2);
  CHECK(l[0] == 2.5);
  CHECK(l[1] == 2.0);
  CHECK(l[2] == 0.0);

  const std::vector<int> hidden{5, 5};
  auto z = make_baseline(BaselineKind::mlp_sigmoid, hidden, 3);
  // Zero every weight, keep the biases.
  std::size_t off = 0;
  for (int layer = 0; layer < z.layer_count(); ++layer) {
    const auto in = static_cast<std::size_t>(z.widths[static_cast<std::size_t>(layer)]);
    const auto out = static_cast<std::size_t>(z.widths[static_cast<std::size_t>(layer) + 1]);
    for (std::size_t k = 0; k < in * out; ++k) z.params[off + k] = 0.0;
    off += in * out + out;
  }
  const Jet zj = mlp_eval_jet(z, 1.3, 2);
  CHECK(zj[0] == z.params.back());
  CHECK(zj[1] == 0.0);
  CHECK(zj[2] == 0.0);

  const auto lr = make_baseline(BaselineKind::mlp_lrelu, std::vector<int>{8, 8, 8}, 5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int k = 0; k < 100; ++k) CHECK(mlp_eval_jet(lr, u(rng), 2)[2] == 0.0);
}

TEST_CASE("jet value equals the scalar pass") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  BaselineOptions opt;
  opt.interval = {0.0, 4.0};
  for (auto kind : {BaselineKind::mlp_sigmoid, BaselineKind::mlp_lrelu, BaselineKind::siren}) {
    for (bool norm : {false, true}) {
      opt.normalize_input = norm;
      const auto m = make_baseline(kind, std::vector<int>{5, 5, 5, 5}, 7, opt);
      for (int k = 0; k < 100; ++k) {
        const double t = u(rng);
        CHECK(std::abs(mlp_eval_jet(m, t, 2)[0] - mlp_eval(m, t)) <= 1e-14);
      }
    }
  }
}

TEST_CASE("batched jets match the per-point jets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  BaselineOptions opt;
  opt.interval = {0.0, 4.0};
  for (auto kind : {BaselineKind::mlp_sigmoid, BaselineKind::mlp_lrelu, BaselineKind::siren}) {
    opt.normalize_input = kind == BaselineKind::siren;
    const auto m = make_baseline(kind, std::vector<int>{7, 6, 5}, 11, opt);
    std::vector<double> ts(64);
    for (double& t : ts) t = u(rng);
    for (int order = 0; order <= 2; ++order) {
      const auto batch = mlp_eval_jet_batch(m, ts, order);
      REQUIRE(batch.size() == ts.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const Jet one = mlp_eval_jet(m, ts[i], order);
        for (int d = 0; d <= order; ++d) CHECK(batch[i][d] == doctest::Approx(one[d]).epsilon(1e-13));
      }
    }
  }
  CHECK(mlp_eval_jet_batch(linear(1.0, 0.0), std::vector<double>{}, 2).empty());
  CHECK_THROWS_AS(mlp_eval_jet_batch(linear(1.0, 0.0), std::vector<double>{0.5}, 3), ContractViolation);
}

TEST_CASE("jet derivatives match finite differences of the scalar pass") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  BaselineOptions opt;
  opt.omega0 = 3.0;
  for (auto kind : {BaselineKind::mlp_sigmoid, BaselineKind::siren}) {
    const auto m = make_baseline(kind, std::vector<int>{5, 5, 5, 5}, 4, opt);
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
      const double t = u(rng);
      const Jet j = mlp_eval_jet(m, t, 2);
      const double f0 = mlp_eval(m, t), fp = mlp_eval(m, t + h), fm = mlp_eval(m, t - h);
      const double d1 = (fp - fm) / (2 * h);
      // Wider step for the second difference to stay clear of round-off.
      const double h2 = 1e-3;
      const double d2 = (mlp_eval(m, t + h2) - 2 * f0 + mlp_eval(m, t - h2)) / (h2 * h2);
      CHECK(std::abs(j[1] - d1) <= 1e-4 * std::max(1.0, std::abs(d1)));
      CHECK(std::abs(j[2] - d2) <= 1e-4 * std::max(1.0, std::abs(d2)));
    }
  }
}

TEST_CASE("initialization") {
  const std::vector<int> hidden{5, 5, 5, 5};
  const auto a = make_baseline(BaselineKind::mlp_sigmoid, hidden, 9);
  CHECK(make_baseline(BaselineKind::mlp_sigmoid, hidden, 9).params == a.params);
  CHECK(make_baseline(BaselineKind::mlp_sigmoid, hidden, 10).params != a.params);

  // First layer has fan_in 1: sigmoid bound 1, SIREN weight bound 1.
  for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(a.params[k]) <= 1.0);
  // Second layer weights: fan_in 5.
  for (std::size_t k = 10; k < 35; ++k) CHECK(std::abs(a.params[k]) <= 1.0 / std::sqrt(5.0));

  const auto s = make_baseline(BaselineKind::siren, hidden, 9);
  CHECK(s.activation.kind == ActivationKind::sine);
  for (std::size_t k = 10; k < 35; ++k) CHECK(std::abs(s.params[k]) <= std::sqrt(6.0 / 5.0) / 30.0);
  for (std::size_t k = 35; k < 40; ++k) CHECK(std::abs(s.params[k]) <= 1.0 / std::sqrt(5.0));

  BaselineOptions opt;
  opt.normalize_input = true;
  opt.interval = {0.0, 4.0};
  const auto n = make_baseline(BaselineKind::siren, hidden, 9, opt);
  CHECK(n.input_scale * 0.0 + n.input_shift == doctest::Approx(-1.0));
  CHECK(n.input_scale * 4.0 + n.input_shift == doctest::Approx(1.0));
}

TEST_CASE("soft-IC loss examples") {
  const auto a = make_ode_benchmark(ProblemKind::type_a);
  const std::vector<double> pts{0.5, 1.0, 2.0};
  const std::vector<double> lambda{0.1};

  // x' = 1 with x(0) = 0, and N = t + 1 violates only the IC.
  OdeProblem p;
  p.order = 1;
  p.interval = {0.0, 1.0};
  p.initial_conditions = {0.0};
  p.linear_coeffs = {0.0, 1.0};
  p.forcing = [](double) { return 1.0; };
  CHECK(baseline_loss(linear(1.0, 0.0), p, pts, lambda) == 0.0);
  CHECK(baseline_loss(linear(1.0, 1.0), p, pts, lambda) == doctest::Approx(0.1));

  // N = 2t + 1 on type A: r = 2 + 2(2t + 1) - 1 = 4t + 3; N(0) = x0.
  double expected = 0.0;
  for (double t : pts) expected += (4 * t + 3) * (4 * t + 3);
  CHECK(baseline_loss(linear(2.0, 1.0), a, pts, lambda) == doctest::Approx(expected / 3.0));

  CHECK_THROWS_AS(baseline_loss(linear(1.0, 0.0), a, pts, std::vector<double>{0.1, 0.1}), ConfigError);
}

TEST_CASE("batched gradient agrees with finite differences") {
  struct Case {
    BaselineKind kind;
    ProblemKind problem;
    double omega0;
  };
  const Case cases[] = {{BaselineKind::mlp_sigmoid, ProblemKind::type_a, 30.0},
                        {BaselineKind::mlp_sigmoid, ProblemKind::type_c, 30.0},
                        {BaselineKind::mlp_lrelu, ProblemKind::type_b, 30.0},
                        {BaselineKind::siren, ProblemKind::type_c, 3.0}};
  for (const auto& c : cases) {
    const auto p = make_ode_benchmark(c.problem);
    BaselineOptions opt;
    opt.omega0 = c.omega0;
    opt.interval = p.interval;
    const auto m = make_baseline(c.kind, std::vector<int>{5, 5, 5, 5}, 21, opt);
    const std::vector<double> lambdas(static_cast<std::size_t>(p.order), 0.1);
    const BaselineObjective obj(m, p, sample_collocation(p.interval, 40, 22), lambdas);
    const auto g = loss_gradient(obj, m.params);
    CHECK(obj.value(m.params) == doctest::Approx(baseline_loss(m, p, sample_collocation(p.interval, 40, 22), lambdas)));
    CHECK(gradient_relative_error(g, finite_difference_gradient(obj, m.params)) <= 1e-4);
  }
}
