#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hornerde/horner.hpp"
#include "hornerde/objective.hpp"
#include "hornerde/problems.hpp"

namespace hornerde {

// P(x, y) = sum_i y^i P_{n-i}(x), evaluated as an outer Horner recursion in y
// whose coefficients are inner Horner polynomials in x. inner_polys[i] has
// degree n - i, so order n carries (n + 1)(n + 2) / 2 coefficients.
class Horner2D {
 public:
  Horner2D() = default;
  explicit Horner2D(std::vector<HornerModel> inner_polys);

  int order() const noexcept { return static_cast<int>(inner_.size()) - 1; }
  const std::vector<HornerModel>& inner_polys() const noexcept { return inner_; }

  std::size_t param_count() const noexcept;
  std::vector<double> get_params() const;
  void set_params(std::span<const double> params);

 private:
  std::vector<HornerModel> inner_;
};

inline constexpr std::size_t horner2d_param_count(int order) {
  return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
}

// All coefficients trainable. With the orthonormal basis each inner polynomial
// is parameterized over [0, x_length].
Horner2D new_horner2d(int order, double x_length, const InitSpec& init, std::uint64_t seed);

double horner2d_eval(const Horner2D& model, double x, double y);

struct Partials2D {
  double u = 0.0;
  double u_x = 0.0;
  double u_xx = 0.0;
  double u_y = 0.0;
};
Partials2D horner2d_partials(const Horner2D& model, double x, double y);

struct CloudPoint {
  double x = 0.0;
  double t = 0.0;
  double target = 0.0;
};

struct PointClouds {
  std::vector<CloudPoint> interior;  // target g(x, t)
  std::vector<CloudPoint> initial;   // t = 0, target f(x)
  std::vector<CloudPoint> left;      // x = 0, target h1(t)
  std::vector<CloudPoint> right;     // x = L, target h2(t)
};

struct CloudSizes {
  int interior = 5000;
  int initial = 2500;
  int left = 2500;
  int right = 2500;
};

PointClouds sample_clouds(const HeatProblem& problem, const CloudSizes& sizes,
                          std::uint64_t seed);

struct HeatWeights {
  double lambda = 0.5;  // initial profile
  double mu = 0.25;     // left boundary
  double nu = 0.25;     // right boundary
};

// Any candidate field u(x, t) with the partials the loss needs.
using HeatField = std::function<Partials2D(double x, double t)>;
double heat_loss(const HeatField& field, const HeatProblem& problem, const PointClouds& clouds,
                 const HeatWeights& weights);
double heat_loss(const Horner2D& model, const HeatProblem& problem, const PointClouds& clouds,
                 const HeatWeights& weights);

// The heat loss is quadratic in the coefficients, so the objective assembles
// one weighted design matrix up front and differentiates through it.
class HeatObjective final : public Objective {
 public:
  HeatObjective(Horner2D model, HeatProblem problem, PointClouds clouds, HeatWeights weights);

  std::size_t param_count() const override { return model_.param_count(); }
  double value(std::span<const double> params) const override;
  double value_and_gradient(std::span<const double> params,
                            std::span<double> grad) const override;

 private:
  Horner2D model_;
  HeatProblem problem_;
  PointClouds clouds_;
  HeatWeights weights_;
  Eigen::MatrixXd design_;  // rows: weighted points, cols: raw coefficients
  Eigen::VectorXd target_;
};

struct GridSample {
  double x = 0.0;
  double t = 0.0;
  double pred = 0.0;
  double exact = 0.0;
};

// Uniform points x points grid over [0, L] x [0, T_max], x-major.
std::vector<GridSample> heat_grid(const Horner2D& model, const HeatProblem& problem,
                                  int points = 101);
double heat_grid_rmse(std::span<const GridSample> grid);

}  // namespace hornerde
