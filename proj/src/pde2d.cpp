#include "hornerde/pde2d.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hornerde/errors.hpp"

namespace hornerde {

Horner2D::Horner2D(std::vector<HornerModel> inner_polys) : inner_(std::move(inner_polys)) {
  if (inner_.empty()) throw ContractViolation("Horner2D needs at least one inner polynomial");
  const int n = order();
  for (int i = 0; i <= n; ++i) {
    if (inner_[static_cast<std::size_t>(i)].degree() != n - i) {
      throw ContractViolation("inner polynomial " + std::to_string(i) + " must have degree " +
                              std::to_string(n - i));
    }
  }
}

std::size_t Horner2D::param_count() const noexcept {
  std::size_t total = 0;
  for (const auto& p : inner_) total += static_cast<std::size_t>(p.trainable_count());
  return total;
}

std::vector<double> Horner2D::get_params() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const auto& p : inner_) out.insert(out.end(), p.params().begin(), p.params().end());
  return out;
}

void Horner2D::set_params(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw ContractViolation("Horner2D parameter vector has the wrong length");
  }
  std::size_t offset = 0;
  for (auto& p : inner_) {
    const auto k = static_cast<std::size_t>(p.trainable_count());
    p.set_params(params.subspan(offset, k));
    offset += k;
  }
}

Horner2D new_horner2d(int order, double x_length, const InitSpec& init, std::uint64_t seed) {
  if (order < 0) throw ConfigError("Horner2D order must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, init.stddev);
  std::vector<HornerModel> inner;
  for (int i = 0; i <= order; ++i) {
    const int degree = order - i;
    const int k = degree + 1;
    Eigen::MatrixXd basis = init.basis == ParamBasis::orthonormal
                                ? orthonormal_basis({0.0, x_length}, 0, degree)
                                : Eigen::MatrixXd::Identity(k, k);
    std::vector<double> params(static_cast<std::size_t>(k));
    for (double& p : params) p = init.stddev > 0.0 ? normal(rng) : 0.0;
    inner.emplace_back(std::vector<double>{}, std::move(basis), std::move(params));
  }
  return Horner2D(std::move(inner));
}

double horner2d_eval(const Horner2D& model, double x, double y) {
  const auto& inner = model.inner_polys();
  double z = inner.back().eval(x);
  for (std::size_t i = inner.size() - 1; i-- > 0;) z = inner[i].eval(x) + y * z;
  return z;
}

Partials2D horner2d_partials(const Horner2D& model, double x, double y) {
  const auto& inner = model.inner_polys();
  // Outer recursion over order-2 jets in x (y constant) and order-1 jets in y.
  const Jet ty = Jet::variable(y, 1);
  Jet zx = inner.back().eval_jet(x, 2);
  Jet zy = Jet::constant(zx[0], 1);
  for (std::size_t i = inner.size() - 1; i-- > 0;) {
    const Jet px = inner[i].eval_jet(x, 2);
    zx = px + zx * y;
    zy = multiply_add(px[0], ty, zy);
  }
  return {zx[0], zx[1], zx[2], zy[1]};
}

PointClouds sample_clouds(const HeatProblem& problem, const CloudSizes& sizes,
                          std::uint64_t seed) {
  problem.validate();
  if (sizes.interior < 1 || sizes.initial < 1 || sizes.left < 1 || sizes.right < 1) {
    throw ConfigError("every point cloud needs at least one point");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, problem.length);
  std::uniform_real_distribution<double> ut(0.0, problem.t_max);
  PointClouds c;
  c.interior.reserve(static_cast<std::size_t>(sizes.interior));
  for (int k = 0; k < sizes.interior; ++k) {
    const double x = ux(rng);
    const double t = ut(rng);
    c.interior.push_back({x, t, problem.source(x, t)});
  }
  for (int k = 0; k < sizes.initial; ++k) {
    const double x = ux(rng);
    c.initial.push_back({x, 0.0, problem.initial_profile(x)});
  }
  for (int k = 0; k < sizes.left; ++k) {
    const double t = ut(rng);
    c.left.push_back({0.0, t, problem.boundary_left(t)});
  }
  for (int k = 0; k < sizes.right; ++k) {
    const double t = ut(rng);
    c.right.push_back({problem.length, t, problem.boundary_right(t)});
  }
  return c;
}

namespace {

double mean_sq_fit(const HeatField& field, const std::vector<CloudPoint>& cloud) {
  if (cloud.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : cloud) {
    const double d = field(p.x, p.t).u - p.target;
    sum += d * d;
  }
  return sum / static_cast<double>(cloud.size());
}

}  // namespace

double heat_loss(const HeatField& field, const HeatProblem& problem, const PointClouds& clouds,
                 const HeatWeights& weights) {
  if (clouds.interior.empty()) throw ConfigError("empty interior point cloud");
  double pde = 0.0;
  for (const auto& p : clouds.interior) {
    const Partials2D d = field(p.x, p.t);
    const double r = d.u_y - problem.diffusivity * d.u_xx - p.target;
    pde += r * r;
  }
  pde /= static_cast<double>(clouds.interior.size());
  return pde + weights.lambda * mean_sq_fit(field, clouds.initial) +
         weights.mu * mean_sq_fit(field, clouds.left) +
         weights.nu * mean_sq_fit(field, clouds.right);
}

double heat_loss(const Horner2D& model, const HeatProblem& problem, const PointClouds& clouds,
                 const HeatWeights& weights) {
  return heat_loss([&model](double x, double t) { return horner2d_partials(model, x, t); },
                   problem, clouds, weights);
}

HeatObjective::HeatObjective(Horner2D model, HeatProblem problem, PointClouds clouds,
                             HeatWeights weights)
    : model_(std::move(model)),
      problem_(std::move(problem)),
      clouds_(std::move(clouds)),
      weights_(weights) {
  if (clouds_.interior.empty()) throw ConfigError("empty interior point cloud");
  const int n = model_.order();
  const auto cols = static_cast<Eigen::Index>(horner2d_param_count(n));
  std::vector<Eigen::Index> offset(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) offset[static_cast<std::size_t>(i)] = offset[static_cast<std::size_t>(i) - 1] + (n - i + 2);

  const auto rows = static_cast<Eigen::Index>(clouds_.interior.size() + clouds_.initial.size() +
                                               clouds_.left.size() + clouds_.right.size());
  design_.setZero(rows, cols);
  target_.setZero(rows);
  const double k = problem_.diffusivity;
  std::vector<double> xp(static_cast<std::size_t>(n) + 1), yp(static_cast<std::size_t>(n) + 1);
  auto powers = [n](double v, std::vector<double>& out) {
    out[0] = 1.0;
    for (int p = 1; p <= n; ++p) out[static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(p) - 1] * v;
  };

  Eigen::Index row = 0;
  const double wi = std::sqrt(1.0 / static_cast<double>(clouds_.interior.size()));
  for (const auto& p : clouds_.interior) {
    powers(p.x, xp);
    powers(p.t, yp);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n - i; ++j) {
        double v = 0.0;
        if (i >= 1) v += i * yp[static_cast<std::size_t>(i) - 1] * xp[static_cast<std::size_t>(j)];
        if (j >= 2) v -= k * j * (j - 1) * xp[static_cast<std::size_t>(j) - 2] * yp[static_cast<std::size_t>(i)];
        design_(row, offset[static_cast<std::size_t>(i)] + j) = wi * v;
      }
    }
    target_(row++) = wi * p.target;
  }
  auto add_fit_rows = [&](const std::vector<CloudPoint>& cloud, double weight) {
    if (cloud.empty()) return;
    const double w = std::sqrt(weight / static_cast<double>(cloud.size()));
    for (const auto& p : cloud) {
      powers(p.x, xp);
      powers(p.t, yp);
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
          design_(row, offset[static_cast<std::size_t>(i)] + j) =
              w * xp[static_cast<std::size_t>(j)] * yp[static_cast<std::size_t>(i)];
        }
      }
      target_(row++) = w * p.target;
    }
  };
  add_fit_rows(clouds_.initial, weights_.lambda);
  add_fit_rows(clouds_.left, weights_.mu);
  add_fit_rows(clouds_.right, weights_.nu);
}

double HeatObjective::value(std::span<const double> params) const {
  Horner2D m = model_;
  m.set_params(params);
  return heat_loss(m, problem_, clouds_, weights_);
}

double HeatObjective::value_and_gradient(std::span<const double> params,
                                         std::span<double> grad) const {
  Horner2D m = model_;
  m.set_params(params);
  Eigen::VectorXd coeffs(design_.cols());
  Eigen::Index c = 0;
  for (const auto& p : m.inner_polys()) {
    for (double a : p.coeffs()) coeffs(c++) = a;
  }
  const Eigen::VectorXd resid = design_ * coeffs - target_;
  const Eigen::VectorXd raw_grad = 2.0 * (design_.transpose() * resid);

  std::size_t out = 0;
  Eigen::Index in = 0;
  for (const auto& p : m.inner_polys()) {
    const auto k = static_cast<std::size_t>(p.trainable_count());
    p.free_to_param_gradient(std::span<const double>(raw_grad.data() + in, k), grad.subspan(out, k));
    out += k;
    in += static_cast<Eigen::Index>(k);
  }
  return resid.squaredNorm();
}

std::vector<GridSample> heat_grid(const Horner2D& model, const HeatProblem& problem, int points) {
  if (points < 2) throw ConfigError("heat grid needs at least two points per axis");
  std::vector<GridSample> grid;
  grid.reserve(static_cast<std::size_t>(points) * static_cast<std::size_t>(points));
  for (int a = 0; a < points; ++a) {
    const double x = problem.length * a / (points - 1);
    for (int b = 0; b < points; ++b) {
      const double t = problem.t_max * b / (points - 1);
      grid.push_back({x, t, horner2d_eval(model, x, t), heat_exact(problem, x, t)});
    }
  }
  return grid;
}

double heat_grid_rmse(std::span<const GridSample> grid) {
  if (grid.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& g : grid) sum += (g.pred - g.exact) * (g.pred - g.exact);
  return std::sqrt(sum / static_cast<double>(grid.size()));
}

}  // namespace hornerde
