#include "hornerde/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hornerde/errors.hpp"
#include "hornerde/training.hpp"

namespace hornerde {
namespace {

double penalty_value(PenaltyNorm norm, double d) {
  return norm == PenaltyNorm::absolute ? std::abs(d) : d * d;
}

// d penalty / d jump; the absolute value uses sign(0) = 0.
double penalty_slope(PenaltyNorm norm, double d) {
  if (norm == PenaltyNorm::squared) return 2.0 * d;
  return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
}

}  // namespace

PiecewiseModel::PiecewiseModel(std::vector<double> knots, std::vector<HornerModel> segments,
                               IcMode ic_mode, PiecewiseWeights weights)
    : knots_(std::move(knots)),
      segments_(std::move(segments)),
      ic_mode_(ic_mode),
      weights_(std::move(weights)) {
  if (knots_.size() < 2) throw ConfigError("need at least two knots");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw ConfigError("knots must be strictly increasing");
  }
  if (segments_.size() != knots_.size() - 1) {
    throw ConfigError("segment count must equal the number of subintervals");
  }
  const std::size_t interior = knots_.size() - 2;
  if (weights_.mu.size() != interior || weights_.nu.size() != interior) {
    throw ConfigError("need one mu and one nu per interior knot");
  }
}

int PiecewiseModel::segment_index(double t) const {
  if (!(t >= knots_.front() && t <= knots_.back())) {
    throw DomainError("t = " + std::to_string(t) + " lies outside the partitioned interval");
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const int j = static_cast<int>(it - knots_.begin()) - 1;
  return std::min(j, segment_count() - 1);
}

double PiecewiseModel::eval(double t) const {
  return segments_[static_cast<std::size_t>(segment_index(t))].eval(t);
}

Jet PiecewiseModel::eval_jet(double t, int order) const {
  return segments_[static_cast<std::size_t>(segment_index(t))].eval_jet(t, order);
}

std::size_t PiecewiseModel::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : segments_) n += static_cast<std::size_t>(s.trainable_count());
  return n;
}

std::vector<double> PiecewiseModel::get_params() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const auto& s : segments_) out.insert(out.end(), s.params().begin(), s.params().end());
  return out;
}

void PiecewiseModel::set_params(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw ContractViolation("piecewise parameter vector has the wrong length");
  }
  std::size_t offset = 0;
  for (auto& s : segments_) {
    const auto k = static_cast<std::size_t>(s.trainable_count());
    s.set_params(params.subspan(offset, k));
    offset += k;
  }
}

PiecewiseModel new_piecewise(const OdeProblem& problem, const PiecewiseSpec& spec,
                             const InitSpec& init, std::uint64_t seed) {
  if (spec.segment_params < 1) throw ConfigError("segments need at least one parameter");
  if (spec.knots.size() < 2) throw ConfigError("need at least two knots");
  if (spec.knots.front() != problem.interval.start || spec.knots.back() != problem.interval.end) {
    throw ConfigError("knots must span the problem interval exactly");
  }
  std::vector<HornerModel> segments;
  const std::size_t l = spec.knots.size() - 1;
  for (std::size_t j = 0; j < l; ++j) {
    const bool embeds_ic = j == 0 && spec.ic_mode == IcMode::hard;
    std::vector<double> fixed;
    if (embeds_ic) fixed = problem.initial_conditions;
    const int first = static_cast<int>(fixed.size());
    const int degree = first + spec.segment_params - 1;
    Eigen::MatrixXd basis = init.basis == ParamBasis::orthonormal
                                ? orthonormal_basis({spec.knots[j], spec.knots[j + 1]}, first, degree)
                                : Eigen::MatrixXd::Identity(spec.segment_params, spec.segment_params);
    // Seed per segment so each subinterval's init is independent of the segment count.
    HornerModel proto = new_horner(problem, spec.segment_params, init, seed + 7919 * j);
    std::vector<double> params(proto.params().begin(), proto.params().end());
    segments.emplace_back(std::move(fixed), std::move(basis), std::move(params));
  }
  PiecewiseWeights w;
  w.lambda0 = spec.lambda0;
  w.mu.assign(l - 1, spec.mu);
  w.nu.assign(l - 1, spec.nu);
  w.norm = spec.norm;
  return PiecewiseModel(spec.knots, std::move(segments), spec.ic_mode, std::move(w));
}

PiecewiseModel single_segment(const HornerModel& model, Interval interval) {
  return PiecewiseModel({interval.start, interval.end}, {model},
                        model.fixed_count() > 0 ? IcMode::hard : IcMode::soft, PiecewiseWeights{});
}

double continuity_penalty(const PiecewiseModel& model) {
  const auto& segs = model.segments();
  const auto& w = model.weights();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
    const double c = model.knots()[j + 1];
    const Jet left = segs[j].eval_jet(c, 1);
    const Jet right = segs[j + 1].eval_jet(c, 1);
    total += w.mu[j] * penalty_value(w.norm, left[0] - right[0]);
    total += w.nu[j] * penalty_value(w.norm, left[1] - right[1]);
  }
  return total;
}

double ic_penalty(const PiecewiseModel& model, const OdeProblem& problem) {
  if (model.ic_mode() == IcMode::hard) return 0.0;
  const double n0 = model.segments().front().eval(problem.interval.start);
  return model.weights().lambda0 * penalty_value(model.weights().norm, n0 - problem.initial_conditions[0]);
}

double piecewise_loss(const PiecewiseModel& model, const OdeProblem& problem,
                      std::span<const double> points) {
  const double r = residual_loss([&model](double t, int k) { return model.eval_jet(t, k); },
                                 problem, points);
  return r + ic_penalty(model, problem) + continuity_penalty(model);
}

KnotJumps knot_jumps(const PiecewiseModel& model) {
  KnotJumps out;
  const auto& segs = model.segments();
  for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
    const double c = model.knots()[j + 1];
    const Jet left = segs[j].eval_jet(c, 1);
    const Jet right = segs[j + 1].eval_jet(c, 1);
    out.value.push_back(std::abs(left[0] - right[0]));
    out.slope.push_back(std::abs(left[1] - right[1]));
  }
  return out;
}

PiecewiseObjective::PiecewiseObjective(PiecewiseModel model, OdeProblem problem,
                                       std::vector<double> points)
    : model_(std::move(model)), problem_(std::move(problem)), points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("empty collocation set");
}

double PiecewiseObjective::value(std::span<const double> params) const {
  PiecewiseModel m = model_;
  m.set_params(params);
  return piecewise_loss(m, problem_, points_);
}

double PiecewiseObjective::value_and_gradient(std::span<const double> params,
                                              std::span<double> grad) const {
  PiecewiseModel m = model_;
  m.set_params(params);
  const auto& segs = m.segments();
  const auto& w = m.weights();
  const int n = problem_.order;

  std::vector<std::vector<double>> free_grad(segs.size());
  for (std::size_t j = 0; j < segs.size(); ++j) {
    free_grad[j].assign(static_cast<std::size_t>(segs[j].trainable_count()), 0.0);
  }

  const double scale = 2.0 / static_cast<double>(points_.size());
  double sum = 0.0;
  for (double t : points_) {
    const auto j = static_cast<std::size_t>(m.segment_index(t));
    const Jet x = segs[j].eval_jet(t, n);
    const double r = residual(problem_, t, x);
    sum += r * r;
    const auto s = residual_partials(problem_, t, x);
    double adjoint[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i <= n; ++i) adjoint[i] = scale * r * s[static_cast<std::size_t>(i)];
    segs[j].accumulate_free_gradient(t, std::span<const double>(adjoint, static_cast<std::size_t>(n) + 1),
                                     free_grad[j]);
  }
  double loss = sum / static_cast<double>(points_.size());

  for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
    const double c = m.knots()[j + 1];
    const Jet left = segs[j].eval_jet(c, 1);
    const Jet right = segs[j + 1].eval_jet(c, 1);
    const double dv = left[0] - right[0];
    const double dd = left[1] - right[1];
    loss += w.mu[j] * penalty_value(w.norm, dv) + w.nu[j] * penalty_value(w.norm, dd);
    const double adj[2] = {w.mu[j] * penalty_slope(w.norm, dv), w.nu[j] * penalty_slope(w.norm, dd)};
    const double neg[2] = {-adj[0], -adj[1]};
    segs[j].accumulate_free_gradient(c, adj, free_grad[j]);
    segs[j + 1].accumulate_free_gradient(c, neg, free_grad[j + 1]);
  }

  if (m.ic_mode() == IcMode::soft) {
    const double t0 = problem_.interval.start;
    const double d = segs.front().eval(t0) - problem_.initial_conditions[0];
    loss += w.lambda0 * penalty_value(w.norm, d);
    const double adj[1] = {w.lambda0 * penalty_slope(w.norm, d)};
    segs.front().accumulate_free_gradient(t0, adj, free_grad.front());
  }

  std::size_t offset = 0;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const auto k = free_grad[j].size();
    segs[j].free_to_param_gradient(free_grad[j], grad.subspan(offset, k));
    offset += k;
  }
  return loss;
}

}  // namespace hornerde
