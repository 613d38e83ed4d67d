#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hornerde/horner.hpp"
#include "hornerde/objective.hpp"
#include "hornerde/problems.hpp"

namespace hornerde {

enum class IcMode {
  hard,  // segment 0 freezes its low-order coefficients to the ICs
  soft,  // no frozen coefficients; lambda0 * |N(0) - x0| in the loss
};

enum class PenaltyNorm { absolute, squared };

struct PiecewiseWeights {
  double lambda0 = 1.0;
  std::vector<double> mu;  // value continuity, one per interior knot
  std::vector<double> nu;  // slope continuity, one per interior knot
  PenaltyNorm norm = PenaltyNorm::absolute;
};

// One Horner network per subinterval [c_j, c_{j+1}); the last one is closed
// on the right. Every segment is a polynomial in the global input t.
class PiecewiseModel {
 public:
  PiecewiseModel(std::vector<double> knots, std::vector<HornerModel> segments, IcMode ic_mode,
                 PiecewiseWeights weights);

  std::span<const double> knots() const noexcept { return knots_; }
  const std::vector<HornerModel>& segments() const noexcept { return segments_; }
  IcMode ic_mode() const noexcept { return ic_mode_; }
  const PiecewiseWeights& weights() const noexcept { return weights_; }
  int segment_count() const noexcept { return static_cast<int>(segments_.size()); }

  // Throws DomainError outside [c_0, c_l].
  int segment_index(double t) const;
  double eval(double t) const;
  Jet eval_jet(double t, int order) const;

  std::size_t param_count() const noexcept;
  std::vector<double> get_params() const;
  void set_params(std::span<const double> params);

 private:
  std::vector<double> knots_;
  std::vector<HornerModel> segments_;
  IcMode ic_mode_;
  PiecewiseWeights weights_;
};

struct PiecewiseSpec {
  std::vector<double> knots{0.0, 1.0, 2.0, 3.0, 4.0};
  int segment_params = 8;
  IcMode ic_mode = IcMode::hard;
  double lambda0 = 1.0;
  double mu = 0.5;
  double nu = 0.5;
  PenaltyNorm norm = PenaltyNorm::absolute;
};

// Segment bases are orthonormal over each segment's own subinterval.
PiecewiseModel new_piecewise(const OdeProblem& problem, const PiecewiseSpec& spec,
                             const InitSpec& init, std::uint64_t seed);

// Wrap a single Horner model as a one-segment piecewise model over the interval.
PiecewiseModel single_segment(const HornerModel& model, Interval interval);

// sum_j mu_j |N_j(c_{j+1}) - N_{j+1}(c_{j+1})| + nu_j |N'_j(c_{j+1}) - N'_{j+1}(c_{j+1})|
double continuity_penalty(const PiecewiseModel& model);
// lambda0 |N(0) - x0| in soft mode, exactly 0 in hard mode.
double ic_penalty(const PiecewiseModel& model, const OdeProblem& problem);
// Mean squared residual (points routed to their segments) plus both penalties.
double piecewise_loss(const PiecewiseModel& model, const OdeProblem& problem,
                      std::span<const double> points);

struct KnotJumps {
  std::vector<double> value;  // |N_j(c) - N_{j+1}(c)| per interior knot
  std::vector<double> slope;
};
KnotJumps knot_jumps(const PiecewiseModel& model);

class PiecewiseObjective final : public Objective {
 public:
  PiecewiseObjective(PiecewiseModel model, OdeProblem problem, std::vector<double> points);

  std::size_t param_count() const override { return model_.param_count(); }
  double value(std::span<const double> params) const override;
  double value_and_gradient(std::span<const double> params,
                            std::span<double> grad) const override;

 private:
  PiecewiseModel model_;
  OdeProblem problem_;
  std::vector<double> points_;
};

}  // namespace hornerde
