#pragma once

#include <cstddef>
#include <span>

namespace hornerde {

// A scalar training loss over a flat trainable-parameter vector. Every model
// family (Horner, piecewise, 2D Horner, MLP baselines) provides one.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t param_count() const = 0;
  virtual double value(std::span<const double> params) const = 0;
  // Writes d loss / d params into grad (size param_count()) and returns the loss.
  virtual double value_and_gradient(std::span<const double> params,
                                    std::span<double> grad) const = 0;
};

}  // namespace hornerde
