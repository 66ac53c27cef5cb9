#pragma once

#include <cstddef>
#include <stdexcept>

namespace vklab {

// Uniform grid t_k = k * T / steps, k = 0..steps.
struct TimeGrid {
  double horizon;
  std::size_t steps;

  TimeGrid(double horizon_, std::size_t steps_) : horizon(horizon_), steps(steps_) {
    if (!(horizon > 0.0) || steps < 1)
      throw std::invalid_argument("TimeGrid: need T > 0 and steps >= 1");
  }

  double dt() const { return horizon / static_cast<double>(steps); }
  double node(std::size_t k) const { return dt() * static_cast<double>(k); }
};

}  // namespace vklab
