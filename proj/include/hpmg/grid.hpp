#pragma once

#include <cmath>
#include <stdexcept>

namespace hpmg {

// Discretized action space {0, 1/m, 2/m, ..., 1}. Actions are carried around
// as integer grid indices so profile comparisons (cycle memory, memo keys)
// are exact.
struct GridSpec {
  int m = 100;  // number of steps; m+1 grid points

  static GridSpec from_delta(double delta) {
    if (!(delta > 0.0) || delta > 1.0)
      throw std::invalid_argument("grid_delta must be in (0, 1]");
    const double steps = 1.0 / delta;
    const int m = static_cast<int>(std::llround(steps));
    if (m < 1 || std::abs(m * delta - 1.0) > 1e-9)
      throw std::invalid_argument("grid_delta must divide 1 exactly");
    return GridSpec{m};
  }

  int points() const { return m + 1; }
  double alpha(int index) const { return static_cast<double>(index) / m; }
  double delta() const { return 1.0 / m; }

  // Maps an on-grid action value back to its index; rejects off-grid values.
  int index_of(double alpha_value) const {
    const int i = static_cast<int>(std::llround(alpha_value * m));
    if (i < 0 || i > m || std::abs(alpha(i) - alpha_value) > 1e-12)
      throw std::invalid_argument("action value is not on the solver grid");
    return i;
  }
};

}  // namespace hpmg
