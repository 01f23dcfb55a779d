#include "nsframe/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nsframe/error.hpp"

namespace nsframe {

std::size_t SamplingGrid::size() const {
  if (!(step > 0.0) || end < begin) return 0;
  return static_cast<std::size_t>(std::ceil((end - begin) / step - 1e-9)) + 1;
}

SamplingGrid make_grid(double begin, double end, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("grid step must be positive and finite");
  if (!(end >= begin)) throw InputError("grid end precedes its beginning");
  return SamplingGrid{begin, end, step};
}

namespace {

double neighbour_margin(std::span<const double> v, std::size_t i) {
  double d = 0.0;
  if (i > 0) d = std::max(d, std::abs(v[i] - v[i - 1]));
  if (i + 1 < v.size()) d = std::max(d, std::abs(v[i + 1] - v[i]));
  return 0.5 * d;
}

}  // namespace

GridExtrema grid_extrema(const SamplingGrid& grid, std::span<const double> values) {
  if (values.empty() || values.size() != grid.size())
    throw InputError("grid and sample count disagree");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const auto imin = static_cast<std::size_t>(lo - values.begin());
  const auto imax = static_cast<std::size_t>(hi - values.begin());
  GridExtrema e;
  e.min = *lo;
  e.max = *hi;
  e.argmin = grid[imin];
  e.argmax = grid[imax];
  e.min_margin = neighbour_margin(values, imin);
  e.max_margin = neighbour_margin(values, imax);
  e.step = grid.step;
  return e;
}

}  // namespace nsframe
