#pragma once

#include <cstddef>
#include <span>

namespace nsframe {

// Uniform sampling of [begin, end]; the last point is the first one >= end.
struct SamplingGrid {
  double begin = 0.0;
  double end = 0.0;
  double step = 0.0;

  std::size_t size() const;
  double operator[](std::size_t i) const { return begin + step * static_cast<double>(i); }
};

SamplingGrid make_grid(double begin, double end, double step);

// Grid extrema with a local slope margin: the true extremum of a function
// sampled at spacing h can differ from the sampled one by about |slope| h / 2,
// where the slope is read off the neighbours of the extremal sample.
struct GridExtrema {
  double min = 0.0;
  double max = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
  double min_margin = 0.0;
  double max_margin = 0.0;
  double step = 0.0;

  double lower() const { return min - min_margin; }
  double upper() const { return max + max_margin; }
};

GridExtrema grid_extrema(const SamplingGrid& grid, std::span<const double> values);

}  // namespace nsframe
