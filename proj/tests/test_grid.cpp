#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsframe/error.hpp"
#include "nsframe/grid.hpp"
#include "oracles.hpp"

using namespace nsframe;

TEST_CASE("grid covers both endpoints") {
  const SamplingGrid g = make_grid(0.0, 1.0, 0.25);
  CHECK(g.size() == 5);
  CHECK(g[0] == 0.0);
  CHECK(g[4] == doctest::Approx(1.0));

  const SamplingGrid h = make_grid(0.0, 1.0, 0.3);
  CHECK(h[h.size() - 1] >= 1.0);
  CHECK(h[h.size() - 2] < 1.0);
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 0.1), InputError);
}

TEST_CASE("grid extrema bracket the true extrema of a smooth function") {
  // cos(7 t + 0.3) on [0, 2]: true min -1 and max 1 fall between samples.
  for (double step : {0.05, 0.01, 0.002}) {
    const SamplingGrid g = make_grid(0.0, 2.0, step);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::cos(7.0 * g[i] + 0.3);
    const GridExtrema e = grid_extrema(g, v);
    CHECK(e.upper() >= 1.0);
    CHECK(e.lower() <= -1.0);
    CHECK(e.max <= 1.0);
    CHECK(e.min >= -1.0);
  }
}

TEST_CASE("grid extrema report argmin and argmax") {
  const SamplingGrid g = make_grid(-1.0, 1.0, 0.5);
  const std::vector<double> v{3.0, 1.0, 0.0, 2.0, 5.0};
  const GridExtrema e = grid_extrema(g, v);
  CHECK(e.argmin == doctest::Approx(0.0));
  CHECK(e.argmax == doctest::Approx(1.0));
  CHECK(e.min_margin == doctest::Approx(1.0));
  CHECK(e.max_margin == doctest::Approx(1.5));
  CHECK_THROWS_AS(grid_extrema(g, std::vector<double>{1.0}), InputError);
}
