#pragma once

#include <optional>

#include "nsframe/windows.hpp"

namespace nsframe {

// Upper bound for sum_{k>=1} (1 + delta k)^{-p}:
//   (1 + delta)^{-p} (1/delta + p) / (p - 1).
// Throws DomainError unless delta > 0 and p > 1.
double tail_sum_bound(double delta, double p);

// Upper bound for sup_t sum_k (1 + |t - a_k|)^{-p} over any relatively
// delta-separated set with at most `rel` points per delta-cell:
//   2 rel (1 + tail_sum_bound(delta, p)).
double separated_sum_bound(double delta, double p, int rel = 1);

struct WienerOptions {
  double step = 1e-4;
  // Needed for windows of unbounded support; bounds the cells beyond
  // `cell_radius` from the profile's anchor.
  std::optional<DecayProfile> profile;
  double cell_radius = 32.0;
};

struct WienerNorm {
  double value = 0.0;     // grid_sum + margin + tail
  double grid_sum = 0.0;  // sum of per-cell grid maxima
  double margin = 0.0;    // slope inflation of the grid maxima
  double tail = 0.0;      // profile bound for the cells not swept
  double step = 0.0;
  int cells = 0;
};

// Estimate of sum_k sup_{t in [0,1)} |g(t + k)|, an upper estimate up to the
// reported grid margin.
WienerNorm wiener_norm(const WindowSpec& spec, const WienerOptions& options = {});

// (1 + 1/delta) * ||g||_W, which dominates sup_t sum_k |g(t - delta k)|.
double wiener_shift_bound(const WindowSpec& spec, double delta, const WienerOptions& options = {});

enum class OverlapVariant { perturbation, almost_painless };

struct OverlapConstants {
  double E1 = 0.0;
  double E2 = 0.0;
  double lambda = 0.0;
  OverlapVariant variant = OverlapVariant::perturbation;
  int rel = 1;  // max(1, floor(1 / (2 b_L delta))), almost-painless only
};

// E1 = 1 + (1/delta + p_L) / ((1 + delta)^{p_L} (p_L - 1))
// E2 = 1 + (b_U + p_U) / ((1 + 1/b_U)^{p_L} (p_L - 1))
// lambda = 4 E1 E2 / b_L                          (perturbation)
// lambda = 8 E1 E2 max(1, 1/(2 b_L delta)) / b_L  (almost painless; equals
//          4 E1 E2 / (b_L^2 delta) whenever 2 b_L delta <= 1)
OverlapConstants overlap_constants(double delta, double b_L, double b_U, double p_L, double p_U,
                                   OverlapVariant variant);

// Per-window E2 with the window's own b and p; a sharper diagnostic that no
// certificate uses.
double window_e2(double b, double p_L, double p);

int relative_separation(double b_L, double delta);

}  // namespace nsframe
