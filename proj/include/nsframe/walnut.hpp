#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nsframe/grid.hpp"
#include "nsframe/nsgt.hpp"
#include "nsframe/windows.hpp"

namespace nsframe {

// Lazy evaluator of the Walnut terms
//   G_{k,l}(t) = b_k^{-1} conj(g_k(t - l / b_k)) gamma_k(t).
class WalnutKernel {
 public:
  WalnutKernel(const NsgSystem& g, const NsgSystem& gamma);
  explicit WalnutKernel(const NsgSystem& g) : WalnutKernel(g, g) {}

  double term(std::size_t k, long l, double t) const;
  std::size_t size() const { return g_.size(); }

 private:
  const NsgSystem& g_;
  const NsgSystem& gamma_;
};

// Default estimate grid: 16 points per smallest feature scale.
double default_grid_step(const NsgSystem& system);

// Grid over the covered interval [a_0, a_{K-1}]; a single-window system uses
// the window's support instead.
SamplingGrid covered_grid(const NsgSystem& system, double step);

struct G0Result {
  SamplingGrid grid;
  std::vector<double> weighted;    // sum_k |g_k|^2 / b_k
  std::vector<double> unweighted;  // sum_k |g_k|^2
  GridExtrema weighted_extrema;
  GridExtrema unweighted_extrema;  // A_0, B_0
};

// Throws InputError for a grid that does not cover [a_0, a_{K-1}].
G0Result compute_G0(const NsgSystem& system, const SamplingGrid& grid);

struct WalnutOptions {
  double grid_step = 0.0;  // 0: default_grid_step
  int l_max = 32;
  // Tail of the l-sum past l_max; required for windows of unbounded support.
  std::vector<DecayProfile> profiles;
  std::optional<double> mu;  // default (p_L - 2) / 2
  bool include_tail = true;
  bool operator_norm_bounds = true;
};

struct ResidualEstimate {
  double computed = 0.0;  // sum over 0 < |l| <= l_max of grid sups
  double tail = 0.0;      // profile bound for |l| > l_max
  double margin = 0.0;    // slope inflation of the grid sups
  int l_max = 0;          // largest |l| swept
  double grid_step = 0.0;
  double mu = 0.0;

  // computed + tail; the margin is reported separately.
  double total() const { return computed + tail; }
};

// R = sum_{l != 0} sup_t sum_k |g_k(t)| |g_k(t - l / b_k)|. Compactly
// supported windows need no tail; R = 0 exactly when |supp g_k| b_k <= 1.
ResidualEstimate residual_R(const NsgSystem& system, const WalnutOptions& options = {});

struct WalnutBoundReport {
  double bound_amalgam = 0.0;  // sup_k (1 + 1/b_k) ||g_k||_W * sup_t sum_k |g_k(t)|
  double bound_overlap = 0.0;  // sup_t sum_{k,l} |g_k(t - l/b_k)| |g_k(t)| / b_k
  double A0 = 0.0;             // grid inf of sum_k |g_k|^2
  double B0 = 0.0;             // grid sup of sum_k |g_k|^2
  double R = 0.0;
  double ratio = 1.0;  // max_k b_k^{-1} / min_k b_k^{-1}
  double A_lower = 0.0;
  double B_upper = 0.0;
  double lower_margin = 0.0;  // slope inflation of the grid extrema, on A_lower
  double upper_margin = 0.0;  // same, on B_upper
  double grid_step = 0.0;
  int l_max = 0;
  ResidualEstimate residual;

  bool certified() const { return A_lower > 0.0; }
};

// A_lower = min_k b_k^{-1} (A_0 - ratio R), B_upper = max_k b_k^{-1} (B_0 + R).
WalnutBoundReport frame_bounds_walnut(const NsgSystem& system, const WalnutOptions& options = {});

// S_{g,gamma} f[n] = sum_k M_k sum_l conj(g_k[n - l M_k]) gamma_k[n] f[n - l M_k],
// circular indices.
Signal apply_frame_operator_walnut(const DiscreteSystem& g, const DiscreteSystem& gamma,
                                   std::span<const Complex> f);

}  // namespace nsframe
