#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsframe/windows.hpp"

namespace nsframe {

using Complex = std::complex<double>;
using Signal = std::vector<Complex>;

// Sampled nonstationary Gabor system on a circle of L samples. Window k is a
// length-L vector and is modulated on M_k channels, e^{2 pi i m n / M_k};
// every M_k divides L.
class DiscreteSystem {
 public:
  // `covered` marks the samples inside the region the system is meant to
  // represent; empty means every sample.
  DiscreteSystem(std::size_t length, double dt, std::vector<Signal> windows,
                 std::vector<std::size_t> channels, std::vector<bool> covered = {});

  std::size_t length() const { return length_; }
  double dt() const { return dt_; }
  std::size_t size() const { return windows_.size(); }
  const Signal& window(std::size_t k) const { return windows_[k]; }
  std::size_t channels(std::size_t k) const { return channels_[k]; }
  const std::vector<bool>& covered() const { return covered_; }

  // d[n] = sum_k M_k |g_k[n]|^2, the frame operator's diagonal.
  std::vector<double> diagonal() const;

  // Every window's circular support spans at most M_k samples, so the frame
  // operator is the multiplication by diagonal().
  bool painless() const;

  std::vector<std::string> warnings;

 private:
  std::size_t length_;
  double dt_;
  std::vector<Signal> windows_;
  std::vector<std::size_t> channels_;
  std::vector<bool> covered_;
};

struct DiscretizeOptions {
  // Relative window magnitude at half a period from the center above which an
  // aliasing warning is recorded.
  double alias_tolerance = 1e-8;
};

// Samples g_k at t_n = n dt, wrapped onto the circle of period L dt and scaled
// by sqrt(dt) so that discrete frame bounds approximate the continuous ones.
// M_k = round(1 / (b_k dt)) must divide L.
DiscreteSystem discretize(const NsgSystem& system, std::size_t length, double dt,
                          const DiscretizeOptions& options = {});

// c[k][m] = sum_n f[n] conj(g_k[n]) e^{-2 pi i m n / M_k}.
struct CoefficientSet {
  std::size_t length = 0;
  double dt = 0.0;
  std::vector<Signal> rows;

  std::size_t channels(std::size_t k) const { return rows[k].size(); }
  double energy() const;
};

// Folds f conj(g_k) into M_k bins and takes a length-M_k DFT per row.
CoefficientSet analyze(const DiscreteSystem& system, std::span<const Complex> f);
CoefficientSet analyze(const DiscreteSystem& system, std::span<const double> f);

// f[n] = sum_k gamma_k[n] sum_m c[k][m] e^{2 pi i m n / M_k}.
Signal synthesize(const DiscreteSystem& synthesis_windows, const CoefficientSet& coefficients);

// gamma_k = g_k / d. Requires a painless system and d > 0 on the covered samples.
DiscreteSystem painless_duals(const DiscreteSystem& system);

struct SpectralOptions {
  std::size_t max_length = 1024;
  int max_iterations = 500;
  double tolerance = 1e-10;  // relative Rayleigh-quotient change
  std::uint64_t seed = 0x6e7366;
  bool require_convergence = false;
  // Compress S to signals supported on the covered samples, where a finite
  // system is meant to stand in for the infinite one.
  bool restrict_to_covered = true;
};

struct SpectralBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations_min = 0;
  int iterations_max = 0;
  bool converged = false;
  double residual_min = 0.0;  // ||S v - lambda v|| at the final iterate
  double residual_max = 0.0;
};

// Extreme eigenvalues of the frame operator by power iteration on S and on
// lambda_max I - S, with S applied through its Walnut form.
SpectralBounds frame_bounds_bruteforce(const DiscreteSystem& system,
                                       const SpectralOptions& options = {});

}  // namespace nsframe
