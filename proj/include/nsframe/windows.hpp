#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsframe/grid.hpp"

namespace nsframe {

// Half-open interval [lo, hi) on the time axis.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t < hi; }
  bool operator==(const Interval&) const = default;
};

enum class WindowFamily { hann, gaussian, raised_cosine_band, convolution, truncation, indicator };

std::string_view to_string(WindowFamily family);
std::optional<WindowFamily> parse_window_family(std::string_view name);

// Closed-form window description. Elementary families are evaluated as
// sqrt(d) * w(d * (t - center)), which preserves the L2 norm under dilation d.
// Combinators (convolution, truncation) act on absolute time and carry
// center 0 and dilation 1.
//
//   hann                 w(u) = 0.5 + 0.5 cos(2 pi u) on [-1/2, 1/2]
//   gaussian             w(u) = exp(-pi (alpha u)^2)
//   raised_cosine_band   inverse Fourier transform of
//                        0.5 + 0.5 cos(2 pi w / omega) on [-omega/2, omega/2]
//   indicator            w(u) = 1 on [lo, hi)
//
// Specs are immutable and cheap to copy; children are shared.
class WindowSpec {
 public:
  static WindowSpec hann(double center = 0.0, double dilation = 1.0);
  static WindowSpec gaussian(double alpha, double center = 0.0, double dilation = 1.0);
  static WindowSpec raised_cosine_band(double omega, double center = 0.0, double dilation = 1.0);
  static WindowSpec indicator(Interval interval, double center = 0.0, double dilation = 1.0);
  static WindowSpec convolution(WindowSpec first, WindowSpec second);
  static WindowSpec truncation(WindowSpec inner, Interval interval);

  WindowFamily family() const { return family_; }
  double center() const { return center_; }
  double dilation() const { return dilation_; }

  // Family-specific accessors; throw InputError on the wrong family.
  double alpha() const;
  double omega() const;
  const Interval& interval() const;
  const WindowSpec& first() const;   // convolution factor or truncated window
  const WindowSpec& second() const;  // second convolution factor

  // Support in absolute time, or nullopt when unbounded.
  std::optional<Interval> support() const;

  // Smallest length scale on which the window varies.
  double feature_scale() const;
  // Width of the window's main lobe or support; used to size sweeps.
  double extent_scale() const;

  double operator()(double t) const;

  bool operator==(const WindowSpec& other) const;

 private:
  WindowSpec(WindowFamily family, double center, double dilation)
      : family_(family), center_(center), dilation_(dilation) {}

  WindowFamily family_;
  double center_;
  double dilation_;
  double param_ = 0.0;
  Interval interval_{};
  std::shared_ptr<const WindowSpec> first_;
  std::shared_ptr<const WindowSpec> second_;
};

// Same as spec(t). Convolutions are integrated by adaptive Simpson quadrature
// over the compactly supported factor (absolute tolerance 1e-10); a failure to
// converge throws NumericalError carrying the residual estimate.
double evaluate_window(const WindowSpec& spec, double t);

// Adaptive Simpson quadrature of f over [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10);

// The raised-cosine band-limited pulse with unit dilation, centered at 0.
double raised_cosine_pulse(double omega, double t);

enum class ScaleRule { example1, example2 };

std::string_view to_string(ScaleRule rule);
std::optional<ScaleRule> parse_scale_rule(std::string_view name);

// Dilation exponents s_k in {-1, 0, 1}; window k is dilated by 2^{s_k}.
struct ScaleSequence {
  std::vector<int> values;
  ScaleRule rule = ScaleRule::example1;

  // Throws InputError on a violated invariant.
  void validate() const;
  bool operator==(const ScaleSequence&) const = default;
};

struct FrequencyRange {
  double lower = 0.0;
  double upper = 0.0;
};

struct NsgEntry {
  WindowSpec window;
  double center;  // a_k
  double b;       // frequency step b_k
};

// How a system came out of the built-in dilation-chain builders; lets the tail
// profile derivation recognise pairs with closed-form constants.
struct ChainInfo {
  enum class Stage { plain, bandlimited, truncated };
  ScaleSequence sequence;
  double a0 = 0.0;
  Stage stage = Stage::plain;
  double omega = 0.0;
};

// Ordered collection of (window, a_k, b_k) plus separation metadata.
class NsgSystem {
 public:
  // Validates: nonempty, centers strictly increasing with gaps >= delta,
  // b_k in b_range, 0 < b_L <= b_U < inf.
  NsgSystem(std::vector<NsgEntry> entries, double delta, FrequencyRange b_range,
            std::optional<ChainInfo> chain = std::nullopt);

  // b_range defaults to [min b_k, max b_k].
  NsgSystem(std::vector<NsgEntry> entries, double delta);

  const std::vector<NsgEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const NsgEntry& operator[](std::size_t k) const { return entries_[k]; }
  double delta() const { return delta_; }
  const FrequencyRange& b_range() const { return b_range_; }
  const std::optional<ChainInfo>& chain() const { return chain_; }

  double min_gap() const;
  // [a_0, a_{K-1}]; the region where the finite system stands in for the full one.
  Interval covered_interval() const;
  double min_feature_scale() const;
  double max_extent_scale() const;
  bool all_compact() const;

 private:
  std::vector<NsgEntry> entries_;
  double delta_;
  FrequencyRange b_range_;
  std::optional<ChainInfo> chain_;
};

NsgSystem build_scale_system(const ScaleSequence& sequence, double a0 = 0.0);
NsgSystem bandlimit_system(const NsgSystem& system, double omega);
NsgSystem truncate_system(const NsgSystem& system);

enum class DecayShape { centered, gap };

std::string_view to_string(DecayShape shape);
std::optional<DecayShape> parse_decay_shape(std::string_view name);

// Tail envelope of one window.
//   centered: C (1 + |t - center|)^{-p}
//   gap:      0 on [center - half_gap, center + half_gap], and
//             C (1 + dist(t, that interval))^{-p} outside.
struct DecayProfile {
  double C = 0.0;
  double p = 0.0;
  DecayShape shape = DecayShape::centered;
  double center = 0.0;
  double half_gap = 0.0;

  double envelope(double t) const;
  bool operator==(const DecayProfile&) const = default;
};

struct ProfileBounds {
  double C_L;
  double C_U;
  double p_L;
  double p_U;
};

ProfileBounds profile_bounds(std::span<const DecayProfile> profiles);

struct TailProfileOptions {
  // Used when no closed form applies.
  DecayShape shape = DecayShape::centered;
  std::optional<double> p;
  // 0 selects the defaults: step = 1e-3 * smallest window scale,
  // span = 8 * largest reference window extent.
  double step = 0.0;
  double span = 0.0;
  // Throw InputError when the envelope is violated on the grid.
  bool strict = true;
  // Skip closed forms and always fit C_k on the grid.
  bool force_fit = false;
};

struct TailProfileReport {
  std::vector<DecayProfile> profiles;
  bool closed_form = false;
  bool verified = true;
  std::size_t worst_index = 0;
  double worst_t = 0.0;
  double worst_ratio = 0.0;  // max |psi_k(t)| / envelope_k(t) over the grid
  double step = 0.0;
  double span = 0.0;
};

// Envelopes for psi_k = g_k - h_k where sys holds g and reference holds h.
TailProfileReport derive_tail_profile(const NsgSystem& sys, const NsgSystem& reference,
                                      const TailProfileOptions& options = {});

// Smallest C such that |f(t)| <= C * shape(t) on the grid, for fixed p.
DecayProfile fit_decay_profile(const std::function<double(double)>& f, DecayShape shape,
                               double center, double half_gap, double p,
                               const SamplingGrid& grid);

// Grid maximum of |spec| over its support (or over center +- 8 extents).
double sup_norm(const WindowSpec& spec, double step = 0.0);

}  // namespace nsframe
