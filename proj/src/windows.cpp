#include "nsframe/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsframe/error.hpp"

namespace nsframe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite (got " << v << ")";
    throw InputError(os.str());
  }
}

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
  double tol;
  int depth;
};

}  // namespace

std::string_view to_string(WindowFamily family) {
  switch (family) {
    case WindowFamily::hann: return "hann";
    case WindowFamily::gaussian: return "gaussian";
    case WindowFamily::raised_cosine_band: return "raised-cosine-band";
    case WindowFamily::convolution: return "convolution";
    case WindowFamily::truncation: return "truncation";
    case WindowFamily::indicator: return "indicator";
  }
  return "unknown";
}

std::optional<WindowFamily> parse_window_family(std::string_view name) {
  for (auto f : {WindowFamily::hann, WindowFamily::gaussian, WindowFamily::raised_cosine_band,
                 WindowFamily::convolution, WindowFamily::truncation, WindowFamily::indicator}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

double raised_cosine_pulse(double omega, double t) {
  const double x = omega * t;
  return 0.5 * omega * sinc(x) + 0.25 * omega * (sinc(x + 1.0) + sinc(x - 1.0));
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
  if (b <= a) return 0.0;
  constexpr int kPanels = 16;
  constexpr int kMaxDepth = 40;
  double total = 0.0;
  double unresolved = 0.0;
  std::vector<SimpsonPanel> stack;
  const double h = (b - a) / kPanels;
  for (int i = kPanels - 1; i >= 0; --i) {
    const double lo = a + h * i;
    const double hi = (i == kPanels - 1) ? b : lo + h;
    const double fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
    stack.push_back({lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb),
                     abs_tol / kPanels, 0});
  }
  while (!stack.empty()) {
    const SimpsonPanel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * p.tol) {
      total += left + right + delta / 15.0;
    } else if (p.depth >= kMaxDepth) {
      total += left + right + delta / 15.0;
      unresolved += std::abs(delta) / 15.0;
    } else {
      stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
      stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
    }
  }
  if (unresolved > abs_tol) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b
       << "] did not converge; residual estimate " << unresolved;
    throw NumericalError(os.str(), unresolved);
  }
  return total;
}

WindowSpec WindowSpec::hann(double center, double dilation) {
  require_positive(dilation, "dilation");
  return WindowSpec(WindowFamily::hann, center, dilation);
}

WindowSpec WindowSpec::gaussian(double alpha, double center, double dilation) {
  require_positive(dilation, "dilation");
  require_positive(alpha, "gaussian alpha");
  WindowSpec w(WindowFamily::gaussian, center, dilation);
  w.param_ = alpha;
  return w;
}

WindowSpec WindowSpec::raised_cosine_band(double omega, double center, double dilation) {
  require_positive(dilation, "dilation");
  require_positive(omega, "band limit omega");
  WindowSpec w(WindowFamily::raised_cosine_band, center, dilation);
  w.param_ = omega;
  return w;
}

WindowSpec WindowSpec::indicator(Interval interval, double center, double dilation) {
  require_positive(dilation, "dilation");
  if (!(interval.hi > interval.lo) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi))
    throw InputError("indicator interval must be nonempty and finite");
  WindowSpec w(WindowFamily::indicator, center, dilation);
  w.interval_ = interval;
  return w;
}

WindowSpec WindowSpec::convolution(WindowSpec first, WindowSpec second) {
  if (!first.support() && !second.support())
    throw InputError("convolution needs at least one compactly supported factor");
  WindowSpec w(WindowFamily::convolution, 0.0, 1.0);
  w.first_ = std::make_shared<const WindowSpec>(std::move(first));
  w.second_ = std::make_shared<const WindowSpec>(std::move(second));
  return w;
}

WindowSpec WindowSpec::truncation(WindowSpec inner, Interval interval) {
  if (!(interval.hi > interval.lo) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi))
    throw InputError("truncation interval must be nonempty and finite");
  WindowSpec w(WindowFamily::truncation, 0.0, 1.0);
  w.interval_ = interval;
  w.first_ = std::make_shared<const WindowSpec>(std::move(inner));
  return w;
}

double WindowSpec::alpha() const {
  if (family_ != WindowFamily::gaussian) throw InputError("alpha requested from a non-gaussian window");
  return param_;
}

double WindowSpec::omega() const {
  if (family_ != WindowFamily::raised_cosine_band)
    throw InputError("omega requested from a non-band-limited window");
  return param_;
}

const Interval& WindowSpec::interval() const {
  if (family_ != WindowFamily::indicator && family_ != WindowFamily::truncation)
    throw InputError("interval requested from a window without one");
  return interval_;
}

const WindowSpec& WindowSpec::first() const {
  if (!first_) throw InputError("window has no child specs");
  return *first_;
}

const WindowSpec& WindowSpec::second() const {
  if (!second_) throw InputError("window has no second child spec");
  return *second_;
}

std::optional<Interval> WindowSpec::support() const {
  switch (family_) {
    case WindowFamily::hann: {
      const double half = 0.5 / dilation_;
      return Interval{center_ - half, center_ + half};
    }
    case WindowFamily::indicator:
      return Interval{center_ + interval_.lo / dilation_, center_ + interval_.hi / dilation_};
    case WindowFamily::truncation: {
      const auto inner = first_->support();
      if (!inner) return interval_;
      const Interval cut{std::max(inner->lo, interval_.lo), std::min(inner->hi, interval_.hi)};
      if (cut.hi <= cut.lo) return Interval{interval_.lo, interval_.lo};
      return cut;
    }
    case WindowFamily::convolution: {
      const auto a = first_->support();
      const auto b = second_->support();
      if (a && b) return Interval{a->lo + b->lo, a->hi + b->hi};
      return std::nullopt;
    }
    case WindowFamily::gaussian:
    case WindowFamily::raised_cosine_band:
      return std::nullopt;
  }
  return std::nullopt;
}

double WindowSpec::feature_scale() const {
  switch (family_) {
    case WindowFamily::hann: return 1.0 / dilation_;
    case WindowFamily::gaussian: return 1.0 / (param_ * dilation_);
    case WindowFamily::raised_cosine_band: return 1.0 / (param_ * dilation_);
    case WindowFamily::indicator: return interval_.length() / dilation_;
    case WindowFamily::truncation: return std::min(first_->feature_scale(), interval_.length());
    case WindowFamily::convolution:
      return std::min(first_->feature_scale(), second_->feature_scale());
  }
  return 1.0;
}

double WindowSpec::extent_scale() const {
  switch (family_) {
    case WindowFamily::hann: return 1.0 / dilation_;
    case WindowFamily::gaussian: return 2.0 / (param_ * dilation_);
    case WindowFamily::raised_cosine_band: return 2.0 / (param_ * dilation_);
    case WindowFamily::indicator: return interval_.length() / dilation_;
    case WindowFamily::truncation: return std::min(first_->extent_scale(), interval_.length());
    case WindowFamily::convolution: return first_->extent_scale() + second_->extent_scale();
  }
  return 1.0;
}

double WindowSpec::operator()(double t) const {
  const double u = dilation_ * (t - center_);
  const double norm = std::sqrt(dilation_);
  switch (family_) {
    case WindowFamily::hann:
      return std::abs(u) <= 0.5 ? norm * (0.5 + 0.5 * std::cos(2.0 * kPi * u)) : 0.0;
    case WindowFamily::gaussian: {
      const double au = param_ * u;
      return norm * std::exp(-kPi * au * au);
    }
    case WindowFamily::raised_cosine_band:
      return norm * raised_cosine_pulse(param_, u);
    case WindowFamily::indicator:
      return interval_.contains(u) ? norm : 0.0;
    case WindowFamily::truncation:
      return interval_.contains(t) ? (*first_)(t) : 0.0;
    case WindowFamily::convolution: {
      const auto sa = first_->support();
      const auto sb = second_->support();
      const bool use_first = sa && (!sb || sa->length() <= sb->length());
      if (use_first) {
        return integrate_adaptive(
            [&](double tau) { return (*first_)(tau) * (*second_)(t - tau); }, sa->lo, sa->hi);
      }
      return integrate_adaptive([&](double s) { return (*first_)(t - s) * (*second_)(s); },
                                sb->lo, sb->hi);
    }
  }
  throw InputError("unknown window family");
}

bool WindowSpec::operator==(const WindowSpec& other) const {
  if (family_ != other.family_ || center_ != other.center_ || dilation_ != other.dilation_ ||
      param_ != other.param_ || !(interval_ == other.interval_))
    return false;
  const auto same_child = [](const std::shared_ptr<const WindowSpec>& x,
                             const std::shared_ptr<const WindowSpec>& y) {
    if (!x || !y) return !x && !y;
    return x == y || *x == *y;
  };
  return same_child(first_, other.first_) && same_child(second_, other.second_);
}

double evaluate_window(const WindowSpec& spec, double t) { return spec(t); }

std::string_view to_string(ScaleRule rule) {
  return rule == ScaleRule::example1 ? "example1" : "example2";
}

std::optional<ScaleRule> parse_scale_rule(std::string_view name) {
  if (name == "example1") return ScaleRule::example1;
  if (name == "example2") return ScaleRule::example2;
  return std::nullopt;
}

void ScaleSequence::validate() const {
  if (values.empty()) throw InputError("scale sequence is empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < -1 || values[k] > 1) {
      std::ostringstream os;
      os << "scale value s_" << k << " = " << values[k] << " is outside {-1, 0, 1}";
      throw InputError(os.str());
    }
    if (k > 0 && std::abs(values[k] - values[k - 1]) > 1) {
      std::ostringstream os;
      os << "invalid scale transition between s_" << k - 1 << " = " << values[k - 1]
         << " and s_" << k << " = " << values[k];
      throw InputError(os.str());
    }
  }
  if (rule == ScaleRule::example2) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      const bool left = k > 0 && values[k - 1] == values[k];
      const bool right = k + 1 < values.size() && values[k + 1] == values[k];
      if (!left && !right) {
        std::ostringstream os;
        os << "isolated scale at k = " << k << ": every window needs a neighbour of the same size";
        throw InputError(os.str());
      }
    }
  }
}

NsgSystem::NsgSystem(std::vector<NsgEntry> entries, double delta, FrequencyRange b_range,
                     std::optional<ChainInfo> chain)
    : entries_(std::move(entries)), delta_(delta), b_range_(b_range), chain_(std::move(chain)) {
  if (entries_.empty()) throw InputError("a system needs at least one window");
  require_positive(delta_, "separation delta");
  require_positive(b_range_.lower, "b_L");
  require_positive(b_range_.upper, "b_U");
  if (b_range_.lower > b_range_.upper) throw InputError("b_range must satisfy b_L <= b_U");
  constexpr double kRel = 1e-12;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    require_positive(e.b, "frequency step b_k");
    if (!std::isfinite(e.center)) throw InputError("window centers must be finite");
    if (e.b < b_range_.lower * (1 - kRel) || e.b > b_range_.upper * (1 + kRel)) {
      std::ostringstream os;
      os << "b_" << k << " = " << e.b << " lies outside [" << b_range_.lower << ", "
         << b_range_.upper << "]";
      throw InputError(os.str());
    }
    if (k > 0) {
      const double gap = e.center - entries_[k - 1].center;
      if (!(gap > 0.0)) throw InputError("window centers must be strictly increasing");
      if (gap < delta_ * (1 - kRel)) {
        std::ostringstream os;
        os << "gap a_" << k << " - a_" << k - 1 << " = " << gap << " is below delta = " << delta_;
        throw InputError(os.str());
      }
    }
  }
}

namespace {

FrequencyRange observed_range(const std::vector<NsgEntry>& entries) {
  if (entries.empty()) throw InputError("a system needs at least one window");
  FrequencyRange r{entries.front().b, entries.front().b};
  for (const auto& e : entries) {
    r.lower = std::min(r.lower, e.b);
    r.upper = std::max(r.upper, e.b);
  }
  return r;
}

}  // namespace

NsgSystem::NsgSystem(std::vector<NsgEntry> entries, double delta)
    : NsgSystem(entries, delta, observed_range(entries)) {}

double NsgSystem::min_gap() const {
  double gap = kInf;
  for (std::size_t k = 1; k < entries_.size(); ++k)
    gap = std::min(gap, entries_[k].center - entries_[k - 1].center);
  return gap;
}

Interval NsgSystem::covered_interval() const {
  return Interval{entries_.front().center, entries_.back().center};
}

double NsgSystem::min_feature_scale() const {
  double s = kInf;
  for (const auto& e : entries_) s = std::min(s, e.window.feature_scale());
  return s;
}

double NsgSystem::max_extent_scale() const {
  double s = 0.0;
  for (const auto& e : entries_) s = std::max(s, e.window.extent_scale());
  return s;
}

bool NsgSystem::all_compact() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const NsgEntry& e) { return e.window.support().has_value(); });
}

NsgSystem build_scale_system(const ScaleSequence& sequence, double a0) {
  sequence.validate();
  const auto& s = sequence.values;
  std::vector<double> centers{a0};
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const int cur = s[k], next = s[k + 1];
    double step = 0.0;
    if (sequence.rule == ScaleRule::example1) {
      if (cur > next) step = std::ldexp(1.0, -cur) * 5.0 / 6.0;
      else if (cur == next) step = std::ldexp(1.0, -cur + 1) / 3.0;
      else step = std::ldexp(1.0, -next) * 5.0 / 6.0;
    } else {
      if (cur == next) step = std::ldexp(1.0, -next - 1);
      else if (cur > next) step = std::ldexp(1.0, -next) / 3.0;
      else step = std::ldexp(1.0, -cur) / 3.0;
    }
    centers.push_back(centers.back() + step);
  }
  std::vector<NsgEntry> entries;
  entries.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = std::ldexp(1.0, s[k]);
    WindowSpec w = sequence.rule == ScaleRule::example1
                       ? WindowSpec::hann(centers[k], d)
                       : WindowSpec::gaussian(2.5, centers[k], d);
    entries.push_back({std::move(w), centers[k], d});
  }
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double delta = sequence.rule == ScaleRule::example1 ? 1.0 / 3.0 : 0.25;
  return NsgSystem(std::move(entries), delta, {std::ldexp(1.0, *lo), std::ldexp(1.0, *hi)},
                   ChainInfo{sequence, a0, ChainInfo::Stage::plain, 0.0});
}

NsgSystem bandlimit_system(const NsgSystem& system, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw InputError("band limit omega must be positive");
  std::vector<NsgEntry> entries;
  entries.reserve(system.size());
  for (const auto& e : system.entries()) {
    entries.push_back(
        {WindowSpec::convolution(WindowSpec::raised_cosine_band(omega), e.window), e.center, e.b});
  }
  std::optional<ChainInfo> chain;
  if (system.chain() && system.chain()->stage == ChainInfo::Stage::plain) {
    chain = *system.chain();
    chain->stage = ChainInfo::Stage::bandlimited;
    chain->omega = omega;
  }
  return NsgSystem(std::move(entries), system.delta(), system.b_range(), std::move(chain));
}

NsgSystem truncate_system(const NsgSystem& system) {
  std::vector<NsgEntry> entries;
  entries.reserve(system.size());
  for (const auto& e : system.entries()) {
    const double half = 0.5 / e.b;
    entries.push_back(
        {WindowSpec::truncation(e.window, {e.center - half, e.center + half}), e.center, e.b});
  }
  std::optional<ChainInfo> chain;
  if (system.chain() && system.chain()->stage == ChainInfo::Stage::plain) {
    chain = *system.chain();
    chain->stage = ChainInfo::Stage::truncated;
  }
  return NsgSystem(std::move(entries), system.delta(), system.b_range(), std::move(chain));
}

std::string_view to_string(DecayShape shape) {
  return shape == DecayShape::centered ? "centered" : "gap";
}

std::optional<DecayShape> parse_decay_shape(std::string_view name) {
  if (name == "centered") return DecayShape::centered;
  if (name == "gap") return DecayShape::gap;
  return std::nullopt;
}

double DecayProfile::envelope(double t) const {
  if (shape == DecayShape::centered) return C * std::pow(1.0 + std::abs(t - center), -p);
  const double lo = center - half_gap, hi = center + half_gap;
  if (t >= hi) return C * std::pow(1.0 + (t - hi), -p);
  if (t < lo) return C * std::pow(1.0 + (lo - t), -p);
  return 0.0;
}

ProfileBounds profile_bounds(std::span<const DecayProfile> profiles) {
  if (profiles.empty()) throw InputError("no decay profiles given");
  ProfileBounds b{kInf, -kInf, kInf, -kInf};
  for (const auto& pr : profiles) {
    b.C_L = std::min(b.C_L, pr.C);
    b.C_U = std::max(b.C_U, pr.C);
    b.p_L = std::min(b.p_L, pr.p);
    b.p_U = std::max(b.p_U, pr.p);
  }
  return b;
}

double sup_norm(const WindowSpec& spec, double step) {
  Interval range;
  if (const auto s = spec.support()) {
    range = *s;
  } else {
    const double reach = 8.0 * spec.extent_scale();
    range = {spec.center() - reach, spec.center() + reach};
  }
  if (!(step > 0.0)) step = 1e-3 * spec.feature_scale();
  const SamplingGrid grid = make_grid(range.lo, range.hi, step);
  double best = std::abs(spec(spec.center()));
  for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, std::abs(spec(grid[i])));
  return best;
}

DecayProfile fit_decay_profile(const std::function<double(double)>& f, DecayShape shape,
                               double center, double half_gap, double p,
                               const SamplingGrid& grid) {
  if (!(p > 0.0)) throw DomainError("decay exponent p must be positive");
  DecayProfile unit{1.0, p, shape, center, half_gap};
  std::vector<double> ratio(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double v = std::abs(f(t));
    const double env = unit.envelope(t);
    if (env == 0.0) {
      if (v > 1e-14) {
        std::ostringstream os;
        os << "cannot fit a gap envelope: function is nonzero (" << v << ") at t = " << t
           << " inside the gap";
        throw InputError(os.str());
      }
      ratio[i] = 0.0;
    } else {
      ratio[i] = v / env;
    }
  }
  unit.C = grid_extrema(grid, ratio).upper();
  return unit;
}

TailProfileReport derive_tail_profile(const NsgSystem& sys, const NsgSystem& reference,
                                      const TailProfileOptions& options) {
  if (sys.size() != reference.size()) throw InputError("systems have different lengths");
  for (std::size_t k = 0; k < sys.size(); ++k) {
    if (std::abs(sys[k].center - reference[k].center) > 1e-12 ||
        std::abs(sys[k].b - reference[k].b) > 1e-12 * sys[k].b) {
      std::ostringstream os;
      os << "systems disagree on (a_k, b_k) at k = " << k;
      throw InputError(os.str());
    }
  }

  TailProfileReport report;
  report.step = options.step > 0.0 ? options.step : 1e-3 * sys.min_feature_scale();
  report.span = options.span > 0.0 ? options.span : 8.0 * reference.max_extent_scale();

  const auto& cs = sys.chain();
  const auto& cr = reference.chain();
  const bool same_chain = cs && cr && cs->sequence == cr->sequence && cs->a0 == cr->a0;
  const bool example1 = same_chain && cs->sequence.rule == ScaleRule::example1 &&
                        cs->stage == ChainInfo::Stage::bandlimited &&
                        cr->stage == ChainInfo::Stage::plain;
  const bool example2 = same_chain && cs->sequence.rule == ScaleRule::example2 &&
                        cs->stage == ChainInfo::Stage::plain &&
                        cr->stage == ChainInfo::Stage::truncated;

  const auto psi = [&](std::size_t k) {
    return [&, k](double t) { return sys[k].window(t) - reference[k].window(t); };
  };
  const auto sweep_grid = [&](std::size_t k, DecayShape shape, double half_gap) {
    const double reach = report.span + (shape == DecayShape::gap ? half_gap : 0.0);
    return make_grid(sys[k].center - reach, sys[k].center + reach, report.step);
  };

  if (!options.force_fit && example1) {
    report.closed_form = true;
    const double omega = cs->omega;
    for (std::size_t k = 0; k < sys.size(); ++k) {
      const int s = cs->sequence.values[k];
      const double h_inf = sup_norm(reference[k].window);
      const double widen = 1.0 + std::ldexp(1.0, -s - 1);
      report.profiles.push_back(
          {h_inf * 0.5 * omega * widen * widen, 2.0, DecayShape::centered, sys[k].center, 0.0});
    }
  } else if (!options.force_fit && example2) {
    report.closed_form = true;
    const double g_half = WindowSpec::gaussian(2.5)(0.5);
    for (std::size_t k = 0; k < sys.size(); ++k) {
      const int s = cs->sequence.values[k];
      report.profiles.push_back({std::sqrt(std::ldexp(1.0, s)) * g_half, 19.0, DecayShape::gap,
                                 sys[k].center, std::ldexp(1.0, -s - 1)});
    }
  } else {
    if (!options.p) throw InputError("no closed-form tail constants apply; a decay exponent p is required");
    for (std::size_t k = 0; k < sys.size(); ++k) {
      const double half_gap = options.shape == DecayShape::gap ? 0.5 / sys[k].b : 0.0;
      report.profiles.push_back(fit_decay_profile(psi(k), options.shape, sys[k].center, half_gap,
                                                  *options.p,
                                                  sweep_grid(k, options.shape, half_gap)));
    }
  }

  report.worst_ratio = 0.0;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const auto& pr = report.profiles[k];
    const SamplingGrid grid = sweep_grid(k, pr.shape, pr.half_gap);
    const auto diff = psi(k);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i];
      const double v = std::abs(diff(t));
      const double env = pr.envelope(t);
      double ratio;
      if (env > 0.0) ratio = v / env;
      else ratio = v > 1e-14 ? kInf : 0.0;
      if (ratio > report.worst_ratio) {
        report.worst_ratio = ratio;
        report.worst_index = k;
        report.worst_t = t;
      }
    }
  }
  report.verified = report.worst_ratio <= 1.0 + 1e-9;
  if (!report.verified && options.strict) {
    std::ostringstream os;
    os << "tail envelope violated for window " << report.worst_index << " at t = "
       << report.worst_t << " (|psi| / envelope = " << report.worst_ratio << ")";
    throw InputError(os.str());
  }
  return report;
}

}  // namespace nsframe
