#include "nsframe/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nsframe/error.hpp"

namespace nsframe {

namespace {

void require_domain(double delta, double p) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive");
  if (!(p > 1.0)) {
    std::ostringstream os;
    os << "p = " << p << " <= 1: the tail sum diverges";
    throw DomainError(os.str());
  }
}

// sum_{j>=0} (1 + D + j)^{-p}
double shifted_tail(double D, double p) {
  const double head = std::pow(1.0 + D, -p);
  return head * (1.0 + tail_sum_bound(1.0 / (1.0 + D), p));
}

}  // namespace

double tail_sum_bound(double delta, double p) {
  require_domain(delta, p);
  return std::pow(1.0 + delta, -p) * (1.0 / delta + p) / (p - 1.0);
}

double separated_sum_bound(double delta, double p, int rel) {
  if (rel < 1) throw DomainError("relative separation count must be at least 1");
  return 2.0 * rel * (1.0 + tail_sum_bound(delta, p));
}

WienerNorm wiener_norm(const WindowSpec& spec, const WienerOptions& options) {
  if (!(options.step > 0.0) || options.step > 1.0) throw InputError("wiener grid step must lie in (0, 1]");
  WienerNorm out;
  const auto n = static_cast<std::size_t>(std::ceil(1.0 / options.step - 1e-9));
  const double h = 1.0 / static_cast<double>(n);
  out.step = h;

  long first = 0, last = -1;
  double left_anchor = 0.0, right_anchor = 0.0;
  if (const auto s = spec.support()) {
    first = static_cast<long>(std::floor(s->lo));
    last = static_cast<long>(std::ceil(s->hi)) - 1;
  } else {
    if (!options.profile)
      throw InputError("window has unbounded support and no decay profile; the cell sum cannot be truncated");
    const auto& pr = *options.profile;
    if (!(pr.p > 1.0)) throw DomainError("decay profile exponent must exceed 1 to bound the cell sum");
    left_anchor = pr.center - (pr.shape == DecayShape::gap ? pr.half_gap : 0.0);
    right_anchor = pr.center + (pr.shape == DecayShape::gap ? pr.half_gap : 0.0);
    first = static_cast<long>(std::floor(left_anchor - options.cell_radius));
    last = static_cast<long>(std::ceil(right_anchor + options.cell_radius)) - 1;
    const double D_right = static_cast<double>(last + 1) - right_anchor;
    const double D_left = left_anchor - static_cast<double>(first);
    out.tail = pr.C * (shifted_tail(D_right, pr.p) + shifted_tail(D_left, pr.p));
  }

  std::vector<double> cell(n);
  for (long k = first; k <= last; ++k) {
    for (std::size_t j = 0; j < n; ++j)
      cell[j] = std::abs(spec(static_cast<double>(k) + (static_cast<double>(j) + 0.5) * h));
    const auto it = std::max_element(cell.begin(), cell.end());
    const auto i = static_cast<std::size_t>(it - cell.begin());
    double d = 0.0;
    if (i > 0) d = std::max(d, std::abs(cell[i] - cell[i - 1]));
    if (i + 1 < n) d = std::max(d, std::abs(cell[i + 1] - cell[i]));
    out.grid_sum += *it;
    out.margin += 0.5 * d;
    ++out.cells;
  }
  out.value = out.grid_sum + out.margin + out.tail;
  return out;
}

double wiener_shift_bound(const WindowSpec& spec, double delta, const WienerOptions& options) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  return (1.0 + 1.0 / delta) * wiener_norm(spec, options).value;
}

int relative_separation(double b_L, double delta) {
  if (!(b_L > 0.0) || !(delta > 0.0)) throw DomainError("b_L and delta must be positive");
  return std::max(1, static_cast<int>(std::floor(1.0 / (2.0 * b_L * delta))));
}

OverlapConstants overlap_constants(double delta, double b_L, double b_U, double p_L, double p_U,
                                   OverlapVariant variant) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(b_L > 0.0) || !(b_U >= b_L)) throw DomainError("need 0 < b_L <= b_U");
  if (!(p_L > 1.0)) throw DomainError("need p_L > 1");
  if (!(p_U >= p_L)) throw DomainError("need p_L <= p_U");
  OverlapConstants c;
  c.variant = variant;
  c.E1 = 1.0 + (1.0 / delta + p_L) / (std::pow(1.0 + delta, p_L) * (p_L - 1.0));
  c.E2 = 1.0 + (b_U + p_U) / (std::pow(1.0 + 1.0 / b_U, p_L) * (p_L - 1.0));
  if (variant == OverlapVariant::perturbation) {
    c.lambda = 4.0 / b_L * c.E1 * c.E2;
  } else {
    c.rel = relative_separation(b_L, delta);
    const double per_cell = std::max(1.0, 1.0 / (2.0 * b_L * delta));
    c.lambda = 8.0 / b_L * per_cell * c.E1 * c.E2;
  }
  return c;
}

double window_e2(double b, double p_L, double p) {
  if (!(p_L > 1.0) || !(b > 0.0)) throw DomainError("need b > 0 and p_L > 1");
  return 1.0 + (b + p) / (std::pow(1.0 + 1.0 / b, p_L) * (p_L - 1.0));
}

}  // namespace nsframe
