#include "nsframe/walnut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsframe/error.hpp"
#include "nsframe/estimates.hpp"

namespace nsframe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Where the infimum of G_0 is meaningful: the covered interval, or the
// window's own support for a one-window system.
Interval estimate_region(const NsgSystem& sys) {
  if (sys.size() >= 2) return sys.covered_interval();
  const auto& w = sys[0].window;
  if (const auto s = w.support()) return *s;
  const double half = 0.5 * w.extent_scale();
  return {sys[0].center - half, sys[0].center + half};
}

// Region swept for the overlap sums; for unbounded windows it extends four
// window extents past the outermost centers, beyond which every product is
// dominated by the profile tail.
Interval sweep_region(const NsgSystem& sys) {
  if (sys.all_compact()) {
    Interval r{kInf, -kInf};
    for (const auto& e : sys.entries()) {
      const auto s = *e.window.support();
      r.lo = std::min(r.lo, s.lo);
      r.hi = std::max(r.hi, s.hi);
    }
    return r;
  }
  const double reach = 4.0 * sys.max_extent_scale();
  const Interval c = sys.covered_interval();
  return {c.lo - reach, c.hi + reach};
}

// A gap envelope C (1 + dist(t, [a - w, a + w]))^{-p} is dominated by the
// centered envelope C (1 + w)^p (1 + |t - a|)^{-p}.
DecayProfile as_centered(const DecayProfile& p) {
  if (p.shape == DecayShape::centered) return p;
  return {p.C * std::pow(1.0 + p.half_gap, p.p), p.p, DecayShape::centered, p.center, 0.0};
}

struct Sweep {
  ResidualEstimate residual;
  double overlap = 0.0;  // sup_t sum_{k,l} b_k^{-1} |g_k(t - l/b_k)| |g_k(t)|, incl. margin and tail
  double abs_sum = 0.0;  // sup_t sum_k |g_k(t)|, incl. margin
};

double max_b(const NsgSystem& sys) {
  double b = 0.0;
  for (const auto& e : sys.entries()) b = std::max(b, e.b);
  return b;
}

double min_b(const NsgSystem& sys) {
  double b = kInf;
  for (const auto& e : sys.entries()) b = std::min(b, e.b);
  return b;
}

Sweep sweep_overlaps(const NsgSystem& sys, const WalnutOptions& options) {
  const std::size_t K = sys.size();
  const double h0 = options.grid_step > 0.0 ? options.grid_step : default_grid_step(sys);
  const bool compact = sys.all_compact();

  int L = 0;
  if (compact) {
    // Products with |l| / b_k >= |supp g_k| vanish identically.
    for (const auto& e : sys.entries()) {
      const double len = e.window.support()->length();
      L = std::max(L, static_cast<int>(std::ceil(len * e.b - 1e-12)) - 1);
    }
  } else {
    if (options.l_max < 1) throw InputError("l_max must be at least 1");
    L = options.l_max;
  }

  // When every period 1/b_k is a whole number of grid steps the shifted
  // windows are read from one cached sampling.
  const double shortest = 1.0 / max_b(sys);
  double h = shortest / std::ceil(shortest / h0 - 1e-9);
  bool aligned = true;
  std::vector<long> shift(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double r = 1.0 / (sys[k].b * h);
    shift[k] = std::lround(r);
    if (std::abs(r - static_cast<double>(shift[k])) > 1e-9 * r) aligned = false;
  }
  if (!aligned) h = h0;

  const Interval region = sweep_region(sys);
  const SamplingGrid grid = make_grid(region.lo, region.hi, h);
  const std::size_t N = grid.size();
  long E = 0;
  if (aligned)
    for (long s : shift) E = std::max(E, static_cast<long>(L) * s);

  // |g_k| on grid indices -E .. N-1+E, with the index range where it can be nonzero.
  std::vector<std::vector<double>> cache(K);
  std::vector<long> nz_lo(K), nz_hi(K);
  const long total = static_cast<long>(N) + 2 * E;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& w = sys[k].window;
    long lo = -E, hi = static_cast<long>(N) - 1 + E;
    if (const auto s = w.support()) {
      lo = std::max(lo, static_cast<long>(std::floor((s->lo - grid.begin) / h)) - 1);
      hi = std::min(hi, static_cast<long>(std::ceil((s->hi - grid.begin) / h)) + 1);
    }
    nz_lo[k] = lo;
    nz_hi[k] = hi;
    cache[k].assign(static_cast<std::size_t>(total), 0.0);
    for (long j = lo; j <= hi; ++j) cache[k][static_cast<std::size_t>(j + E)] = std::abs(w(grid[0] + h * static_cast<double>(j)));
  }
  const auto base = [&](std::size_t k, long i) {
    return cache[k][static_cast<std::size_t>(i + E)];
  };

  Sweep out;
  out.residual.l_max = L;
  out.residual.grid_step = h;

  std::vector<double> sum(N), overlap(N, 0.0), abs_sum(N, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (long i = std::max(0L, nz_lo[k]); i <= std::min(static_cast<long>(N) - 1, nz_hi[k]); ++i)
      abs_sum[static_cast<std::size_t>(i)] += base(k, i);

  for (int l = -L; l <= L; ++l) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      const double inv_b = 1.0 / sys[k].b;
      const long i0 = std::max(0L, nz_lo[k]);
      const long i1 = std::min(static_cast<long>(N) - 1, nz_hi[k]);
      for (long i = i0; i <= i1; ++i) {
        const double g = base(k, i);
        if (g == 0.0) continue;
        double shifted;
        if (aligned) {
          shifted = base(k, i - static_cast<long>(l) * shift[k]);
        } else {
          shifted = std::abs(sys[k].window(grid[static_cast<std::size_t>(i)] - l * inv_b));
        }
        const double prod = g * shifted;
        sum[static_cast<std::size_t>(i)] += prod;
        overlap[static_cast<std::size_t>(i)] += inv_b * prod;
      }
    }
    if (l == 0) continue;
    const GridExtrema ex = grid_extrema(grid, sum);
    out.residual.computed += ex.max;
    out.residual.margin += ex.max_margin;
  }

  if (!compact && options.include_tail) {
    if (options.profiles.size() != K)
      throw PreconditionError(
          "windows of unbounded support need one decay profile each to bound the residual tail");
    std::vector<DecayProfile> centered;
    for (const auto& p : options.profiles) centered.push_back(as_centered(p));
    const ProfileBounds pb = profile_bounds(centered);
    const double mu = options.mu.value_or((pb.p_L - 2.0) / 2.0);
    if (!(mu > 0.0) || !(mu < pb.p_L - 2.0)) {
      std::ostringstream os;
      os << "the residual tail needs 0 < mu < p_L - 2 (mu = " << mu << ", p_L = " << pb.p_L << ")";
      throw DomainError(os.str());
    }
    const double q = pb.p_L - 1.0 - mu;
    const double b_U = max_b(sys);
    const double Ld = static_cast<double>(L);
    const double per_t = separated_sum_bound(sys.delta(), 1.0 + mu, 1);
    const double l_tail = 2.0 * pb.C_U * pb.C_U * std::pow(1.0 + Ld / b_U, -q) *
                          tail_sum_bound(1.0 / (b_U + Ld), q);
    out.residual.tail = per_t * l_tail;
    out.residual.mu = mu;
  }

  const GridExtrema ov = grid_extrema(grid, overlap);
  out.overlap = ov.upper() + out.residual.tail / min_b(sys);
  out.abs_sum = grid_extrema(grid, abs_sum).upper();
  return out;
}

}  // namespace

WalnutKernel::WalnutKernel(const NsgSystem& g, const NsgSystem& gamma) : g_(g), gamma_(gamma) {
  if (g.size() != gamma.size()) throw InputError("window systems have different lengths");
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k].b != gamma[k].b) throw InputError("window systems disagree on b_k");
}

double WalnutKernel::term(std::size_t k, long l, double t) const {
  const double inv_b = 1.0 / g_[k].b;
  return inv_b * g_[k].window(t - static_cast<double>(l) * inv_b) * gamma_[k].window(t);
}

double default_grid_step(const NsgSystem& system) { return system.min_feature_scale() / 16.0; }

SamplingGrid covered_grid(const NsgSystem& system, double step) {
  const Interval r = estimate_region(system);
  return make_grid(r.lo, r.hi, step);
}

G0Result compute_G0(const NsgSystem& system, const SamplingGrid& grid) {
  if (system.size() == 0) throw InputError("empty window system");
  const Interval r = estimate_region(system);
  const std::size_t N = grid.size();
  const double tol = 1e-9 * std::max(1.0, r.length());
  if (N == 0 || grid[0] > r.lo + tol || grid[N - 1] < r.hi - tol) {
    std::ostringstream os;
    os << "grid [" << grid.begin << ", " << grid.end << "] does not cover [" << r.lo << ", "
       << r.hi << "]";
    throw InputError(os.str());
  }

  G0Result out{grid, std::vector<double>(N, 0.0), std::vector<double>(N, 0.0), {}, {}};
  for (const auto& e : system.entries()) {
    for (std::size_t i = 0; i < N; ++i) {
      const double v = e.window(grid[i]);
      out.unweighted[i] += v * v;
      out.weighted[i] += v * v / e.b;
    }
  }

  // A one-window system is judged on its half-open support.
  const bool half_open = system.size() == 1 && system[0].window.support().has_value();
  std::size_t i0 = 0, i1 = N - 1;
  while (i0 < N && grid[i0] < r.lo - tol) ++i0;
  while (i1 > i0 && (grid[i1] > r.hi + tol || (half_open && grid[i1] >= r.hi - tol))) --i1;
  const SamplingGrid sub{grid[i0], grid[i1], grid.step};
  const auto count = i1 - i0 + 1;
  out.weighted_extrema =
      grid_extrema(sub, std::span<const double>(out.weighted).subspan(i0, count));
  out.unweighted_extrema =
      grid_extrema(sub, std::span<const double>(out.unweighted).subspan(i0, count));
  return out;
}

ResidualEstimate residual_R(const NsgSystem& system, const WalnutOptions& options) {
  if (system.size() == 0) throw InputError("empty window system");
  return sweep_overlaps(system, options).residual;
}

WalnutBoundReport frame_bounds_walnut(const NsgSystem& system, const WalnutOptions& options) {
  if (system.size() == 0) throw InputError("empty window system");
  const Sweep sweep = sweep_overlaps(system, options);

  WalnutBoundReport rep;
  rep.residual = sweep.residual;
  rep.grid_step = sweep.residual.grid_step;
  rep.l_max = sweep.residual.l_max;

  const G0Result g0 = compute_G0(system, covered_grid(system, rep.grid_step));
  rep.A0 = g0.unweighted_extrema.min;
  rep.B0 = g0.unweighted_extrema.max;
  rep.R = sweep.residual.total();

  const double inv_lo = 1.0 / max_b(system);
  const double inv_hi = 1.0 / min_b(system);
  rep.ratio = inv_hi / inv_lo;

  const auto lower = [&](double A0, double R) {
    const double x = A0 - rep.ratio * R;
    return std::min(inv_lo * x, inv_hi * x);
  };
  rep.A_lower = lower(rep.A0, rep.R);
  rep.B_upper = inv_hi * (rep.B0 + rep.R);
  rep.lower_margin =
      rep.A_lower - lower(g0.unweighted_extrema.lower(), rep.R + sweep.residual.margin);
  rep.upper_margin = inv_hi * (g0.unweighted_extrema.max_margin + sweep.residual.margin);

  rep.bound_overlap = sweep.overlap;
  rep.bound_amalgam = kInf;
  if (options.operator_norm_bounds) {
    double sup_w = 0.0;
    bool finite = true;
    for (std::size_t k = 0; k < system.size() && finite; ++k) {
      WienerOptions wo;
      wo.step = std::min(1e-3, rep.grid_step);
      if (!system[k].window.support()) {
        if (k >= options.profiles.size()) {
          finite = false;
          break;
        }
        wo.profile = options.profiles[k];
      }
      sup_w = std::max(sup_w, (1.0 + 1.0 / system[k].b) * wiener_norm(system[k].window, wo).value);
    }
    if (finite) rep.bound_amalgam = sup_w * sweep.abs_sum;
  }
  return rep;
}

Signal apply_frame_operator_walnut(const DiscreteSystem& g, const DiscreteSystem& gamma,
                                   std::span<const Complex> f) {
  const std::size_t L = g.length();
  if (gamma.length() != L || gamma.size() != g.size())
    throw InputError("analysis and synthesis systems have different shapes");
  if (f.size() != L) {
    std::ostringstream os;
    os << "signal has " << f.size() << " samples, the system expects " << L;
    throw InputError(os.str());
  }
  Signal out(L, Complex{});
  Signal folded;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t M = g.channels(k);
    if (gamma.channels(k) != M) throw InputError("analysis and synthesis systems disagree on M_k");
    // sum_l conj(g_k[n - l M]) f[n - l M] depends on n mod M only.
    folded.assign(M, Complex{});
    const auto& gk = g.window(k);
    for (std::size_t n = 0; n < L; ++n) folded[n % M] += f[n] * std::conj(gk[n]);
    const auto& yk = gamma.window(k);
    const double scale = static_cast<double>(M);
    for (std::size_t n = 0; n < L; ++n) out[n] += scale * yk[n] * folded[n % M];
  }
  return out;
}

}  // namespace nsframe
