#include "nsframe/nsgt.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "nsframe/error.hpp"
#include "nsframe/walnut.hpp"

namespace nsframe {

namespace {

// FFTW planning is not thread-safe; plans are made once per (size, sign) and
// executed on caller buffers through the new-array interface.
fftw_plan cached_plan(std::size_t n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto& plan = plans[{n, sign}];
  if (!plan) {
    std::vector<Complex> a(n), b(n);
    plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()), sign,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw NumericalError("FFTW could not plan a transform", 0.0);
  }
  return plan;
}

void dft(Signal& in, Signal& out, int sign) {
  out.resize(in.size());
  fftw_execute_dft(cached_plan(in.size(), sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

double norm2(const Signal& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

Complex inner(const Signal& a, const Signal& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

std::size_t nearest_divisor(std::size_t L, double target) {
  std::size_t best = 1;
  for (std::size_t m = 1; m <= L; ++m)
    if (L % m == 0 && std::abs(static_cast<double>(m) - target) <
                          std::abs(static_cast<double>(best) - target))
      best = m;
  return best;
}

struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  Signal vector;
};

template <class Op>
PowerResult power_iteration(Op&& op, Signal v, const SpectralOptions& options) {
  PowerResult r;
  double prev = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Signal w = op(v);
    const double rq = inner(v, w).real();
    const double nw = norm2(w);
    r.iterations = it;
    r.value = rq;
    if (nw == 0.0) {
      r.converged = true;
      break;
    }
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
    if (it > 1 && std::abs(rq - prev) <= options.tolerance * std::max(1.0, std::abs(rq))) {
      r.converged = true;
      break;
    }
    prev = rq;
  }
  r.vector = std::move(v);
  return r;
}

}  // namespace

DiscreteSystem::DiscreteSystem(std::size_t length, double dt, std::vector<Signal> windows,
                               std::vector<std::size_t> channels, std::vector<bool> covered)
    : length_(length),
      dt_(dt),
      windows_(std::move(windows)),
      channels_(std::move(channels)),
      covered_(std::move(covered)) {
  if (length_ == 0) throw InputError("signal length must be positive");
  if (!(dt_ > 0.0)) throw InputError("sample period must be positive");
  if (windows_.empty()) throw InputError("empty window system");
  if (windows_.size() != channels_.size())
    throw InputError("one channel count per window is required");
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    if (windows_[k].size() != length_) {
      std::ostringstream os;
      os << "window " << k << " has " << windows_[k].size() << " samples, expected " << length_;
      throw InputError(os.str());
    }
    if (channels_[k] == 0 || length_ % channels_[k] != 0) {
      std::ostringstream os;
      os << "window " << k << ": M_k = " << channels_[k] << " does not divide L = " << length_;
      throw InputError(os.str());
    }
  }
  if (covered_.empty()) covered_.assign(length_, true);
  if (covered_.size() != length_) throw InputError("covered mask has the wrong length");
}

std::vector<double> DiscreteSystem::diagonal() const {
  std::vector<double> d(length_, 0.0);
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    const double M = static_cast<double>(channels_[k]);
    for (std::size_t n = 0; n < length_; ++n) d[n] += M * std::norm(windows_[k][n]);
  }
  return d;
}

bool DiscreteSystem::painless() const {
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    std::vector<std::size_t> nz;
    for (std::size_t n = 0; n < length_; ++n)
      if (windows_[k][n] != Complex{}) nz.push_back(n);
    if (nz.size() <= 1) continue;
    // Shortest circular arc holding every nonzero sample.
    std::size_t gap = nz.front() + length_ - nz.back();
    for (std::size_t i = 1; i < nz.size(); ++i) gap = std::max(gap, nz[i] - nz[i - 1]);
    if (length_ - gap + 1 > channels_[k]) return false;
  }
  return true;
}

DiscreteSystem discretize(const NsgSystem& system, std::size_t length, double dt,
                          const DiscretizeOptions& options) {
  if (length == 0 || !(dt > 0.0)) throw InputError("need L > 0 and dt > 0");
  const double period = static_cast<double>(length) * dt;
  const Interval cov = system.covered_interval();
  if (cov.length() > period) {
    std::ostringstream os;
    os << "covered interval [" << cov.lo << ", " << cov.hi << "] does not fit in L*dt = " << period;
    throw InputError(os.str());
  }

  std::vector<Signal> windows;
  std::vector<std::size_t> channels;
  std::vector<std::string> warnings;
  const double scale = std::sqrt(dt);
  const long Ll = static_cast<long>(length);
  for (std::size_t k = 0; k < system.size(); ++k) {
    const auto& e = system[k];
    const double r = 1.0 / (e.b * dt);
    const auto M = static_cast<std::size_t>(std::max(1L, std::lround(r)));
    if (length % M != 0) {
      const std::size_t next_L = (length + M - 1) / M * M;
      const std::size_t m = nearest_divisor(length, r);
      std::ostringstream os;
      os << "window " << k << ": M_k = round(1 / (b_k dt)) = " << M << " does not divide L = "
         << length << "; nearest admissible L = " << next_L << ", or dt = " << 1.0 / (e.b * m)
         << " (M_k = " << m << ")";
      throw InputError(os.str());
    }
    channels.push_back(M);

    Signal g(length, Complex{});
    const auto add = [&](long j) {
      const double v = e.window(static_cast<double>(j) * dt);
      g[static_cast<std::size_t>(((j % Ll) + Ll) % Ll)] += scale * v;
    };
    if (const auto s = e.window.support()) {
      const long j0 = static_cast<long>(std::ceil(s->lo / dt - 1e-9));
      const long j1 = static_cast<long>(std::floor(s->hi / dt + 1e-9));
      for (long j = j0; j <= j1; ++j) add(j);
      if (s->length() > period) {
        std::ostringstream os;
        os << "window " << k << ": support length " << s->length()
           << " exceeds the period L*dt = " << period << " and wraps onto itself";
        warnings.push_back(os.str());
      }
    } else {
      const long j0 = std::lround((e.center - 0.5 * period) / dt);
      for (long j = j0; j < j0 + Ll; ++j) add(j);
      const double peak = std::abs(e.window(e.center));
      const double edge = std::max(std::abs(e.window(e.center - 0.5 * period)),
                                   std::abs(e.window(e.center + 0.5 * period)));
      if (peak > 0.0 && edge > options.alias_tolerance * peak) {
        std::ostringstream os;
        os << "window " << k << ": relative magnitude " << edge / peak
           << " at half a period from its center; the periodized window aliases";
        warnings.push_back(os.str());
      }
    }
    windows.push_back(std::move(g));
  }

  std::vector<bool> covered(length, true);
  if (system.size() >= 2) {
    for (std::size_t n = 0; n < length; ++n) {
      const double off = std::fmod(std::fmod(static_cast<double>(n) * dt - cov.lo, period) + period, period);
      covered[n] = off <= cov.length() + 1e-9 * period;
    }
  }
  DiscreteSystem out(length, dt, std::move(windows), std::move(channels), std::move(covered));
  out.warnings = std::move(warnings);
  return out;
}

double CoefficientSet::energy() const {
  double s = 0.0;
  for (const auto& row : rows)
    for (const auto& c : row) s += std::norm(c);
  return s;
}

CoefficientSet analyze(const DiscreteSystem& system, std::span<const Complex> f) {
  const std::size_t L = system.length();
  if (f.size() != L) {
    std::ostringstream os;
    os << "signal has " << f.size() << " samples, the system expects " << L;
    throw InputError(os.str());
  }
  CoefficientSet out;
  out.length = L;
  out.dt = system.dt();
  out.rows.resize(system.size());
  Signal folded;
  for (std::size_t k = 0; k < system.size(); ++k) {
    const std::size_t M = system.channels(k);
    folded.assign(M, Complex{});
    const auto& g = system.window(k);
    for (std::size_t n = 0; n < L; ++n) folded[n % M] += f[n] * std::conj(g[n]);
    dft(folded, out.rows[k], FFTW_FORWARD);
  }
  return out;
}

CoefficientSet analyze(const DiscreteSystem& system, std::span<const double> f) {
  const Signal c(f.begin(), f.end());
  return analyze(system, std::span<const Complex>(c));
}

Signal synthesize(const DiscreteSystem& synthesis_windows, const CoefficientSet& coefficients) {
  const auto& sys = synthesis_windows;
  const std::size_t L = sys.length();
  if (coefficients.rows.size() != sys.size() || coefficients.length != L)
    throw InputError("coefficient set does not match the synthesis system");
  Signal out(L, Complex{});
  Signal row, series;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const std::size_t M = sys.channels(k);
    if (coefficients.rows[k].size() != M) {
      std::ostringstream os;
      os << "coefficient row " << k << " has " << coefficients.rows[k].size()
         << " entries, expected M_k = " << M;
      throw InputError(os.str());
    }
    row = coefficients.rows[k];
    dft(row, series, FFTW_BACKWARD);
    const auto& y = sys.window(k);
    for (std::size_t n = 0; n < L; ++n) out[n] += y[n] * series[n % M];
  }
  return out;
}

DiscreteSystem painless_duals(const DiscreteSystem& system) {
  if (!system.painless())
    throw PreconditionError("dual windows are only available for painless systems");
  const auto d = system.diagonal();
  const auto& covered = system.covered();
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (covered[n] && !(d[n] > 0.0)) {
      std::ostringstream os;
      os << "sum_k M_k |g_k[n]|^2 vanishes at covered sample n = " << n
         << "; the system is not a frame there";
      throw InputError(os.str());
    }
  }
  std::vector<Signal> duals;
  std::vector<std::size_t> channels;
  for (std::size_t k = 0; k < system.size(); ++k) {
    Signal g = system.window(k);
    for (std::size_t n = 0; n < g.size(); ++n) g[n] = d[n] > 0.0 ? g[n] / d[n] : Complex{};
    duals.push_back(std::move(g));
    channels.push_back(system.channels(k));
  }
  return DiscreteSystem(system.length(), system.dt(), std::move(duals), std::move(channels),
                        system.covered());
}

SpectralBounds frame_bounds_bruteforce(const DiscreteSystem& system, const SpectralOptions& options) {
  const std::size_t L = system.length();
  if (L > options.max_length) {
    std::ostringstream os;
    os << "L = " << L << " exceeds the brute-force cap of " << options.max_length;
    throw InputError(os.str());
  }
  const auto& covered = system.covered();
  const auto restrict = [&](Signal& v) {
    if (!options.restrict_to_covered) return;
    for (std::size_t n = 0; n < L; ++n)
      if (!covered[n]) v[n] = Complex{};
  };
  const auto S = [&](const Signal& v) {
    Signal w = apply_frame_operator_walnut(system, system, v);
    restrict(w);
    return w;
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Signal start(L);
  for (auto& x : start) x = {normal(rng), normal(rng)};
  restrict(start);
  const double n0 = norm2(start);
  for (auto& x : start) x /= n0;

  const PowerResult top = power_iteration(S, start, options);
  const double sigma = top.value;
  const PowerResult shifted = power_iteration(
      [&](const Signal& v) {
        Signal w = S(v);
        for (std::size_t n = 0; n < L; ++n) w[n] = sigma * v[n] - w[n];
        restrict(w);
        return w;
      },
      start, options);

  const auto residual = [&](const Signal& v, double lambda) {
    Signal w = S(v);
    for (std::size_t n = 0; n < L; ++n) w[n] -= lambda * v[n];
    return norm2(w);
  };

  SpectralBounds out;
  out.lambda_max = sigma;
  out.lambda_min = sigma - shifted.value;
  out.iterations_max = top.iterations;
  out.iterations_min = shifted.iterations;
  out.converged = top.converged && shifted.converged;
  out.residual_max = residual(top.vector, out.lambda_max);
  out.residual_min = residual(shifted.vector, out.lambda_min);
  if (!out.converged && options.require_convergence) {
    std::ostringstream os;
    os << "power iteration did not converge in " << options.max_iterations << " iterations";
    throw NumericalError(os.str(), std::max(out.residual_max, out.residual_min));
  }
  return out;
}

}  // namespace nsframe
