#include "nsframe/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsframe/error.hpp"

namespace nsframe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_separated(std::span<const double> centers, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  for (std::size_t k = 1; k < centers.size(); ++k) {
    if (centers[k] - centers[k - 1] < delta * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "centers " << k - 1 << " and " << k << " are closer than delta = " << delta;
      throw InputError(os.str());
    }
  }
}

std::vector<DecayProfile> centered_profiles(std::span<const DecayProfile> profiles,
                                            std::span<const double> centers) {
  if (profiles.empty()) throw InputError("no decay profiles given");
  if (profiles.size() != centers.size())
    throw InputError("need exactly one decay profile per center");
  std::vector<DecayProfile> out;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    DecayProfile p = profiles[k];
    if (p.shape == DecayShape::gap) p = {p.C * std::pow(1.0 + p.half_gap, p.p), p.p, DecayShape::centered, 0.0, 0.0};
    p.center = centers[k];
    if (!(p.C > 0.0)) throw DomainError("decay constants C_k must be positive");
    out.push_back(p);
  }
  return out;
}

double resolve_mu(std::optional<double> mu, double p_L) {
  if (!(p_L > 2.0)) {
    std::ostringstream os;
    os << "the existence bound needs p_L > 2 (p_L = " << p_L << ")";
    throw DomainError(os.str());
  }
  const double m = mu.value_or((p_L - 2.0) / 2.0);
  if (!(m > 0.0) || !(m < p_L - 2.0)) {
    std::ostringstream os;
    os << "mu = " << m << " must lie in (0, p_L - 2) = (0, " << p_L - 2.0 << ")";
    throw DomainError(os.str());
  }
  return m;
}

void finish_bounds(FrameCertificate& c) {
  if (c.verdict == Verdict::certified && !(c.A > 0.0 && (!c.B || c.A <= *c.B)))
    c.verdict = Verdict::not_certified;
}

FrameCertificate perturb(const FrameCertificate& reference, const ProfileBounds& pb,
                         const OverlapConstants& oc, CertMethod method) {
  if (!reference.certified())
    throw PreconditionError("the reference system carries no frame certificate");
  const double A_h = reference.A;
  const double check = pb.C_U * pb.C_U * oc.lambda;
  const double threshold = std::sqrt(A_h / oc.lambda);

  FrameCertificate c;
  c.method = method;
  c.constants = {{"E1", oc.E1},           {"E2", oc.E2},       {"lambda", oc.lambda},
                 {"C_U", pb.C_U},         {"C_L", pb.C_L},     {"p_L", pb.p_L},
                 {"p_U", pb.p_U},         {"A_h", A_h},        {"threshold", threshold},
                 {"check", check},        {"margin", threshold - pb.C_U}};
  if (method == CertMethod::almost_painless) c.constants["rel"] = oc.rel;
  if (reference.B) c.constants["B_h"] = *reference.B;

  if (check < A_h) {
    c.verdict = Verdict::certified;
    const double s = std::sqrt(check / A_h);
    c.A = A_h * (1.0 - s) * (1.0 - s);
    if (reference.B) {
      const double u = std::sqrt(check / *reference.B);
      c.B = *reference.B * (1.0 + u) * (1.0 + u);
    } else {
      c.notes.push_back("the reference has no upper bound; only A is certified");
    }
  } else {
    std::ostringstream os;
    os << "C_U = " << pb.C_U << " is not below the threshold sqrt(A_h / lambda) = " << threshold;
    c.notes.push_back(os.str());
  }
  finish_bounds(c);
  return c;
}

}  // namespace

std::string_view to_string(CertMethod method) {
  switch (method) {
    case CertMethod::painless: return "painless";
    case CertMethod::walnut: return "walnut";
    case CertMethod::existence: return "existence";
    case CertMethod::perturbation: return "perturbation";
    case CertMethod::almost_painless: return "almost-painless";
  }
  return "painless";
}

std::optional<CertMethod> parse_cert_method(std::string_view name) {
  for (auto m : {CertMethod::painless, CertMethod::walnut, CertMethod::existence,
                 CertMethod::perturbation, CertMethod::almost_painless})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::certified ? "certified" : "not_certified";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  if (name == "certified") return Verdict::certified;
  if (name == "not_certified") return Verdict::not_certified;
  return std::nullopt;
}

PainlessResult painless_certificate(const NsgSystem& system, double grid_step) {
  std::ostringstream bad;
  for (std::size_t k = 0; k < system.size(); ++k) {
    const auto s = system[k].window.support();
    if (!s) {
      bad << " k = " << k << " (unbounded support);";
    } else if (s->length() * system[k].b > 1.0 + 1e-12) {
      bad << " k = " << k << " (|supp| b_k = " << s->length() * system[k].b << ");";
    }
  }
  if (!bad.str().empty())
    throw PreconditionError("painless condition |supp g_k| b_k <= 1 fails for" + bad.str());

  // Only G_0 is sampled here, so a grid four times finer than the Walnut
  // default is cheap and keeps the slope margin near the extrema small.
  const double step = grid_step > 0.0 ? grid_step : default_grid_step(system) / 4.0;
  const G0Result g0 = compute_G0(system, covered_grid(system, step));

  PainlessResult out;
  out.grid = g0.grid;
  out.G0 = g0.weighted;
  auto& c = out.certificate;
  c.method = CertMethod::painless;
  const auto& ex = g0.weighted_extrema;
  c.A = ex.min;
  c.B = ex.max;
  c.verdict = c.A > 0.0 ? Verdict::certified : Verdict::not_certified;
  c.constants = {{"A_h", ex.min},          {"B_h", ex.max},      {"argmin", ex.argmin},
                 {"argmax", ex.argmax},    {"A_margin", ex.min_margin},
                 {"B_margin", ex.max_margin}};
  c.provenance = {{"grid_step", g0.grid.step}};
  finish_bounds(c);

  out.duals.resize(system.size());
  for (std::size_t k = 0; k < system.size(); ++k) {
    auto& d = out.duals[k];
    d.resize(out.grid.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double G = out.G0[i];
      d[i] = G > 0.0 ? system[k].window(out.grid[i]) / G : 0.0;
    }
  }
  return out;
}

FrameCertificate walnut_certificate(const NsgSystem& system, const WalnutOptions& options) {
  const WalnutBoundReport r = frame_bounds_walnut(system, options);
  FrameCertificate c;
  c.method = CertMethod::walnut;
  c.verdict = r.certified() ? Verdict::certified : Verdict::not_certified;
  c.A = std::max(0.0, r.A_lower);
  c.B = r.B_upper;
  c.constants = {{"A0", r.A0},
                 {"B0", r.B0},
                 {"R", r.R},
                 {"R_computed", r.residual.computed},
                 {"R_tail", r.residual.tail},
                 {"R_margin", r.residual.margin},
                 {"ratio", r.ratio},
                 {"A_lower", r.A_lower},
                 {"B_upper", r.B_upper},
                 {"A_margin", r.lower_margin},
                 {"B_margin", r.upper_margin},
                 {"bound_overlap", r.bound_overlap}};
  if (std::isfinite(r.bound_amalgam)) c.constants["bound_amalgam"] = r.bound_amalgam;
  c.provenance = {{"grid_step", r.grid_step}, {"l_max", r.l_max}};
  if (r.residual.tail > 0.0) c.provenance["mu"] = r.residual.mu;
  if (!r.certified()) {
    std::ostringstream os;
    os << "A_0 = " << r.A0 << " does not exceed ratio * R = " << r.ratio * r.R;
    c.notes.push_back(os.str());
  }
  finish_bounds(c);
  return c;
}

ExistenceBound existence_bound_at(std::span<const DecayProfile> profiles, double delta,
                                  double epsilon, std::optional<double> mu) {
  const ProfileBounds pb = profile_bounds(profiles);
  ExistenceBound out;
  out.mu = resolve_mu(mu, pb.p_L);
  if (!(epsilon > 0.0) || !(epsilon < pb.C_L)) {
    std::ostringstream os;
    os << "epsilon = " << epsilon << " must lie in (0, C_L) = (0, " << pb.C_L << ")";
    throw DomainError(os.str());
  }
  if (epsilon > 1.0) throw DomainError("epsilon must not exceed 1 for the residual bound");

  out.epsilon = epsilon;
  const double m1 = 1.0 + out.mu;
  double E = 0.0;
  for (const auto& p : profiles) {
    out.b.push_back(std::pow(epsilon / p.C, 1.0 / p.p));
    E = std::max(E, std::pow(p.C, 1.0 + m1 / p.p));
  }
  out.ratio = std::pow(pb.C_U, 1.0 / pb.p_L) * std::pow(pb.C_L, -1.0 / pb.p_U) *
              std::pow(epsilon, 1.0 / pb.p_U - 1.0 / pb.p_L);
  const double S_t = separated_sum_bound(delta, m1, 1);
  const double S_l = separated_sum_bound(1.0, pb.p_L - 1.0 - out.mu, 1);
  out.R = E * std::pow(epsilon, 1.0 - m1 / pb.p_L) * S_t * S_l;
  return out;
}

FrameCertificate existence_search(std::span<const double> centers,
                                  std::span<const DecayProfile> profiles, double delta, double A0,
                                  std::optional<double> B0, const ExistenceParams& params) {
  check_separated(centers, delta);
  const auto prof = centered_profiles(profiles, centers);
  if (!(A0 > 0.0)) throw DomainError("A0 must be positive");
  const ProfileBounds pb = profile_bounds(prof);
  const double mu = resolve_mu(params.mu, pb.p_L);

  FrameCertificate c;
  c.method = CertMethod::existence;
  c.constants = {{"A0", A0}, {"C_L", pb.C_L}, {"C_U", pb.C_U}, {"p_L", pb.p_L}, {"p_U", pb.p_U}};
  if (B0) c.constants["B0"] = *B0;
  c.provenance = {{"mu", mu}};

  double last = kInf;
  for (int j = 1; j <= params.max_halvings; ++j) {
    const double eps = std::ldexp(pb.C_L, -j);
    if (eps > 1.0) continue;
    const ExistenceBound eb = existence_bound_at(prof, delta, eps, mu);
    last = eb.ratio * eb.R;
    if (last < A0) {
      const auto [bmin, bmax] = std::minmax_element(eb.b.begin(), eb.b.end());
      c.verdict = Verdict::certified;
      c.sequence = eb.b;
      c.A = (A0 - last) / *bmax;
      if (B0) c.B = (*B0 + eb.R) / *bmin;
      c.constants["ratio"] = eb.ratio;
      c.constants["R"] = eb.R;
      c.constants["ratio_R"] = last;
      c.provenance["epsilon0"] = eps;
      c.provenance["halvings"] = j;
      finish_bounds(c);
      return c;
    }
  }
  c.constants["ratio_R"] = last;
  std::ostringstream os;
  os << "epsilon grid exhausted after " << params.max_halvings
     << " halvings; last ratio * R = " << last;
  c.notes.push_back(os.str());
  return c;
}

FrameCertificate existence_search_frequency_side(std::span<const double> centers,
                                                 std::span<const DecayProfile> profiles,
                                                 double delta, double A0, std::optional<double> B0,
                                                 const ExistenceParams& params) {
  FrameCertificate c = existence_search(centers, profiles, delta, A0, B0, params);
  c.notes.push_back("frequency side: centers are b_k, the sequence holds time steps a_k");
  return c;
}

FrameCertificate decay_certificate(std::span<const double> centers,
                                   std::span<const DecayProfile> profiles, double delta,
                                   std::span<const double> b, double A0, std::optional<double> B0,
                                   const DecayBoundOptions& options) {
  check_separated(centers, delta);
  const auto prof = centered_profiles(profiles, centers);
  if (b.size() != prof.size()) throw InputError("need exactly one b_k per center");
  if (options.l_max < 1) throw InputError("l_max must be at least 1");
  for (double x : b)
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("every b_k must be positive");
  const ProfileBounds pb = profile_bounds(prof);
  const double mu = resolve_mu(options.mu, pb.p_L);

  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double b_U = *bmax;
  const double q_L = pb.p_L - 1.0 - mu;
  double lsum = 0.0;
  for (int l = 1; l <= options.l_max; ++l) {
    double worst = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k)
      worst = std::max(worst, prof[k].C * prof[k].C *
                                  std::pow(1.0 + l / b[k], -(prof[k].p - 1.0 - mu)));
    lsum += 2.0 * worst;
  }
  const double L = options.l_max;
  const double tail =
      2.0 * pb.C_U * pb.C_U * std::pow(1.0 + L / b_U, -q_L) * tail_sum_bound(1.0 / (b_U + L), q_L);
  const double R = separated_sum_bound(delta, 1.0 + mu, 1) * (lsum + tail);
  const double ratio = *bmax / *bmin;

  FrameCertificate c;
  c.method = CertMethod::existence;
  c.sequence.assign(b.begin(), b.end());
  c.constants = {{"A0", A0}, {"R", R}, {"R_tail", tail}, {"ratio", ratio}, {"ratio_R", ratio * R}};
  c.provenance = {{"mu", mu}, {"l_max", L}};
  if (ratio * R < A0) {
    c.verdict = Verdict::certified;
    c.A = (A0 - ratio * R) / *bmax;
    if (B0) c.B = (*B0 + R) / *bmin;
  }
  finish_bounds(c);
  return c;
}

FrameCertificate perturbation_certificate(const FrameCertificate& reference,
                                          std::span<const DecayProfile> profiles, double delta,
                                          FrequencyRange b_range) {
  if (profiles.empty()) throw InputError("no decay profiles given");
  for (const auto& p : profiles)
    if (p.shape != DecayShape::centered)
      throw PreconditionError("the perturbation certificate needs centered decay profiles");
  const ProfileBounds pb = profile_bounds(profiles);
  const OverlapConstants oc = overlap_constants(delta, b_range.lower, b_range.upper, pb.p_L,
                                                pb.p_U, OverlapVariant::perturbation);
  return perturb(reference, pb, oc, CertMethod::perturbation);
}

FrameCertificate almost_painless_certificate(const NsgSystem& g, const NsgSystem& h,
                                             const FrameCertificate& reference,
                                             std::span<const DecayProfile> profiles) {
  if (reference.method != CertMethod::painless)
    throw PreconditionError("the reference certificate is not a painless certificate");
  if (g.size() != h.size() || profiles.size() != g.size())
    throw InputError("systems and profiles must have the same length");
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto s = h[k].window.support();
    if (!s || s->length() * h[k].b > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "reference window " << k << " is not painless";
      throw PreconditionError(os.str());
    }
  }
  for (const auto& p : profiles)
    if (p.shape != DecayShape::gap)
      throw PreconditionError("the almost-painless certificate needs gap-shaped decay profiles");
  const ProfileBounds pb = profile_bounds(profiles);
  const OverlapConstants oc = overlap_constants(g.delta(), g.b_range().lower, g.b_range().upper,
                                                pb.p_L, pb.p_U, OverlapVariant::almost_painless);
  return perturb(reference, pb, oc, CertMethod::almost_painless);
}

}  // namespace nsframe
