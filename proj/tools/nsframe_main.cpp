#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nsframe/certify.hpp"
#include "nsframe/error.hpp"
#include "nsframe/io.hpp"
#include "nsframe/nsgt.hpp"
#include "nsframe/reproduce.hpp"

namespace {

using namespace nsframe;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotPainless = 2;
constexpr int kNotCertified = 3;

double grid_step_from_env() {
  const char* raw = std::getenv("NSFRAME_GRID_STEP");
  if (!raw || !*raw) return 0.0;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
    throw InputError(std::string("NSFRAME_GRID_STEP must be a positive number, got '") + raw + "'");
  return v;
}

FrameCertificate as_reference(const ReferenceBounds& r) {
  FrameCertificate c;
  c.verdict = r.A > 0.0 ? Verdict::certified : Verdict::not_certified;
  c.A = r.A;
  c.B = r.B;
  return c;
}

// The painless reference of a perturbation: explicit bounds, explicit
// reference windows, or the unfiltered chain behind a bandlimited one.
FrameCertificate perturbation_reference(const SystemConfig& cfg, double step) {
  if (cfg.reference) return as_reference(*cfg.reference);
  if (const auto ref = cfg.reference_system()) return painless_certificate(*ref, step).certificate;
  if (cfg.scale_sequence && cfg.scale_sequence->bandlimit) {
    auto plain = *cfg.scale_sequence;
    plain.bandlimit.reset();
    SystemConfig base = cfg;
    base.scale_sequence = plain;
    return painless_certificate(base.system(), step).certificate;
  }
  throw InputError("missing key 'config.reference' (or 'config.reference_windows')");
}

FrameCertificate run_certify(const SystemConfig& cfg, CertMethod method, double step) {
  switch (method) {
    case CertMethod::painless:
      return painless_certificate(cfg.system(), step).certificate;
    case CertMethod::walnut: {
      const NsgSystem sys = cfg.system();
      WalnutOptions opt;
      opt.grid_step = step;
      if (cfg.profiles) opt.profiles = cfg.resolved_profiles(sys);
      return walnut_certificate(sys, opt);
    }
    case CertMethod::existence: {
      if (!cfg.existence) throw InputError("missing key 'config.existence'");
      if (!cfg.delta) throw InputError("missing key 'config.delta'");
      if (!cfg.profiles) throw InputError("missing key 'config.profiles'");
      const auto& e = *cfg.existence;
      if (cfg.profiles->size() != e.centers.size())
        throw InputError("config.profiles: need one profile per existence center");
      std::vector<DecayProfile> profiles;
      for (std::size_t k = 0; k < e.centers.size(); ++k) {
        const auto& p = (*cfg.profiles)[k];
        profiles.push_back({p.C, p.p, p.shape, e.centers[k], p.half_gap.value_or(0.0)});
      }
      ExistenceParams params;
      params.mu = e.mu;
      return e.frequency_side
                 ? existence_search_frequency_side(e.centers, profiles, *cfg.delta, e.A0, e.B0, params)
                 : existence_search(e.centers, profiles, *cfg.delta, e.A0, e.B0, params);
    }
    case CertMethod::perturbation: {
      const NsgSystem sys = cfg.system();
      const auto profiles = cfg.resolved_profiles(sys);
      return perturbation_certificate(perturbation_reference(cfg, step), profiles, sys.delta(),
                                      sys.b_range());
    }
    case CertMethod::almost_painless: {
      const NsgSystem g = cfg.system();
      const auto profiles = cfg.resolved_profiles(g);
      const NsgSystem h = cfg.reference_system().value_or(truncate_system(g));
      const FrameCertificate ref = painless_certificate(h, step).certificate;
      return almost_painless_certificate(g, h, ref, profiles);
    }
  }
  throw InputError("unknown method");
}

int cmd_certify(const std::string& config_path, const std::string& method_name,
                const std::string& report_path) {
  const auto method = parse_cert_method(method_name);
  if (!method) throw InputError("unknown method '" + method_name + "'");
  const SystemConfig cfg = load_config(config_path);
  const auto start = std::chrono::steady_clock::now();
  const FrameCertificate cert = run_certify(cfg, *method, grid_step_from_env());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto report = certificate_to_json(cert, seconds);
  if (!report_path.empty()) {
    std::ofstream os(report_path);
    if (!os) throw InputError("cannot write report " + report_path);
    os << report.dump(2) << "\n";
  }
  std::cout << to_string(cert.method) << ": " << to_string(cert.verdict) << "  A = " << cert.A
            << "  B = ";
  if (cert.B) std::cout << *cert.B;
  else std::cout << "inf";
  std::cout << "\n";
  for (const auto& n : cert.notes) std::cout << "  " << n << "\n";
  return cert.certified() ? kOk : kNotCertified;
}

DiscreteSystem discrete_from(const SystemConfig& cfg) {
  if (!cfg.dt) throw InputError("missing key 'config.dt'");
  if (!cfg.L) throw InputError("missing key 'config.L'");
  DiscreteSystem d = discretize(cfg.system(), *cfg.L, *cfg.dt);
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
  return d;
}

int cmd_transform(const std::string& config_path, const std::string& in, const std::string& out,
                  bool inverse) {
  const SystemConfig cfg = load_config(config_path);
  const DiscreteSystem sys = discrete_from(cfg);
  if (inverse) {
    if (!sys.painless()) {
      std::cerr << "error: the inverse transform needs a painless system\n";
      return kNotPainless;
    }
    CoefficientSet c = read_coefficients(in);
    c.length = sys.length();
    c.dt = sys.dt();
    const Signal f = synthesize(painless_duals(sys), c);
    std::vector<double> re(f.size());
    double imag = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
      re[n] = f[n].real();
      imag = std::max(imag, std::abs(f[n].imag()));
    }
    write_signal(out, re);
    std::cout << "reconstructed " << re.size() << " samples (max |imag| = " << imag << ")\n";
    return kOk;
  }
  const auto f = read_signal(in);
  const CoefficientSet c = analyze(sys, f);
  write_coefficients(out, c);
  double fe = 0.0;
  for (double x : f) fe += x * x;
  std::cout << "energy ratio " << (fe > 0.0 ? c.energy() / fe : 0.0) << "\n";
  return kOk;
}

int cmd_reproduce(int example) {
  ReproOptions opt;
  opt.grid_step = grid_step_from_env();
  const ReproReport rep = reproduce_example(example, opt);
  std::cout << format_report(rep);
  return rep.ok() ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame certification and transforms for nonstationary Gabor systems"};
  app.require_subcommand(1);

  std::string config, method, report, in, out;
  bool inverse = false;
  int example = 1;

  auto* certify = app.add_subcommand("certify", "Certify that a window system is a frame");
  certify->add_option("config", config, "System config (JSON)")->required();
  certify->add_option("--method", method, "painless|walnut|existence|perturbation|almost-painless")
      ->required();
  certify->add_option("--report", report, "Write the certificate report here");

  auto* transform = app.add_subcommand("transform", "Analyze a signal or synthesize from coefficients");
  transform->add_option("config", config, "System config (JSON)")->required();
  transform->add_option("--in", in, "Input signal (f64) or coefficients with --inverse")->required();
  transform->add_option("--out", out, "Output coefficients, or signal with --inverse")->required();
  transform->add_flag("--inverse", inverse, "Synthesize with the painless dual windows");

  auto* reproduce = app.add_subcommand("reproduce", "Rerun a worked example and compare");
  reproduce->add_option("--example", example, "1 or 2")->required()->check(CLI::Range(1, 2));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*certify) return cmd_certify(config, method, report);
    if (*transform) return cmd_transform(config, in, out, inverse);
    if (*reproduce) return cmd_reproduce(example);
  } catch (const nsframe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
