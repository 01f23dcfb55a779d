#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsframe/estimates.hpp"
#include "nsframe/grid.hpp"
#include "nsframe/walnut.hpp"
#include "nsframe/windows.hpp"

namespace nsframe {

enum class CertMethod { painless, walnut, existence, perturbation, almost_painless };
enum class Verdict { certified, not_certified };

std::string_view to_string(CertMethod method);
std::optional<CertMethod> parse_cert_method(std::string_view name);
std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view name);

struct FrameCertificate {
  CertMethod method = CertMethod::painless;
  Verdict verdict = Verdict::not_certified;
  double A = 0.0;
  std::optional<double> B;  // nullopt: no finite upper bound was established
  std::map<std::string, double> constants;
  std::map<std::string, double> provenance;  // grid_step, l_max, mu, epsilon0, ...
  std::vector<double> sequence;              // b_k^0 (or a_k^0) from an existence search
  std::vector<std::string> notes;

  bool certified() const { return verdict == Verdict::certified; }
  bool operator==(const FrameCertificate&) const = default;
};

struct PainlessResult {
  FrameCertificate certificate;
  SamplingGrid grid;
  std::vector<double> G0;
  // gamma_k = g_k / G_0 sampled on `grid`; zero where G_0 vanishes.
  std::vector<std::vector<double>> duals;
};

// Requires |supp g_k| b_k <= 1 for every k (PreconditionError listing the
// offenders otherwise). A and B are the extrema of G_0 = sum_k |g_k|^2 / b_k
// over the covered interval. grid_step 0 selects default_grid_step / 4.
PainlessResult painless_certificate(const NsgSystem& system, double grid_step = 0.0);

// Walnut estimate: A = min_k b_k^{-1} (A_0 - ratio R), B = max_k b_k^{-1} (B_0 + R).
FrameCertificate walnut_certificate(const NsgSystem& system, const WalnutOptions& options = {});

struct ExistenceParams {
  std::optional<double> mu;  // default (p_L - 2) / 2; must lie in (0, p_L - 2)
  int max_halvings = 64;     // epsilon_j = C_L 2^{-j}, j = 1..max_halvings
};

// Analytic bounds at one epsilon for the sequence b_k = (epsilon / C_k)^{1/p_k}.
struct ExistenceBound {
  double epsilon = 0.0;
  std::vector<double> b;
  double ratio = 0.0;  // C_U^{1/p_L} C_L^{-1/p_U} epsilon^{1/p_U - 1/p_L}
  double R = 0.0;      // max_k C_k^{1+(1+mu)/p_k} epsilon^{1-(1+mu)/p_L} S_t S_l
  double mu = 0.0;
};

// Throws DomainError unless 0 < epsilon < C_L and epsilon <= 1, p_L > 2 and
// mu in (0, p_L - 2).
ExistenceBound existence_bound_at(std::span<const DecayProfile> profiles, double delta,
                                  double epsilon, std::optional<double> mu = std::nullopt);

// Profiles bound the windows themselves: |g_k(t)| <= C_k (1 + |t - a_k|)^{-p_k}.
// Walks the epsilon grid until ratio * R < A0 and returns b_k^0 in
// `sequence`. B is reported when B0 is given. An exhausted grid yields a
// not-certified verdict carrying the last ratio * R.
FrameCertificate existence_search(std::span<const double> centers,
                                  std::span<const DecayProfile> profiles, double delta, double A0,
                                  std::optional<double> B0 = std::nullopt,
                                  const ExistenceParams& params = {});

// Same mathematics on the Fourier side: `centers` are frequency centers, the
// profiles describe the window spectra, and `sequence` holds time steps a_k^0.
FrameCertificate existence_search_frequency_side(std::span<const double> centers,
                                                 std::span<const DecayProfile> profiles,
                                                 double delta, double A0,
                                                 std::optional<double> B0 = std::nullopt,
                                                 const ExistenceParams& params = {});

struct DecayBoundOptions {
  std::optional<double> mu;
  int l_max = 256;
};

// The analytic Walnut bound for an arbitrary b sequence from profiles alone:
//   R <= S_t sum_{l != 0} max_k C_k^2 (1 + |l| / b_k)^{-(p_k - 1 - mu)},
// with the l-sum past l_max bounded in closed form and the exact ratio of b.
FrameCertificate decay_certificate(std::span<const double> centers,
                                   std::span<const DecayProfile> profiles, double delta,
                                   std::span<const double> b, double A0,
                                   std::optional<double> B0 = std::nullopt,
                                   const DecayBoundOptions& options = {});

// Perturbation of a certified reference by windows with
// |g_k - h_k| <= C_k (1 + |t - a_k|)^{-p_k}: certified iff C_U^2 lambda < A_h,
// lambda = 4 E1 E2 / b_L.
FrameCertificate perturbation_certificate(const FrameCertificate& reference,
                                          std::span<const DecayProfile> profiles, double delta,
                                          FrequencyRange b_range);

// Same rule against the painless truncation h_k = g_k chi_{I_k} with
// gap-shaped profiles and lambda = 8 E1 E2 max(1, 1/(2 b_L delta)) / b_L.
FrameCertificate almost_painless_certificate(const NsgSystem& g, const NsgSystem& h,
                                             const FrameCertificate& reference,
                                             std::span<const DecayProfile> profiles);

}  // namespace nsframe
