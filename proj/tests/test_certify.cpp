#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "nsframe/certify.hpp"
#include "nsframe/error.hpp"
#include "oracles.hpp"

using namespace nsframe;

namespace {

FrameCertificate reference(double A, std::optional<double> B = std::nullopt) {
  FrameCertificate c;
  c.method = CertMethod::painless;
  c.verdict = Verdict::certified;
  c.A = A;
  c.B = B;
  return c;
}

std::vector<DecayProfile> uniform_profiles(std::size_t n, double C, double p,
                                           DecayShape shape = DecayShape::centered) {
  std::vector<DecayProfile> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back({C, p, shape, double(k), 0.0});
  return v;
}

std::vector<double> integer_centers(int n) {
  std::vector<double> c;
  for (int k = 0; k < n; ++k) c.push_back(k);
  return c;
}

}  // namespace

TEST_CASE("method and verdict names round trip") {
  for (auto m : {CertMethod::painless, CertMethod::walnut, CertMethod::existence,
                 CertMethod::perturbation, CertMethod::almost_painless})
    CHECK(parse_cert_method(to_string(m)) == m);
  CHECK(to_string(CertMethod::almost_painless) == "almost-painless");
  CHECK_FALSE(parse_cert_method("bogus"));
  CHECK(parse_verdict("not_certified") == Verdict::not_certified);
}

TEST_CASE("painless certificate of the Hann chain") {
  const NsgSystem sys = build_scale_system({{0, 0, 1, 1, 0, 0, -1, -1, 0}, ScaleRule::example1});
  const PainlessResult r = painless_certificate(sys);
  CHECK(r.certificate.certified());
  CHECK(r.certificate.A > 0.0);
  CHECK(r.certificate.B >= r.certificate.A);
  CHECK(r.certificate.provenance.at("grid_step") > 0.0);
  // gamma_k G_0 = g_k on the grid.
  for (std::size_t k = 0; k < sys.size(); ++k)
    for (std::size_t i = 0; i < r.grid.size(); i += 7)
      CHECK(r.duals[k][i] * r.G0[i] == doctest::Approx(sys[k].window(r.grid[i])).epsilon(1e-12));
}

TEST_CASE("painless precondition names every offending window") {
  std::vector<NsgEntry> e{{WindowSpec::hann(0.0, 1.0), 0.0, 1.0},
                          {WindowSpec::hann(1.0, 1.0), 1.0, 2.0},
                          {WindowSpec::gaussian(1.0, 2.0), 2.0, 1.0}};
  const NsgSystem sys(std::move(e), 1.0);
  try {
    painless_certificate(sys);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("k = 1") != std::string::npos);
    CHECK(msg.find("k = 2") != std::string::npos);
    CHECK(msg.find("k = 0") == std::string::npos);
  }
}

TEST_CASE("perturbation of the Hann chain with the published inputs") {
  const auto prof = uniform_profiles(12, 0.0282, 2.0);
  const FrameCertificate c =
      perturbation_certificate(reference(0.5, 1.0), prof, 1.0 / 3.0, {0.5, 2.0});
  CHECK(c.certified());
  CHECK(c.constants.at("lambda") == doctest::Approx(84.7222).epsilon(1e-5));
  CHECK(c.A == doctest::Approx(0.2003).epsilon(1e-3));
  const double check = 0.0282 * 0.0282 * c.constants.at("lambda");
  CHECK(c.constants.at("check") == doctest::Approx(check));
  CHECK(*c.B == doctest::Approx(std::pow(1.0 + std::sqrt(check), 2)));
}

TEST_CASE("perturbation above the threshold is not certified") {
  const FrameCertificate c = perturbation_certificate(reference(0.5, 1.0), uniform_profiles(4, 0.08, 2.0),
                                                      1.0 / 3.0, {0.5, 2.0});
  CHECK_FALSE(c.certified());
  CHECK_FALSE(c.notes.empty());
}

TEST_CASE("zero perturbation keeps the reference bounds") {
  const FrameCertificate c = perturbation_certificate(reference(0.5, 1.0), uniform_profiles(4, 0.0, 2.0),
                                                      1.0 / 3.0, {0.5, 2.0});
  CHECK(c.certified());
  CHECK(c.A == 0.5);
  CHECK(*c.B == 1.0);
}

TEST_CASE("perturbation bound decreases monotonically in C_U") {
  double prev = 0.5;
  for (double C = 0.001; C < 0.0768; C += 0.002) {
    const FrameCertificate c = perturbation_certificate(reference(0.5), uniform_profiles(3, C, 2.0),
                                                        1.0 / 3.0, {0.5, 2.0});
    REQUIRE(c.certified());
    CHECK(c.A < prev);
    CHECK_FALSE(c.B);
    prev = c.A;
  }
}

TEST_CASE("perturbation errors") {
  FrameCertificate bad = reference(0.5);
  bad.verdict = Verdict::not_certified;
  CHECK_THROWS_AS(perturbation_certificate(bad, uniform_profiles(2, 0.01, 2.0), 1.0, {1, 1}),
                  PreconditionError);
  CHECK_THROWS_AS(perturbation_certificate(reference(0.5), {}, 1.0, {1, 1}), InputError);
  CHECK_THROWS_AS(perturbation_certificate(reference(0.5), uniform_profiles(2, 0.01, 2.0, DecayShape::gap),
                                           1.0, {1, 1}),
                  PreconditionError);
  CHECK_THROWS_AS(perturbation_certificate(reference(0.5), uniform_profiles(2, 0.01, 1.0), 1.0, {1, 1}),
                  DomainError);
}

TEST_CASE("almost-painless bound from the Gaussian chain inputs") {
  const NsgSystem g = build_scale_system({{0, 0, 1, 1, 1, 0, 0, -1, -1, -1, 0, 0}, ScaleRule::example2});
  const NsgSystem h = truncate_system(g);
  const OverlapConstants oc = overlap_constants(0.25, 0.5, 2.0, 19.0, 19.0, OverlapVariant::almost_painless);
  const double C = std::sqrt(0.0071 / oc.lambda);
  std::vector<DecayProfile> prof;
  for (const auto& e : g.entries()) prof.push_back({C, 19.0, DecayShape::gap, e.center, 0.5 / e.b});
  const FrameCertificate c = almost_painless_certificate(g, h, reference(0.1609, 1.0), prof);
  CHECK(c.certified());
  CHECK(c.constants.at("check") == doctest::Approx(0.0071).epsilon(1e-12));
  CHECK(c.constants.at("rel") == 4);
  CHECK(c.A == doctest::Approx(0.1609 * std::pow(1.0 - std::sqrt(0.0071 / 0.1609), 2)).epsilon(1e-12));
  CHECK(c.A == doctest::Approx(0.1004).epsilon(1e-3));

  for (auto& p : prof) p.C = 0.0;
  const FrameCertificate z = almost_painless_certificate(g, h, reference(0.1609, 1.0), prof);
  CHECK(z.A == 0.1609);

  // Preconditions: the reference must be painless and the profiles gap-shaped.
  FrameCertificate walnut_ref = reference(0.1609);
  walnut_ref.method = CertMethod::walnut;
  CHECK_THROWS_AS(almost_painless_certificate(g, h, walnut_ref, prof), PreconditionError);
  CHECK_THROWS_AS(almost_painless_certificate(g, g, reference(0.1609), prof), PreconditionError);
  for (auto& p : prof) p.shape = DecayShape::centered;
  CHECK_THROWS_AS(almost_painless_certificate(g, h, reference(0.1609), prof), PreconditionError);
}

TEST_CASE("existence search returns the first passing epsilon") {
  const auto centers = integer_centers(10);
  const auto prof = uniform_profiles(10, 1.0, 3.0);
  const FrameCertificate c = existence_search(centers, prof, 1.0, 1.0, 2.0);
  REQUIRE(c.certified());
  const double eps0 = c.provenance.at("epsilon0");
  const int j = static_cast<int>(c.provenance.at("halvings"));
  CHECK(eps0 == std::ldexp(1.0, -j));
  const ExistenceBound at = existence_bound_at(prof, 1.0, eps0);
  CHECK(at.ratio * at.R < 1.0);
  if (j > 1) {
    const ExistenceBound before = existence_bound_at(prof, 1.0, 2.0 * eps0);
    CHECK(before.ratio * before.R >= 1.0);
  }
  REQUIRE(c.sequence.size() == 10);
  for (double b : c.sequence) CHECK(b == doctest::Approx(std::cbrt(eps0)));
  CHECK(c.A == doctest::Approx((1.0 - at.ratio * at.R) / std::cbrt(eps0)));
  CHECK(*c.B >= c.A);
}

TEST_CASE("existence search on the frequency side mirrors the time side") {
  const auto centers = integer_centers(6);
  const auto prof = uniform_profiles(6, 2.0, 4.0);
  const FrameCertificate t = existence_search(centers, prof, 1.0, 1.0);
  const FrameCertificate f = existence_search_frequency_side(centers, prof, 1.0, 1.0);
  CHECK(t.sequence == f.sequence);
  CHECK(t.A == f.A);
  CHECK(f.notes.size() == t.notes.size() + 1);
}

TEST_CASE("existence errors and exhaustion") {
  const auto centers = integer_centers(4);
  CHECK_THROWS_AS(existence_search(centers, uniform_profiles(4, 1.0, 2.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(existence_search(centers, uniform_profiles(3, 1.0, 3.0), 1.0, 1.0), InputError);
  CHECK_THROWS_AS(existence_search(centers, uniform_profiles(4, 1.0, 3.0), 2.0, 1.0), InputError);
  ExistenceParams bad_mu;
  bad_mu.mu = 1.5;
  CHECK_THROWS_AS(existence_search(centers, uniform_profiles(4, 1.0, 3.0), 1.0, 1.0, {}, bad_mu),
                  DomainError);
  const auto prof = uniform_profiles(4, 1.0, 3.0);
  CHECK_THROWS_AS(existence_bound_at(prof, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(existence_bound_at(prof, 1.0, 0.0), DomainError);
  const auto big = uniform_profiles(4, 4.0, 3.0);
  CHECK_THROWS_AS(existence_bound_at(big, 1.0, 2.0), DomainError);

  ExistenceParams few;
  few.max_halvings = 1;
  const FrameCertificate c = existence_search(centers, prof, 1.0, 1e-6, {}, few);
  CHECK_FALSE(c.certified());
  CHECK_FALSE(c.notes.empty());
}

TEST_CASE("halving the returned steps keeps the decay certificate") {
  const auto centers = integer_centers(8);
  const auto prof = uniform_profiles(8, 1.0, 3.0);
  ExistenceParams params;
  params.mu = 0.5;
  const FrameCertificate c = existence_search(centers, prof, 1.0, 1.0, {}, params);
  REQUIRE(c.certified());
  DecayBoundOptions opt;
  opt.mu = 0.5;
  std::vector<double> b = c.sequence;
  for (int i = 0; i < 4; ++i) {
    const FrameCertificate d = decay_certificate(centers, prof, 1.0, b, 1.0, {}, opt);
    CHECK(d.certified());
    for (double& x : b) x *= 0.5;
  }
}

TEST_CASE("Walnut certificate of a regular Hann chain") {
  std::vector<NsgEntry> e;
  for (int k = 0; k < 10; ++k) e.push_back({WindowSpec::hann(0.5 * k), 0.5 * k, 1.0});
  const FrameCertificate c = walnut_certificate(NsgSystem(std::move(e), 0.5));
  CHECK(c.certified());
  CHECK(c.A == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*c.B == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.constants.at("R") == 0.0);
}
