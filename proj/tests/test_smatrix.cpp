#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ladder/smatrix.hpp"
#include "oracles.hpp"

using namespace ladder;
using namespace testing_support;

TEST_CASE("control reflection and mirrored packet") {
  for (double d : {-3.0, -0.1, 0.0, 0.4, 10.0}) {
    CHECK(std::abs(control_reflection(d, 0.7)) == doctest::Approx(1.0).epsilon(1e-15));
    // a resonant Lorentzian of width gamma_c is mapped onto its mirror image
    const PhotonPacket c{5.0, 0.7};
    const cplx mapped = control_reflection(d, 0.7) * c.amplitude(5.0 + d);
    CHECK(std::abs(mapped - mirrored_control_packet(c)(5.0 + d)) < 1e-14);
  }
  CHECK(control_reflection(0.0, 1.0) == cplx(-1.0, 0.0));
}

TEST_CASE("resonant tier") {
  CHECK(std::abs(target_resonant_factor(0.0, 1.0) - cplx(-1, 0)) < 1e-15);
  CHECK(std::abs(target_resonant_factor(0.5, 1.0) - cplx(0, -1)) < 1e-15);
  CHECK(std::arg(target_resonant_factor(0.5, 1.0)) == doctest::Approx(-kPi / 2));
  const Setup s = ratio_setup(10, 64, 0.3);
  const AmplitudeGrid out = scatter_resonant(s.in, s.e, 0.3);
  for (std::size_t k = 0; k < out.values.size(); k += 37)
    CHECK(std::abs(out.values[k]) == doctest::Approx(std::abs(s.in.values[k])).epsilon(1e-14));
}

TEST_CASE("exact scattering: linearity and decoupled limits") {
  Setup s = ratio_setup(10, 48);
  AmplitudeGrid zero(s.in.axis1, s.in.axis2, s.in.carrier1, s.in.carrier2);
  const AmplitudeGrid z = scatter_exact(zero, s.e);
  for (const auto& v : z.values) CHECK(v == cplx(0, 0));

  EmitterParams off = s.e;
  off.gamma_c = off.gamma_t = 0;
  CHECK(scatter_exact(s.in, off).distance(s.in) == 0.0);

  // superposition principle
  std::mt19937 rng(3);
  const AmplitudeGrid a = random_lorentzian_mix(s.in, s.e, rng), b = random_lorentzian_mix(s.in, s.e, rng);
  AmplitudeGrid sum = a;
  for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] = 2.0 * a.values[k] + cplx(0, 1) * b.values[k];
  const AmplitudeGrid oa = scatter_exact(a, s.e), ob = scatter_exact(b, s.e), os = scatter_exact(sum, s.e);
  double worst = 0;
  for (std::size_t k = 0; k < os.values.size(); ++k)
    worst = std::max(worst, std::abs(os.values[k] - (2.0 * oa.values[k] + cplx(0, 1) * ob.values[k])));
  CHECK(worst < 1e-9);
}

TEST_CASE("exact scattering: far-detuned control passes unchanged") {
  const Setup s = ratio_setup(10, 128, 0.0, 1e3 * 0.01);
  const AmplitudeGrid out = scatter_exact(s.in, s.e);
  CHECK(std::abs(s.in.inner(out)) / s.in.norm2() >= 0.999);
}

TEST_CASE("exact scattering: ratio 30 gate overlap near the closed form") {
  const Setup s = ratio_setup(30, 192);
  ScatterDiagnostics d;
  const AmplitudeGrid out = scatter_exact(s.in, s.e, {}, &d);
  const double F = 0.75 + 0.25 * std::abs(ideal_overlap(s, out));
  CHECK(std::abs(F - 0.9678) < 2e-2);
  CHECK(F == doctest::Approx(oracle::fidelity_reference(1.0 / 30, 1.0 / 900, 1.0, 0.0)).epsilon(3e-3));
  CHECK(d.neglected_mass < 1e-6);
  CHECK(std::abs(out.norm2() - s.in.norm2()) < 2e-3);
}

TEST_CASE("exact scattering: unitarity on random inputs") {
  const Setup s = ratio_setup(10, 160);
  std::mt19937 rng(17);
  for (int k = 0; k < 3; ++k) {
    const AmplitudeGrid f = random_lorentzian_mix(s.in, s.e, rng);
    const AmplitudeGrid out = scatter_exact(f, s.e);
    CHECK(std::abs(std::sqrt(out.norm2()) - std::sqrt(f.norm2())) < 1e-3);
  }
}

TEST_CASE("exact scattering: truncation budget enforced") {
  const Setup s = ratio_setup(10, 32);
  ScatterOptions o;
  o.truncation_budget = 1e-40;
  CHECK_THROWS_AS(scatter_exact(s.in, s.e, o), TruncationError);
}

TEST_CASE("markov tier: far-detuned control and product requirement") {
  EmitterParams e;
  e.gamma_c = 0.01;
  e.gamma_t = 1.0;
  const PhotonPacket c{e.omega_c + 100.0, e.gamma_c}, t{e.omega_t, 0.1};
  const AmplitudeGrid in = build_input_grid(c, t, default_grid_spec(e, c, t, 128, 128));
  const AmplitudeGrid out = scatter_markov_approx(in, e, c.center);
  CHECK(out.distance(in) < 1e-3);

  std::mt19937 rng(1);
  const AmplitudeGrid mix = testing_support::random_lorentzian_mix(in, e, rng);
  CHECK_THROWS_AS(scatter_markov_approx(mix, e, c.center), UnsupportedInput);
}

TEST_CASE("markov tier: resonant phase pi at ratio 1e3") {
  const Setup s = ratio_setup(1e3, 256);
  const AmplitudeGrid out = scatter_markov_approx(s.in, s.e, s.control.center);
  const cplx z = ideal_overlap(s, out);
  CHECK(std::abs(z) > 0.99);
  CHECK(std::abs(wrap_phase(std::arg(z) - kPi)) < 1e-2);
}

TEST_CASE("markov tier agrees with exact within 3/ratio") {
  for (double r : {10.0, 30.0}) {
    CAPTURE(r);
    const Setup s = ratio_setup(r, 160);
    const AmplitudeGrid ex = scatter_exact(s.in, s.e);
    const AmplitudeGrid mk = scatter(ScatterTier::MarkovApproxEq5, s.in, s.e, s.control.center, 0.0);
    CHECK(ex.distance(mk) < 3.0 / r);
  }
}
