#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ladder/metrics.hpp"
#include "oracles.hpp"

using namespace ladder;

TEST_CASE("closed-form fidelity matches the reference evaluation") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> lr(1, 3), dd(-3, 3);
  for (int k = 0; k < 200; ++k) {
    const double r1 = std::pow(10, lr(rng)), r2 = std::pow(10, lr(rng)), dn = dd(rng);
    const auto p = GateOperatingPoint::from_ratios(r1, r2, dn);
    const double F = oracle::fidelity_reference(p.sigma_t, p.gamma_c, p.gamma_t, p.delta_t);
    CHECK(std::abs(fidelity_analytic(p) - F) < 1e-12);
    const cplx z = oracle::z_reference(p.sigma_t, p.gamma_c, p.gamma_t, p.delta_t);
    CHECK(std::abs(wrap_phase(phase_analytic(p) - std::arg(z))) < 1e-12);
    CHECK(std::abs(1.0 + z2_closed_form(p) - z) < 1e-12);
  }
}

TEST_CASE("closed-form fidelity examples") {
  const double f3 = fidelity_analytic(GateOperatingPoint::from_ratios(1e3, 1e3));
  CHECK(f3 == doctest::Approx(0.999001).epsilon(1e-6));
  CHECK(std::abs(f3 - 0.998) <= 2e-3);
  // scale invariance: gamma_c = 1, sigma_t = 30, gamma_t = 900
  GateOperatingPoint p{30.0, 1.0, 900.0, 0.0};
  CHECK(fidelity_analytic(p) == doctest::Approx(0.9678).epsilon(1e-4));
  CHECK(fidelity_analytic(p) == doctest::Approx(fidelity_analytic(GateOperatingPoint::from_ratios(30, 30))));
  p.delta_t = 1e9;
  CHECK(fidelity_analytic(p) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(phase_analytic(p)) < 1e-6);
}

TEST_CASE("operating point validation") {
  GateOperatingPoint p;
  p.gamma_c = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  CHECK_THROWS_AS(GateOperatingPoint::from_ratios(0, 10), InvalidParameter);
  CHECK_THROWS_AS(GateOperatingPoint::from_ratios(10, -1), InvalidParameter);
}

TEST_CASE("conditional phase: ideal law") {
  CHECK(conditional_phase_ideal(0, 1) == doctest::Approx(kPi));
  CHECK(conditional_phase_ideal(0.5, 1) == doctest::Approx(-kPi / 2));
  for (double d : {0.1, 0.7, 3.0}) {
    const double s = conditional_phase_ideal(d, 1) + conditional_phase_ideal(-d, 1);
    CHECK(std::abs(wrap_phase(s - 2 * kPi)) < 1e-12);
  }
  const auto p = GateOperatingPoint::from_ratios(1e3, 1e3);
  CHECK(std::abs(phase_analytic(p) - kPi) < 1e-12);
  CHECK(std::real(1.0 + z2_closed_form(p)) == doctest::Approx(-0.996).epsilon(1e-3));
  for (double dn : {0.0, 0.5, 1.0, 2.0}) {
    CAPTURE(dn);
    const auto q = GateOperatingPoint::from_ratios(1e3, 1e3, dn);
    CHECK(std::abs(wrap_phase(phase_analytic(q) - conditional_phase_ideal(dn, 1.0))) < 1e-2);
  }
}

TEST_CASE("Z2 closed form against quadrature") {
  // residue step of the oracle against brute-force quadrature
  for (double u : {-0.02, 0.0, 0.013})
    for (double nu : {-0.05, 0.0, 0.2}) {
      const double st = 0.1, gt = 1.0, dt = 0.4, w = u + nu;
      const cplx res = 2 * oracle::pi / (cplx(st, -nu) * cplx(0.5 * (gt + st), -(w + dt)));
      CHECK(std::abs(oracle::v_integral_numeric(u, nu, st, gt, dt) - res) < 1e-8 * std::abs(res));
    }
  const auto p = GateOperatingPoint::from_ratios(10, 10, 1.0);
  const cplx q = oracle::z2_triple(p.gamma_c, p.sigma_t, p.gamma_t, p.delta_t);
  CHECK(std::abs(q - z2_closed_form(p)) < 1e-4 * std::abs(q));
  CHECK(oracle::z1_double(p.gamma_c, p.sigma_t) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("overlap on a grid") {
  const auto s = testing_support::ratio_setup(10, 96);
  const Spectrum ac = [&](double k) { return s.control.amplitude(k); };
  const Spectrum at = [&](double k) { return s.target.amplitude(k); };
  CHECK(std::abs(overlap_Z(s.in, ac, at) - s.in.norm2()) < 1e-12);
  CHECK(std::abs(overlap_Z(s.in, s.in) - s.in.norm2()) < 1e-12);
  const auto other = testing_support::ratio_setup(10, 64);
  CHECK_THROWS_AS(overlap_Z(s.in, other.in), InvalidParameter);
}

TEST_CASE("gate report: analytic backend") {
  const auto p = GateOperatingPoint::from_ratios(1e3, 1e3, 0.3);
  EmitterParams e;
  e.gamma_c = p.gamma_c;
  const GateReport r = gate_report(e, QubitEncoding::standard(e, p.delta_t), {p.gamma_c, p.sigma_t},
                                   BackendMethod::AnalyticClosedForm);
  CHECK(r.fidelity_dominant == doctest::Approx(fidelity_analytic(p)).epsilon(1e-12));
  CHECK(std::abs(wrap_phase(r.phase - phase_analytic(p))) < 1e-12);
  CHECK_THROWS_AS(gate_report(e, QubitEncoding::standard(e, 0), {2 * p.gamma_c, p.sigma_t},
                              BackendMethod::AnalyticClosedForm),
                  InvalidParameter);
}

TEST_CASE("gate report: exact backend at ratio 30") {
  const auto p = GateOperatingPoint::from_ratios(30, 30);
  EmitterParams e;
  e.gamma_c = p.gamma_c;
  GateOptions opt;
  opt.n1 = opt.n2 = 160;
  const GateReport r = gate_report(e, QubitEncoding::standard(e, 0), {p.gamma_c, p.sigma_t},
                                   BackendMethod::SMatrixQuadrature, opt);
  CHECK(std::abs(r.fidelity - fidelity_analytic(p)) < 2e-2);
  CHECK(std::abs(r.fidelity_dominant - fidelity_analytic(p)) < 2e-2);
  // |0_C> inputs pass through untouched
  CHECK(std::abs(std::abs(r.overlaps[0]) - 1.0) < 1e-3);
  CHECK(std::abs(std::abs(r.overlaps[1]) - 1.0) < 1e-3);
  // |11> carries the loss
  double worst = 0;
  for (int b = 0; b < 3; ++b) worst = std::max(worst, 1 - std::abs(r.overlaps[b]));
  CHECK(1 - std::abs(r.overlaps[3]) >= 10 * worst);
  CHECK(std::abs(wrap_phase(r.phase - kPi)) < 0.1);
}
