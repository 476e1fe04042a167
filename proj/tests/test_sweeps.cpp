#include <doctest.h>

#include <cmath>
#include <random>

#include "ladder/sweeps.hpp"
#include "oracles.hpp"

using namespace ladder;

TEST_CASE("axis values") {
  const SweepAxis lg{"ratio", AxisScale::Log, 10, 1e3, 3};
  const auto v = lg.values();
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 10);
  CHECK(v[1] == doctest::Approx(100));
  CHECK(v[2] == 1e3);
  CHECK_THROWS_AS((SweepAxis{"ratio", AxisScale::Linear, 0, 1, 1}.validate()), InvalidParameter);
  CHECK_THROWS_AS((SweepAxis{"ratio", AxisScale::Log, 0, 1, 4}.validate()), InvalidParameter);
  CHECK_THROWS_AS((SweepAxis{"sigma", AxisScale::Linear, 0, 1, 4}.validate()), InvalidParameter);
  CHECK_THROWS_AS((SweepAxis{"ratio", AxisScale::Linear, 2, 1, 4}.validate()), InvalidParameter);
}

TEST_CASE("fidelity contour: corners and monotonicity") {
  const SweepResult r = fidelity_contour(fidelity_contour_spec(20));
  REQUIRE(r.points.size() == 400);
  for (std::size_t i : {0u, 19u})
    for (std::size_t j : {0u, 19u}) {
      const auto& p = r.at(i, j);
      const double F = oracle::fidelity_reference(p.point.sigma_t, p.point.gamma_c, p.point.gamma_t, 0.0);
      CHECK(std::abs(p.fidelity - F) < 1e-12);
      CHECK(p.coords[0] == r.grids[0][i]);
    }
  CHECK(r.at(19, 19).fidelity == doctest::Approx(0.999001).epsilon(1e-6));
  // 3/4 + |1 - 2/(1.1 * 1.11)|/4
  CHECK(r.at(0, 0).fidelity == doctest::Approx(0.90950).epsilon(1e-5));
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j + 1 < 20; ++j) {
      CHECK(r.at(i, j + 1).fidelity > r.at(i, j).fidelity);
      CHECK(r.at(j + 1, i).fidelity > r.at(j, i).fidelity);
    }
  CHECK_FALSE(r.started.empty());
}

TEST_CASE("detuning sweep: lag from -pi towards zero") {
  const SweepResult r = detuning_sweep(detuning_sweep_spec(1e3, 81));
  REQUIRE(r.points.size() == 81);
  CHECK(std::abs(r.points.front().phase_unwrapped + kPi) < 1e-2);
  for (std::size_t k = 0; k + 1 < r.points.size(); ++k) {
    CHECK(r.points[k + 1].phase_unwrapped > r.points[k].phase_unwrapped);
    CHECK(r.points[k + 1].fidelity > r.points[k].fidelity);
  }
  CHECK(r.points.back().phase_unwrapped < 0);
  CHECK(r.points.back().phase_unwrapped > -kPi / 2);
}

TEST_CASE("unwrap keeps continuity") {
  const std::vector<double> pr{kPi, 3.0, -3.1, -2.0};
  const auto u = unwrap_lag(pr);
  CHECK(u[0] == doctest::Approx(-kPi));
  for (std::size_t k = 1; k < u.size(); ++k) CHECK(std::abs(u[k] - u[k - 1]) < kPi);
  CHECK(u[2] == doctest::Approx(-3.1));
}

TEST_CASE("sweeps are deterministic") {
  SweepSpec s = fidelity_contour_spec(6);
  s.threads = 3;
  const SweepResult a = run_sweep(s);
  s.threads = 1;
  const SweepResult b = run_sweep(s);
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(a.points[k].fidelity == b.points[k].fidelity);
    CHECK(a.points[k].phase == b.points[k].phase);
  }
}

TEST_CASE("failed points are recorded, not fatal") {
  SweepSpec s;
  s.axes = {{"gamma_t", AxisScale::Linear, -1.0, 1.0, 3}};
  const SweepResult r = run_sweep(s);
  CHECK_FALSE(r.points[0].ok);
  CHECK(std::isnan(r.points[0].fidelity));
  CHECK_FALSE(r.points[0].error.empty());
  CHECK(r.points[2].ok);
}

TEST_CASE("tuning round trip") {
  const auto p = GateOperatingPoint::from_ratios(1e3, 1e3);
  const double f0 = fidelity_analytic(p);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-kPi, -0.05);
  for (int k = 0; k < 50; ++k) {
    const double target = std::max(U(rng), phase_lag(p));
    const TuneResult t = tune_detuning(target, p);
    CHECK(std::abs(t.phase - target) < 1e-6);
    GateOperatingPoint q = p;
    q.delta_t = t.delta_t;
    CHECK(std::abs(phase_lag(q) - target) < 1e-6);
    CHECK(t.fidelity >= f0);
  }
}

TEST_CASE("tuning outside the achievable interval") {
  const auto p = GateOperatingPoint::from_ratios(1e3, 1e3);
  try {
    tune_detuning(-3.5, p);
    FAIL("expected NoSolution");
  } catch (const NoSolution& e) {
    CHECK(e.lo == doctest::Approx(phase_lag(p)));
    CHECK(e.hi == 0.0);
  }
  CHECK_THROWS_AS(tune_detuning(0.1, p), NoSolution);
  // near-ideal ratios reach exactly -pi at zero detuning
  CHECK(phase_lag(p) == doctest::Approx(-kPi));
}
