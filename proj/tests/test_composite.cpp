#include <doctest.h>

#include <cmath>
#include <random>

#include "composite_tables.hpp"
#include "ladder/composite.hpp"

using namespace ladder;

using tables::kDipoles;
using tables::random_pair;

TEST_CASE("dipole coupling geometry") {
  CompositePair p;
  const double jxx = dipole_coupling(p, DipoleAxis::X, DipoleAxis::X);
  const double jyy = dipole_coupling(p, DipoleAxis::Y, DipoleAxis::Y);
  CHECK(dipole_coupling(p, DipoleAxis::X, DipoleAxis::Y) == 0.0);
  CHECK(dipole_coupling(p, DipoleAxis::Y, DipoleAxis::X) == 0.0);
  CHECK(jxx < 0);
  CHECK(jyy > 0);
  CHECK(jxx / jyy == doctest::Approx(-2 * p.d_x * p.d_x / (p.d_y * p.d_y)));
  CompositePair far = p;
  far.separation *= 2;
  CHECK(dipole_coupling(far, DipoleAxis::Y, DipoleAxis::Y) == doctest::Approx(jyy / 8));
  CompositePair bad = p;
  bad.separation = 0;
  CHECK_THROWS_AS(dipole_coupling(bad, DipoleAxis::X, DipoleAxis::X), InvalidParameter);
  bad = p;
  bad.epsilon_r = 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("hamiltonian structure") {
  CompositePair p;
  const Matrix9 h = build_hamiltonian(p);
  const auto& lab = product_basis_labels();
  const int exc[9] = {0, 1, 1, 1, 1, 2, 2, 2, 2};
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK(h[i][j] == h[j][i]);
      if (exc[i] != exc[j]) CHECK(h[i][j] == 0.0);
    }
  CHECK(std::string(lab[1]) == "gx");
  CHECK(std::string(lab[2]) == "xg");
  CHECK(h[1][2] == doctest::Approx(dipole_coupling(p, DipoleAxis::X, DipoleAxis::X)));

  p.separation = 1e6;
  const Matrix9 h0 = build_hamiltonian(p);
  const double diag[9] = {0, p.omega_x, p.omega_x, p.omega_y, p.omega_y, 2 * p.omega_x,
                          p.omega_x + p.omega_y, p.omega_x + p.omega_y, 2 * p.omega_y};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(h0[i][i] == doctest::Approx(diag[i]));
    for (std::size_t j = 0; j < 9; ++j)
      if (i != j) CHECK(std::abs(h0[i][j]) < 1e-15);
  }
}

TEST_CASE("eigensystem reproduces the eigen table over random draws") {
  std::mt19937 rng(2024);
  for (int draw = 0; draw < 50; ++draw) {
    const CompositePair p = random_pair(rng);
    const EigenTable t = eigensystem(p);
    const auto ref = tables::energies(p);
    for (const auto& e : t.entries) {
      CAPTURE(e.label);
      const double want = ref.at(e.label);
      CHECK(std::abs(e.energy - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
    // orthonormal, symmetry-pure
    for (const auto& a : t.entries)
      for (const auto& b : t.entries) {
        double dot = 0;
        for (std::size_t k = 0; k < 9; ++k) dot += a.vector[k] * b.vector[k];
        CHECK(std::abs(dot - (a.label == b.label ? 1.0 : 0.0)) < 1e-12);
      }
    const auto& ya = t.at("y_A").vector;
    CHECK(ya[3] == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(ya[4] == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(t.at("xy_S").energy == doctest::Approx(t.at("xy_A").energy).epsilon(1e-14));
  }
  CHECK_THROWS_AS(eigensystem(CompositePair{}).at("zz"), InvalidParameter);
}

TEST_CASE("transition dipoles reproduce the dipole table over random draws") {
  std::mt19937 rng(7);
  for (int draw = 0; draw < 50; ++draw) {
    const CompositePair p = random_pair(rng);
    const auto dips = transition_dipoles(eigensystem(p), p);
    REQUIRE(dips.size() == 8);
    for (const auto& row : kDipoles) {
      CAPTURE(row.from);
      CAPTURE(row.to);
      const TransitionDipole* hit = nullptr;
      for (const auto& d : dips)
        if (d.initial == row.from && d.final_state == row.to) hit = &d;
      REQUIRE(hit != nullptr);
      // magnitudes: the antisymmetric pair carries a basis-dependent sign
      CHECK(std::abs(std::abs(hit->d[0]) - row.dx * p.d_x) <= 1e-10 * p.d_y);
      CHECK(std::abs(std::abs(hit->d[1]) - row.dy * p.d_y) <= 1e-10 * p.d_y);
      CHECK(hit->d[2] == 0.0);
      if (std::string(row.from) != "x_A") {
        CHECK(hit->d[0] >= 0.0);
        CHECK(hit->d[1] >= 0.0);
      }
    }
    for (const auto& d : dips) {
      const bool s1 = eigensystem(p).at(d.initial).symmetric, s2 = eigensystem(p).at(d.final_state).symmetric;
      CHECK(s1 == s2);
    }
  }
}

TEST_CASE("effective ladder mapping") {
  CompositePair p;
  p.d_y = 1.0;
  p.d_x = 1e-3;
  const EffectiveLadder L = effective_ladder(p, 1.0);
  CHECK(L.emitter.gamma_t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(L.emitter.gamma_c == doctest::Approx(2e-6).epsilon(1e-10));
  CHECK(L.emitter.gamma_t / L.emitter.gamma_c == doctest::Approx(5e5).epsilon(1e-9));
  CHECK_FALSE(L.warning);
  const double jxx = std::abs(dipole_coupling(p, DipoleAxis::X, DipoleAxis::X));
  CHECK(L.emitter.omega_c == doctest::Approx(p.omega_x - jxx).epsilon(1e-14));
  CHECK(L.emitter.omega_t - p.omega_y == doctest::Approx(jxx).epsilon(1e-9));
  CHECK(L.gamma_g_ys == doctest::Approx(2.0));
  CHECK(L.branching_ratio == doctest::Approx(1e-6).epsilon(1e-9));

  p.d_x = 0.5;
  const EffectiveLadder W = effective_ladder(p, 1.0);
  CHECK(W.warning);
  CHECK(W.branching_ratio == doctest::Approx(0.25));
  CHECK(W.message.find("0.25") != std::string::npos);
  CHECK_THROWS_AS(effective_ladder(p, 0.0), InvalidParameter);
}

TEST_CASE("direct couplings") {
  const CompositePair p = CompositePair::from_couplings(1.0, 1.5, 0.01, 1.0, -0.02, 0.03);
  CHECK(dipole_coupling(p, DipoleAxis::X, DipoleAxis::X) == -0.02);
  const EigenTable t = eigensystem(p);
  CHECK(t.at("x_S").energy == doctest::Approx(0.98));
  CHECK(t.at("y_S").energy == doctest::Approx(1.53));
  CHECK(t.at("y_A").energy == doctest::Approx(1.47));
}
