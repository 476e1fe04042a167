#pragma once

#include <array>
#include <string>
#include <vector>

#include "ladder/model.hpp"

namespace ladder {

using Vec3 = std::array<double, 3>;

// Two identical dipole-coupled three-level emitters (g, x, y each).
// coupling_scale stands in for 1/(4 pi eps0) in the caller's units.
struct CompositePair {
  double omega_x = 1.0;
  double omega_y = 1.2;
  double d_x = 0.01;
  double d_y = 1.0;
  double separation = 1.0;
  double epsilon_r = 1.0;
  Vec3 axis{1.0, 0.0, 0.0};
  double coupling_scale = 1.0;
  // When set, j_xx / j_yy / j_xy are used as given instead of the dipole law.
  bool direct_couplings = false;
  double j_xx = 0, j_yy = 0, j_xy = 0;

  void validate() const;
  static CompositePair from_couplings(double omega_x, double omega_y, double d_x, double d_y, double j_xx,
                                      double j_yy);
};

enum class DipoleAxis { X, Y };

double dipole_coupling(const CompositePair& pair, DipoleAxis p, DipoleAxis q);

// Product basis order: gg, gx, xg, gy, yg, xx, xy, yx, yy (|r s> = r_alpha s_beta).
inline constexpr std::size_t kCompositeDim = 9;
using Matrix9 = std::array<std::array<double, kCompositeDim>, kCompositeDim>;
const std::array<const char*, kCompositeDim>& product_basis_labels();

Matrix9 build_hamiltonian(const CompositePair& pair);

struct EigenEntry {
  std::string label;   // g, y_A, y_S, x_S, x_A, yy, xy_S, xy_A, xx
  double energy = 0;
  std::array<double, kCompositeDim> vector{};
  bool symmetric = true;
  int excitations = 0;
};

// Entries in the row order g, y_A, y_S, x_S, x_A, yy, xy_S, xy_A, xx.
struct EigenTable {
  std::array<EigenEntry, kCompositeDim> entries;
  const EigenEntry& at(const std::string& label) const;
};

EigenTable eigensystem(const CompositePair& pair);

struct TransitionDipole {
  std::string initial, final_state;
  Vec3 d{};  // <final|d|initial>
};

// Nonzero elements between adjacent excitation sectors (lower -> upper).
std::vector<TransitionDipole> transition_dipoles(const EigenTable& table, const CompositePair& pair,
                                                 double zero_tol = 1e-12);

struct EffectiveLadder {
  EmitterParams emitter;
  double gamma_g_ys = 0;    // parasitic |g> <-> |y_S>
  double gamma_ys_xys = 0;  // parasitic |y_S> <-> |xy_S>
  double branching_ratio = 0;  // decay of |xy_S> into |y_S> vs |x_S>
  bool warning = false;
  std::string message;
};

// Rates follow kappa * |d|^2 of the corresponding transition dipole.
EffectiveLadder effective_ladder(const CompositePair& pair, double kappa);

}  // namespace ladder
