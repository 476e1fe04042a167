#pragma once

// Closed-form eigen and dipole tables for the dipole-coupled pair, written
// out by hand for comparison against the numerical diagonalization.

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "ladder/composite.hpp"

namespace tables {

inline ladder::CompositePair random_pair(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  ladder::CompositePair p;
  p.omega_x = 0.5 + U(rng);
  p.omega_y = p.omega_x + 0.1 + U(rng);
  p.d_x = 1e-3 + 0.2 * U(rng);
  p.d_y = 0.3 + U(rng);
  p.separation = 1.0 + 4 * U(rng);
  p.epsilon_r = 1.0 + 10 * U(rng);
  p.coupling_scale = 0.05;
  return p;
}

// J read as interaction magnitudes (x dipoles attract along the axis, y
// dipoles repel).
inline std::map<std::string, double> energies(const ladder::CompositePair& p) {
  const double r3 = std::pow(p.separation, 3);
  const double jxx = 2 * p.coupling_scale * p.d_x * p.d_x / (p.epsilon_r * r3);
  const double jyy = p.coupling_scale * p.d_y * p.d_y / (p.epsilon_r * r3);
  return {{"g", 0.0},
          {"y_A", p.omega_y - jyy},
          {"y_S", p.omega_y + jyy},
          {"x_S", p.omega_x - jxx},
          {"x_A", p.omega_x + jxx},
          {"yy", 2 * p.omega_y},
          {"xy_S", p.omega_x + p.omega_y},
          {"xy_A", p.omega_x + p.omega_y},
          {"xx", 2 * p.omega_x}};
}

struct Row {
  const char *from, *to;
  double dx, dy;  // in units of d_x, d_y
};

inline const Row kDipoles[] = {{"g", "x_S", std::sqrt(2.0), 0},  {"g", "y_S", 0, std::sqrt(2.0)},
                               {"x_S", "xy_S", 0, 1},            {"y_S", "xy_S", 1, 0},
                               {"x_S", "xx", std::sqrt(2.0), 0}, {"y_S", "yy", 0, std::sqrt(2.0)},
                               {"x_A", "xy_A", 0, 1},            {"y_A", "xy_A", 1, 0}};

}  // namespace tables
