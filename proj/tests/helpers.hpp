#pragma once

#include <random>

#include "ladder/model.hpp"
#include "ladder/smatrix.hpp"

namespace testing_support {

using namespace ladder;

// sigma_t / gamma_c = gamma_t / sigma_t = r with gamma_t = 1; sigma_c = gamma_c.
struct Setup {
  EmitterParams e;
  PhotonPacket control, target;
  AmplitudeGrid in;
};

inline Setup ratio_setup(double r, std::size_t n, double delta_t = 0.0, double control_offset = 0.0) {
  Setup s;
  s.e.gamma_t = 1.0;
  const double sigma = 1.0 / r;
  s.e.gamma_c = sigma / r;
  s.control = {s.e.omega_c + control_offset, s.e.gamma_c};
  s.target = {s.e.omega_t + delta_t, sigma};
  s.in = build_input_grid(s.control, s.target, default_grid_spec(s.e, s.control, s.target, n, n));
  return s;
}

// <mirrored control (x) input target | f> / sqrt(norms)
inline cplx ideal_overlap(const Setup& s, const AmplitudeGrid& out) {
  const MirroredPacket mc = mirrored_control_packet(s.control);
  const AmplitudeGrid ideal = product_grid(
      s.in.axis1, s.in.axis2, s.in.carrier1, s.in.carrier2, [&](double d) { return mc(s.in.carrier1 + d); },
      [&](double d) { return s.target.amplitude(s.in.carrier2 + d); });
  return ideal.inner(out) / std::sqrt(ideal.norm2() * s.in.norm2());
}

// Normalized superposition of a few Lorentzian products on the layout of g.
inline AmplitudeGrid random_lorentzian_mix(const AmplitudeGrid& g, const EmitterParams& e, std::mt19937& rng,
                                           int terms = 3) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_real_distribution<double> W(0.3, 3.0);
  AmplitudeGrid f(g.axis1, g.axis2, g.carrier1, g.carrier2);
  const double sigma = std::sqrt(e.gamma_c * e.gamma_t);
  for (int t = 0; t < terms; ++t) {
    const cplx coef(U(rng), U(rng));
    const double c1 = 3 * e.gamma_c * U(rng), w1 = e.gamma_c * W(rng);
    const double c2 = 2 * sigma * U(rng), w2 = sigma * W(rng);
    for (std::size_t i = 0; i < f.n1(); ++i) {
      const cplx a = lorentzian_amplitude(f.axis1.node(i), c1, w1);
      for (std::size_t j = 0; j < f.n2(); ++j) f.at(i, j) += coef * a * lorentzian_amplitude(f.axis2.node(j), c2, w2);
    }
  }
  const double n = std::sqrt(f.norm2());
  for (auto& v : f.values) v /= n;
  return f;
}

}  // namespace testing_support
