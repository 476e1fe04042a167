#pragma once

// Test-side reference evaluations, written independently of the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// Closed-form fidelity coded directly from its definition: 3/4 + |1 - 2/((1 + Gc/sT)(1 + (sT + Gc - 2i Dt)/Gt))|/4
inline cplx z_reference(double sigma_t, double gamma_c, double gamma_t, double delta_t) {
  const cplx inner = 1.0 + cplx(sigma_t + gamma_c, -2 * delta_t) / gamma_t;
  return 1.0 - 2.0 / ((1.0 + gamma_c / sigma_t) * inner);
}
inline double fidelity_reference(double sigma_t, double gamma_c, double gamma_t, double delta_t) {
  return 0.75 + 0.25 * std::abs(z_reference(sigma_t, gamma_c, gamma_t, delta_t));
}

// Z2 by quadrature of the |11> overlap triple integral, with the (2 pi)^3
// normalization. u = k1 - Omega_C, w = u + nu, v = k2 - omega_T. The v
// integral closes in the upper half plane around its single pole at
// v = nu + i sT/2; u and w are integrated numerically after a tangent map
// that flattens their Lorentzian factors.
inline cplx z2_triple(double gamma_c, double sigma_t, double gamma_t, double delta_t, double tol = 1e-11) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double hc = 0.5 * gamma_c;
  auto v_integral = [&](double u, double w) {
    const double nu = w - u;
    return 2 * pi / (cplx(sigma_t, -nu) * cplx(0.5 * (gamma_t + sigma_t), -(w + delta_t)));
  };
  auto middle = [&](double a) {
    const double u = hc * std::tan(a);
    auto f = [&](double b) -> cplx { return v_integral(u, hc * std::tan(b)); };
    return GK::integrate(f, -pi / 2, pi / 2, 20, tol);
  };
  const cplx I = GK::integrate(middle, -pi / 2, pi / 2, 20, tol);
  // du / (hc^2 + u^2) = da / hc, twice
  return -gamma_t * gamma_c * gamma_c * sigma_t / std::pow(2 * pi, 3) / (hc * hc) * I;
}

// Brute-force check of the residue step: the v integral by quadrature.
inline cplx v_integral_numeric(double u, double nu, double sigma_t, double gamma_t, double delta_t) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double hs = 0.5 * sigma_t, ht = 0.5 * gamma_t;
  auto f = [&](double g) -> cplx {
    const double t = std::tan(g), v = hs * t;
    return hs * (1 + t * t) / (cplx(hs, -v) * cplx(hs, v - nu) * cplx(ht, -(u + v + delta_t)));
  };
  return GK::integrate(f, -pi / 2, pi / 2, 25, 1e-12);
}

// Z1: product of two normalized Lorentzian intensity integrals.
inline double z1_double(double gamma_c, double sigma_t) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto lor = [](double w) {
    return [w](double k) { return (w / (2 * pi)) / (0.25 * w * w + k * k); };
  };
  const double inf = std::numeric_limits<double>::infinity();
  return GK::integrate(lor(gamma_c), -inf, inf, 20, 1e-13) * GK::integrate(lor(sigma_t), -inf, inf, 20, 1e-13);
}

}  // namespace oracle
