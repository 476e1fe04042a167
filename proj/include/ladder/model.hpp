#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ladder {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. The CLI maps ConfigError/InvalidParameter to exit 2 and
// NumericalError (and subclasses) to exit 3.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : NumericalError {
  double captured;
  TruncationError(const std::string& what, double captured_fraction)
      : NumericalError(what), captured(captured_fraction) {}
};
struct IntegratorFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct IncompleteScattering : NumericalError {
  double residual_g, residual_s;
  IncompleteScattering(const std::string& what, double g, double s)
      : NumericalError(what), residual_g(g), residual_s(s) {}
};
struct UnsupportedInput : NumericalError {
  using NumericalError::NumericalError;
};

struct EmitterParams {
  double omega_c = 1000.0;
  double omega_t = 1000.0;
  double gamma_c = 1e-6;
  double gamma_t = 1.0;

  // Rates must be positive unless allow_zero_rates (decoupled test cases).
  void validate(bool allow_zero_rates = false) const;
};

enum class Lineshape { Lorentzian };
enum class Polarization { H, V };

struct PhotonPacket {
  double center = 0.0;  // absolute frequency
  double width = 1.0;
  Lineshape lineshape = Lineshape::Lorentzian;
  Polarization polarization = Polarization::H;

  void validate() const;
  cplx amplitude(double k) const;
};

struct QubitEncoding {
  double control_zero_offset = 0.0;
  double control_one_offset = 0.0;
  double target_zero_offset = 0.0;
  double target_one_offset = 0.0;  // Delta_T

  // Default: |0> states 10^3 rates away from resonance.
  static QubitEncoding standard(const EmitterParams& e, double delta_t);
  void validate(const EmitterParams& e, double min_factor = 100.0) const;
};

// a(k) = sqrt(width/2pi) / (width/2 + i(k - center))
cplx lorentzian_amplitude(double k, double center, double width);

// Mass of a unit Lorentzian of the given width inside [lo, hi] around center.
double lorentzian_captured_mass(double lo, double hi, double center, double width);

// One grid axis. Nodes are CDF midpoints of a density that mixes Lorentzian
// components with a uniform floor, so points cluster at every resonance
// scale in play. Weights are (1/n)/p(x).
struct ClusterComponent {
  double center;
  double width;
};

class Axis {
 public:
  Axis() = default;
  Axis(double lo, double hi, std::size_t n, std::vector<ClusterComponent> comps,
       double floor = 0.05);
  static Axis uniform(double lo, double hi, std::size_t n);

  std::size_t size() const { return x_.size(); }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& weights() const { return w_; }
  double node(std::size_t i) const { return x_[i]; }
  double weight(std::size_t i) const { return w_[i]; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double cdf(double x) const;
  double density(double x) const;
  // Inverse of cdf on [0,1].
  double quantile(double u) const;

  // Four-point Lagrange stencil in the CDF coordinate. Returns false if x is
  // outside [lo, hi]; otherwise fills the first index and the four weights.
  bool stencil(double x, std::size_t& i0, double c[4]) const;
  // Same stencil addressed directly by the CDF coordinate u in [0, 1].
  void stencil_cdf(double u, std::size_t& i0, double c[4]) const;
  cplx interpolate(const cplx* vals, std::ptrdiff_t stride, double x) const;
  cplx interpolate(const std::vector<cplx>& vals, double x) const {
    return interpolate(vals.data(), 1, x);
  }

  bool same_as(const Axis& o) const;
  const std::vector<ClusterComponent>& clusters() const { return comps_; }
  double floor() const { return floor_; }

 private:
  double lo_ = 0, hi_ = 0, floor_ = 1.0;
  std::vector<ClusterComponent> comps_;
  std::vector<double> alpha_;
  std::vector<double> x_, w_;
};

struct AxisSpec {
  double lo = -1, hi = 1;
  std::size_t points = 256;
  std::vector<ClusterComponent> clusters;  // in offset units
  double floor = 0.05;
  Axis build() const { return Axis(lo, hi, points, clusters, floor); }
};

struct GridSpec {
  double carrier1 = 0.0;  // Omega_C; axis1 stores k1 - carrier1
  double carrier2 = 0.0;  // Omega_T; axis2 stores k2 - carrier2
  AxisSpec axis1, axis2;
  double truncation_budget = 1e-2;
};

// Grid design used throughout: each axis spans +-span_factor times the
// largest rate or width on the photon's side and clusters at every scale.
GridSpec default_grid_spec(const EmitterParams& e, const PhotonPacket& control,
                           const PhotonPacket& target, std::size_t n1 = 384,
                           std::size_t n2 = 384, double span_factor = 40.0);

struct AmplitudeGrid {
  Axis axis1, axis2;
  double carrier1 = 0.0, carrier2 = 0.0;
  std::vector<cplx> values;  // row-major, (i, j) -> i * n2 + j

  AmplitudeGrid() = default;
  AmplitudeGrid(Axis a1, Axis a2, double c1, double c2);

  std::size_t n1() const { return axis1.size(); }
  std::size_t n2() const { return axis2.size(); }
  cplx& at(std::size_t i, std::size_t j) { return values[i * n2() + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * n2() + j]; }

  double norm2() const;
  cplx inner(const AmplitudeGrid& other) const;  // <this|other>
  double distance(const AmplitudeGrid& other) const;  // L2 norm of difference
  bool compatible(const AmplitudeGrid& other) const;
  // Bicubic (in CDF coordinates) evaluation at offsets; zero outside window.
  cplx interpolate(double d1, double d2) const;
  // Largest relative deviation from a rank-1 product.
  double separability_defect() const;
  AmplitudeGrid transposed() const;
};

AmplitudeGrid build_input_grid(const PhotonPacket& control, const PhotonPacket& target,
                               const GridSpec& spec);

// Product state from arbitrary spectral factors on a given grid layout.
template <class F1, class F2>
AmplitudeGrid product_grid(const Axis& a1, const Axis& a2, double c1, double c2, F1 f1, F2 f2) {
  AmplitudeGrid g(a1, a2, c1, c2);
  std::vector<cplx> v2(a2.size());
  for (std::size_t j = 0; j < a2.size(); ++j) v2[j] = f2(a2.node(j));
  for (std::size_t i = 0; i < a1.size(); ++i) {
    cplx v1 = f1(a1.node(i));
    for (std::size_t j = 0; j < a2.size(); ++j) g.at(i, j) = v1 * v2[j];
  }
  return g;
}

enum class BackendMethod { AnalyticClosedForm, SMatrixQuadrature, MarkovApprox, Resonant, TimeDomainOracle };
const char* to_string(BackendMethod m);

struct GateReport {
  double fidelity = 0;            // coherent four-term average
  double fidelity_dominant = 0;   // 3/4 + |o11|/4
  double phase = 0;               // principal value in (-pi, pi]
  cplx overlaps[4];               // 00, 01, 10, 11
  BackendMethod method = BackendMethod::AnalyticClosedForm;
  double error_budget = 0;
};

// Principal value in (-pi, pi].
double wrap_phase(double phi);

}  // namespace ladder
