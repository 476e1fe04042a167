#include "ladder/model.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numeric>

namespace ladder {

namespace {

double lor_cdf(double x, double c, double w) { return std::atan(2.0 * (x - c) / w) / kPi; }
double lor_pdf(double x, double c, double w) {
  double h = 0.5 * w;
  return h / kPi / (h * h + (x - c) * (x - c));
}

}  // namespace

void EmitterParams::validate(bool allow_zero_rates) const {
  if (!(omega_c > 0)) throw InvalidParameter("omega_c must be positive");
  if (!(omega_t > 0)) throw InvalidParameter("omega_t must be positive");
  if (allow_zero_rates) {
    if (!(gamma_c >= 0)) throw InvalidParameter("gamma_c must be non-negative");
    if (!(gamma_t >= 0)) throw InvalidParameter("gamma_t must be non-negative");
  } else {
    if (!(gamma_c > 0)) throw InvalidParameter("gamma_c must be positive");
    if (!(gamma_t > 0)) throw InvalidParameter("gamma_t must be positive");
  }
}

void PhotonPacket::validate() const {
  if (!(width > 0)) throw InvalidParameter("packet width must be positive");
  if (!std::isfinite(center)) throw InvalidParameter("packet center must be finite");
}

cplx PhotonPacket::amplitude(double k) const { return lorentzian_amplitude(k, center, width); }

QubitEncoding QubitEncoding::standard(const EmitterParams& e, double delta_t) {
  QubitEncoding q;
  q.control_zero_offset = 1e3 * e.gamma_c;
  q.control_one_offset = 0.0;
  q.target_zero_offset = delta_t + 1e3 * e.gamma_t;
  q.target_one_offset = delta_t;
  return q;
}

void QubitEncoding::validate(const EmitterParams& e, double min_factor) const {
  if (std::abs(control_zero_offset - control_one_offset) < min_factor * e.gamma_c)
    throw InvalidParameter("control_zero_offset is not far detuned from the control transition");
  if (std::abs(target_zero_offset - target_one_offset) < min_factor * e.gamma_t)
    throw InvalidParameter("target_zero_offset is not far detuned from the target transition");
}

cplx lorentzian_amplitude(double k, double center, double width) {
  if (!(width > 0)) throw InvalidParameter("lorentzian width must be positive");
  return std::sqrt(width / (2 * kPi)) / cplx(0.5 * width, k - center);
}

double lorentzian_captured_mass(double lo, double hi, double center, double width) {
  return lor_cdf(hi, center, width) - lor_cdf(lo, center, width);
}

Axis::Axis(double lo, double hi, std::size_t n, std::vector<ClusterComponent> comps, double floor)
    : lo_(lo), hi_(hi), floor_(floor), comps_(std::move(comps)) {
  if (!(hi > lo)) throw InvalidParameter("axis requires lo < hi");
  if (n < 4) throw InvalidParameter("axis requires at least 4 points");
  if (comps_.empty()) floor_ = 1.0;
  if (!(floor_ > 0 && floor_ <= 1)) throw InvalidParameter("axis floor must lie in (0, 1]");
  for (auto& c : comps_)
    if (!(c.width > 0)) throw InvalidParameter("cluster width must be positive");
  alpha_.resize(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    double m = lor_cdf(hi_, comps_[k].center, comps_[k].width) -
               lor_cdf(lo_, comps_[k].center, comps_[k].width);
    alpha_[k] = (1.0 - floor_) / comps_.size() / m;
  }
  x_.resize(n);
  w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = quantile((i + 0.5) / n);
    w_[i] = (1.0 / n) / density(x_[i]);
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw NumericalError("axis nodes are not strictly increasing");
}

Axis Axis::uniform(double lo, double hi, std::size_t n) { return Axis(lo, hi, n, {}, 1.0); }

double Axis::cdf(double x) const {
  x = std::clamp(x, lo_, hi_);
  double v = floor_ * (x - lo_) / (hi_ - lo_);
  for (std::size_t k = 0; k < comps_.size(); ++k)
    v += alpha_[k] * (lor_cdf(x, comps_[k].center, comps_[k].width) -
                      lor_cdf(lo_, comps_[k].center, comps_[k].width));
  return v;
}

double Axis::density(double x) const {
  double v = floor_ / (hi_ - lo_);
  for (std::size_t k = 0; k < comps_.size(); ++k)
    v += alpha_[k] * lor_pdf(x, comps_[k].center, comps_[k].width);
  return v;
}

double Axis::quantile(double u) const {
  if (u <= 0) return lo_;
  if (u >= 1) return hi_;
  if (comps_.empty()) return lo_ + u * (hi_ - lo_);
  auto f = [&](double x) { return cdf(x) - u; };
  std::uintmax_t it = 200;
  auto tol = [this](double a, double b) {
    return std::abs(b - a) <= 1e-15 * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
  };
  auto r = boost::math::tools::toms748_solve(f, lo_, hi_, -u, 1.0 - u, tol, it);
  return 0.5 * (r.first + r.second);
}

bool Axis::stencil(double x, std::size_t& i0, double c[4]) const {
  if (!(x >= lo_ && x <= hi_)) return false;
  stencil_cdf(cdf(x), i0, c);
  return true;
}

void Axis::stencil_cdf(double u, std::size_t& i0, double c[4]) const {
  const std::size_t n = x_.size();
  double t = u * n - 0.5;
  long k = static_cast<long>(std::floor(t)) - 1;
  k = std::clamp<long>(k, 0, static_cast<long>(n) - 4);
  i0 = static_cast<std::size_t>(k);
  double r = t - k;
  c[0] = -(r - 1) * (r - 2) * (r - 3) / 6.0;
  c[1] = r * (r - 2) * (r - 3) / 2.0;
  c[2] = -r * (r - 1) * (r - 3) / 2.0;
  c[3] = r * (r - 1) * (r - 2) / 6.0;
}

cplx Axis::interpolate(const cplx* vals, std::ptrdiff_t stride, double x) const {
  std::size_t i0;
  double c[4];
  if (!stencil(x, i0, c)) return {0.0, 0.0};
  cplx s = 0;
  for (int m = 0; m < 4; ++m) s += c[m] * vals[static_cast<std::ptrdiff_t>(i0 + m) * stride];
  return s;
}

bool Axis::same_as(const Axis& o) const {
  return x_.size() == o.x_.size() && lo_ == o.lo_ && hi_ == o.hi_ &&
         std::equal(x_.begin(), x_.end(), o.x_.begin());
}

namespace {

void add_cluster(std::vector<ClusterComponent>& v, double c, double w) {
  for (auto& e : v)
    if (std::abs(e.center - c) <= 1e-9 * w && std::abs(e.width - w) <= 1e-9 * w) return;
  v.push_back({c, w});
}

}  // namespace

GridSpec default_grid_spec(const EmitterParams& e, const PhotonPacket& control,
                           const PhotonPacket& target, std::size_t n1, std::size_t n2,
                           double span_factor) {
  GridSpec s;
  s.carrier1 = e.omega_c;
  s.carrier2 = e.omega_t;
  const double c1 = control.center - e.omega_c;
  const double c2 = target.center - e.omega_t;
  const double gc = e.gamma_c > 0 ? e.gamma_c : control.width;
  const double gt = e.gamma_t > 0 ? e.gamma_t : target.width;
  // The correlated output spreads the control photon over the target scales.
  const double m1 = std::max({control.width, gc, target.width, gt});
  const double m2 = std::max(target.width, gt);
  s.axis1.lo = std::min(c1, 0.0) - span_factor * m1;
  s.axis1.hi = std::max(c1, 0.0) + span_factor * m1;
  s.axis1.points = n1;
  add_cluster(s.axis1.clusters, c1, control.width);
  add_cluster(s.axis1.clusters, 0.0, gc);
  add_cluster(s.axis1.clusters, 0.0, target.width);
  add_cluster(s.axis1.clusters, 0.0, gt);
  s.axis2.lo = std::min(c2, 0.0) - span_factor * m2;
  s.axis2.hi = std::max(c2, 0.0) + span_factor * m2;
  s.axis2.points = n2;
  add_cluster(s.axis2.clusters, c2, target.width);
  add_cluster(s.axis2.clusters, 0.0, gt);
  return s;
}

AmplitudeGrid::AmplitudeGrid(Axis a1, Axis a2, double c1, double c2)
    : axis1(std::move(a1)), axis2(std::move(a2)), carrier1(c1), carrier2(c2),
      values(axis1.size() * axis2.size(), cplx(0.0, 0.0)) {}

double AmplitudeGrid::norm2() const {
  double s = 0;
  for (std::size_t i = 0; i < n1(); ++i) {
    double r = 0;
    const cplx* row = &values[i * n2()];
    for (std::size_t j = 0; j < n2(); ++j) r += axis2.weight(j) * std::norm(row[j]);
    s += axis1.weight(i) * r;
  }
  return s;
}

bool AmplitudeGrid::compatible(const AmplitudeGrid& o) const {
  return axis1.same_as(o.axis1) && axis2.same_as(o.axis2);
}

cplx AmplitudeGrid::inner(const AmplitudeGrid& o) const {
  if (!compatible(o)) throw InvalidParameter("grid mismatch in inner product");
  cplx s = 0;
  for (std::size_t i = 0; i < n1(); ++i) {
    cplx r = 0;
    for (std::size_t j = 0; j < n2(); ++j) r += axis2.weight(j) * std::conj(at(i, j)) * o.at(i, j);
    s += axis1.weight(i) * r;
  }
  return s;
}

double AmplitudeGrid::distance(const AmplitudeGrid& o) const {
  if (!compatible(o)) throw InvalidParameter("grid mismatch in distance");
  double s = 0;
  for (std::size_t i = 0; i < n1(); ++i) {
    double r = 0;
    for (std::size_t j = 0; j < n2(); ++j) r += axis2.weight(j) * std::norm(at(i, j) - o.at(i, j));
    s += axis1.weight(i) * r;
  }
  return std::sqrt(s);
}

cplx AmplitudeGrid::interpolate(double d1, double d2) const {
  std::size_t i0, j0;
  double a[4], b[4];
  if (!axis1.stencil(d1, i0, a) || !axis2.stencil(d2, j0, b)) return {0.0, 0.0};
  cplx s = 0;
  for (int p = 0; p < 4; ++p) {
    cplx r = 0;
    for (int q = 0; q < 4; ++q) r += b[q] * at(i0 + p, j0 + q);
    s += a[p] * r;
  }
  return s;
}

double AmplitudeGrid::separability_defect() const {
  // Pivot on the largest entry; a rank-1 grid satisfies v_ij v_pq = v_iq v_pj.
  std::size_t p = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (std::abs(values[k]) > std::abs(values[p])) p = k;
  const double vmax = std::abs(values[p]);
  if (vmax == 0) return 0;
  const std::size_t pi = p / n2(), pj = p % n2();
  const cplx piv = values[p];
  double worst = 0;
  for (std::size_t i = 0; i < n1(); ++i)
    for (std::size_t j = 0; j < n2(); ++j) {
      cplx pred = at(i, pj) * at(pi, j) / piv;
      worst = std::max(worst, std::abs(at(i, j) - pred) / vmax);
    }
  return worst;
}

AmplitudeGrid AmplitudeGrid::transposed() const {
  AmplitudeGrid t(axis2, axis1, carrier2, carrier1);
  for (std::size_t i = 0; i < n1(); ++i)
    for (std::size_t j = 0; j < n2(); ++j) t.at(j, i) = at(i, j);
  return t;
}

AmplitudeGrid build_input_grid(const PhotonPacket& control, const PhotonPacket& target,
                               const GridSpec& spec) {
  control.validate();
  target.validate();
  const double m1 = lorentzian_captured_mass(spec.carrier1 + spec.axis1.lo,
                                             spec.carrier1 + spec.axis1.hi, control.center,
                                             control.width);
  const double m2 = lorentzian_captured_mass(spec.carrier2 + spec.axis2.lo,
                                             spec.carrier2 + spec.axis2.hi, target.center,
                                             target.width);
  if (m1 < 0.99)
    throw TruncationError("grid window captures " + std::to_string(m1) + " of the control packet", m1);
  if (m2 < 0.99)
    throw TruncationError("grid window captures " + std::to_string(m2) + " of the target packet", m2);
  const double c1 = spec.carrier1, c2 = spec.carrier2;
  return product_grid(
      spec.axis1.build(), spec.axis2.build(), c1, c2,
      [&](double d) { return control.amplitude(c1 + d); },
      [&](double d) { return target.amplitude(c2 + d); });
}

const char* to_string(BackendMethod m) {
  switch (m) {
    case BackendMethod::AnalyticClosedForm: return "AnalyticClosedForm";
    case BackendMethod::SMatrixQuadrature: return "SMatrixQuadrature";
    case BackendMethod::MarkovApprox: return "MarkovApprox";
    case BackendMethod::Resonant: return "Resonant";
    case BackendMethod::TimeDomainOracle: return "TimeDomainOracle";
  }
  return "unknown";
}

double wrap_phase(double phi) {
  double r = std::remainder(phi, 2 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2 * kPi;
  return r;
}

}  // namespace ladder
