#include "ladder/composite.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace ladder {

namespace {

enum Level { G = 0, X = 1, Y = 2 };
constexpr int kCodes[kCompositeDim][2] = {{G, G}, {G, X}, {X, G}, {G, Y}, {Y, G}, {X, X}, {X, Y}, {Y, X}, {Y, Y}};

std::size_t index_of(int a, int b) {
  for (std::size_t k = 0; k < kCompositeDim; ++k)
    if (kCodes[k][0] == a && kCodes[k][1] == b) return k;
  return kCompositeDim;
}

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

Vec9 ket(std::initializer_list<std::pair<std::size_t, double>> terms) {
  Vec9 v = Vec9::Zero();
  for (auto [k, c] : terms) v(k) = c;
  return v;
}

struct Reference {
  const char* label;
  Vec9 vec;
  bool symmetric;
  int excitations;
};

std::array<Reference, kCompositeDim> references() {
  const double h = 1 / std::sqrt(2.0);
  return {{{"g", ket({{0, 1}}), true, 0},
           {"y_A", ket({{3, h}, {4, -h}}), false, 1},
           {"y_S", ket({{3, h}, {4, h}}), true, 1},
           {"x_S", ket({{1, h}, {2, h}}), true, 1},
           {"x_A", ket({{1, h}, {2, -h}}), false, 1},
           {"yy", ket({{8, 1}}), true, 2},
           {"xy_S", ket({{6, h}, {7, h}}), true, 2},
           {"xy_A", ket({{6, h}, {7, -h}}), false, 2},
           {"xx", ket({{5, 1}}), true, 2}}};
}

// Dipole operator component along one emitter polarization (x or y).
Mat9 dipole_matrix(Level pol, double d) {
  Mat9 D = Mat9::Zero();
  for (std::size_t k = 0; k < kCompositeDim; ++k) {
    const int a = kCodes[k][0], b = kCodes[k][1];
    if (a == G) D(index_of(pol, b), k) += d;
    if (a == pol) D(index_of(G, b), k) += d;
    if (b == G) D(index_of(a, pol), k) += d;
    if (b == pol) D(index_of(a, G), k) += d;
  }
  return D;
}

Mat9 to_eigen(const Matrix9& m) {
  Mat9 r;
  for (std::size_t i = 0; i < kCompositeDim; ++i)
    for (std::size_t j = 0; j < kCompositeDim; ++j) r(i, j) = m[i][j];
  return r;
}

}  // namespace

void CompositePair::validate() const {
  if (!(separation > 0)) throw InvalidParameter("separation must be positive");
  if (!(epsilon_r >= 1)) throw InvalidParameter("epsilon_r must be >= 1");
  if (d_x < 0 || d_y < 0) throw InvalidParameter("dipole magnitudes must be non-negative");
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::abs(n - 1) > 1e-9) throw InvalidParameter("axis must be a unit vector");
  for (double v : {omega_x, omega_y, coupling_scale, j_xx, j_yy, j_xy})
    if (!std::isfinite(v)) throw InvalidParameter("composite parameters must be finite");
}

CompositePair CompositePair::from_couplings(double omega_x, double omega_y, double d_x, double d_y, double j_xx,
                                            double j_yy) {
  CompositePair p;
  p.omega_x = omega_x;
  p.omega_y = omega_y;
  p.d_x = d_x;
  p.d_y = d_y;
  p.direct_couplings = true;
  p.j_xx = j_xx;
  p.j_yy = j_yy;
  p.j_xy = 0;
  p.validate();
  return p;
}

double dipole_coupling(const CompositePair& pair, DipoleAxis p, DipoleAxis q) {
  pair.validate();
  if (pair.direct_couplings) {
    if (p != q) return pair.j_xy;
    return p == DipoleAxis::X ? pair.j_xx : pair.j_yy;
  }
  const Vec3 ex{1, 0, 0}, ey{0, 1, 0};
  const Vec3& ep = p == DipoleAxis::X ? ex : ey;
  const Vec3& eq = q == DipoleAxis::X ? ex : ey;
  const double dp = p == DipoleAxis::X ? pair.d_x : pair.d_y;
  const double dq = q == DipoleAxis::X ? pair.d_x : pair.d_y;
  auto dot = [](const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  const double r3 = pair.separation * pair.separation * pair.separation;
  return pair.coupling_scale * dp * dq / (pair.epsilon_r * r3) *
         (dot(ep, eq) - 3 * dot(ep, pair.axis) * dot(eq, pair.axis));
}

const std::array<const char*, kCompositeDim>& product_basis_labels() {
  static const std::array<const char*, kCompositeDim> l{"gg", "gx", "xg", "gy", "yg", "xx", "xy", "yx", "yy"};
  return l;
}

Matrix9 build_hamiltonian(const CompositePair& pair) {
  pair.validate();
  Matrix9 h{};
  const double e[3] = {0.0, pair.omega_x, pair.omega_y};
  for (std::size_t k = 0; k < kCompositeDim; ++k) h[k][k] = e[kCodes[k][0]] + e[kCodes[k][1]];
  const Level pols[2] = {X, Y};
  const DipoleAxis ax[2] = {DipoleAxis::X, DipoleAxis::Y};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double j = dipole_coupling(pair, ax[a], ax[b]);
      const std::size_t gp = index_of(G, pols[a]), qg = index_of(pols[b], G);
      h[gp][qg] += j;
      h[qg][gp] += j;
    }
  return h;
}

const EigenEntry& EigenTable::at(const std::string& label) const {
  for (const auto& e : entries)
    if (e.label == label) return e;
  throw InvalidParameter("unknown eigenstate label " + label);
}

EigenTable eigensystem(const CompositePair& pair) {
  const Mat9 H = to_eigen(build_hamiltonian(pair));
  const auto refs = references();
  EigenTable table;
  // Diagonalize within each exchange-symmetry sector so degenerate pairs
  // like xy_S / xy_A come out symmetry-pure.
  for (bool sym : {true, false}) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < kCompositeDim; ++r)
      if (refs[r].symmetric == sym) rows.push_back(r);
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd B(9, m);
    for (Eigen::Index c = 0; c < m; ++c) B.col(c) = refs[rows[c]].vec;
    const Eigen::MatrixXd Hb = B.transpose() * H * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hb);
    if (es.info() != Eigen::Success) throw NumericalError("eigensystem: diagonalization failed");
    const Eigen::MatrixXd V = B * es.eigenvectors();
    std::vector<bool> used(m, false);
    for (std::size_t r : rows) {
      Eigen::Index best = -1;
      double ov = -1;
      for (Eigen::Index c = 0; c < m; ++c) {
        if (used[c]) continue;
        const double o = std::abs(refs[r].vec.dot(V.col(c)));
        if (o > ov) {
          ov = o;
          best = c;
        }
      }
      used[best] = true;
      Vec9 v = V.col(best);
      if (refs[r].vec.dot(v) < 0) v = -v;
      EigenEntry& e = table.entries[r];
      e.label = refs[r].label;
      e.energy = es.eigenvalues()(best);
      for (std::size_t k = 0; k < kCompositeDim; ++k) e.vector[k] = v(k);
      e.symmetric = sym;
      e.excitations = refs[r].excitations;
    }
  }
  return table;
}

std::vector<TransitionDipole> transition_dipoles(const EigenTable& table, const CompositePair& pair,
                                                 double zero_tol) {
  pair.validate();
  const Mat9 Dx = dipole_matrix(X, pair.d_x), Dy = dipole_matrix(Y, pair.d_y);
  const double scale = std::max({pair.d_x, pair.d_y, 1e-300});
  std::vector<TransitionDipole> out;
  for (const auto& lo : table.entries)
    for (const auto& hi : table.entries) {
      if (hi.excitations != lo.excitations + 1) continue;
      const Vec9 a = Eigen::Map<const Vec9>(lo.vector.data()), b = Eigen::Map<const Vec9>(hi.vector.data());
      const Vec3 d{b.dot(Dx * a), b.dot(Dy * a), 0.0};
      if (std::hypot(d[0], d[1]) > zero_tol * scale) out.push_back({lo.label, hi.label, d});
    }
  return out;
}

EffectiveLadder effective_ladder(const CompositePair& pair, double kappa) {
  if (!(kappa > 0)) throw InvalidParameter("rate constant must be positive");
  const EigenTable t = eigensystem(pair);
  const auto dip = transition_dipoles(t, pair);
  auto moment2 = [&](const char* a, const char* b) {
    for (const auto& d : dip)
      if (d.initial == a && d.final_state == b) return d.d[0] * d.d[0] + d.d[1] * d.d[1] + d.d[2] * d.d[2];
    return 0.0;
  };
  EffectiveLadder L;
  L.emitter.omega_c = t.at("x_S").energy - t.at("g").energy;
  L.emitter.omega_t = t.at("xy_S").energy - t.at("x_S").energy;
  L.emitter.gamma_c = kappa * moment2("g", "x_S");
  L.emitter.gamma_t = kappa * moment2("x_S", "xy_S");
  L.gamma_g_ys = kappa * moment2("g", "y_S");
  L.gamma_ys_xys = kappa * moment2("y_S", "xy_S");
  L.branching_ratio = L.emitter.gamma_t > 0 ? L.gamma_ys_xys / L.emitter.gamma_t : 0.0;
  L.emitter.validate();
  if (pair.d_y == 0 || pair.d_x / pair.d_y > 0.1) {
    L.warning = true;
    L.message = "d_x/d_y exceeds 0.1: second decay pathway branching ratio " + std::to_string(L.branching_ratio);
  }
  return L;
}

}  // namespace ladder
