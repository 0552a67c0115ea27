#pragma once

#include "berrydiag/linalg.hpp"
#include "berrydiag/models/model.hpp"

#include <Eigen/Eigenvalues>

#include <optional>
#include <string>
#include <vector>

namespace bd {

struct tolerances {
  double degeneracy = 1e-8;  // within-group spread, relative to |H|
  double gap = 1e-6;         // cross-group gap, relative to |H|
  double overlap = 1e-8;     // smallest singular value of a gauge overlap
  fd_options fd{};
};

struct band_frame {
  Eigen::VectorXd eps;    // band energies, descending, grouped
  cmat U0;                // rows are band states
  cmat eps0;              // U0 H U0^+ restricted to groups
  std::vector<int> group; // group index of each state
  phase_point point;
};

// ---- projectors and the inverse commutator -------------------------------------------------

inline std::vector<int> group_index(const std::vector<int>& sizes) {
  std::vector<int> g;
  for (std::size_t k = 0; k < sizes.size(); ++k) g.insert(g.end(), sizes[k], static_cast<int>(k));
  return g;
}

inline cmat project(const cmat& m, const std::vector<int>& group, bool plus) {
  cmat out = m;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if ((group[i] == group[j]) != plus) out(i, j) = 0;
  return out;
}

// right inverse of M -> [M, eps] on cross-group entries; within-group entries set to zero
inline cmat inv_commutator(const cmat& m, const Eigen::VectorXd& eps, const std::vector<int>& group,
                           double gap_abs) {
  cmat v = cmat::Zero(m.rows(), m.cols());
  for (int n = 0; n < m.rows(); ++n)
    for (int k = 0; k < m.cols(); ++k) {
      if (group[n] == group[k]) continue;
      double d = eps[k] - eps[n];
      if (std::abs(d) < gap_abs) throw point_error("near-degenerate bands: cross-group gap below tolerance");
      v(n, k) = m(n, k) / d;
    }
  return v;
}

// ---- smooth frame field --------------------------------------------------------------------

// Gauge section around a base point.  Analytic frames are used as given.  Otherwise each
// eigenvector group is rotated by the polar factor of its overlap with a fixed reference frame
// (the raw frame at the base point), which gives one smooth section for every nested stencil.
class frame_field {
 public:
  frame_field(const model& m, const phase_point& base, tolerances tol = {})
      : m_(&m), tol_(tol), group_(group_index(m.groups())) {
    int total = 0;
    for (int s : m.groups()) total += s;
    if (total != m.dim()) throw std::invalid_argument("band groups do not add up to the dimension");
    if (!m.has_analytic_frame()) ref_ = raw(base).second;
  }

  const std::vector<int>& group() const { return group_; }
  const model& mdl() const { return *m_; }
  const tolerances& tol() const { return tol_; }

  frame_data operator()(const vec6& x) const {
    const phase_point p = phase_point::from(x);
    m_->check_point(p);
    if (m_->has_analytic_frame()) return *m_->analytic_frame(p);
    auto [vals, vecs] = raw(p);
    for (int g = 0; g <= group_.back(); ++g) {
      auto [start, size] = block(g);
      cmat O = vecs.middleCols(start, size).adjoint() * ref_.middleCols(start, size);
      Eigen::JacobiSVD<cmat> svd(O, Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (svd.singularValues().minCoeff() < tol_.overlap)
        throw point_error("gauge alignment failure: overlap matrix singular");
      cmat Q = svd.matrixU() * svd.matrixV().adjoint();
      vecs.middleCols(start, size) = vecs.middleCols(start, size) * Q;
    }
    cmat U = vecs.adjoint();
    cmat eps = project(U * m_->h(p) * U.adjoint(), group_, true);
    return {U, 0.5 * herm(eps)};
  }

  band_frame classical(const phase_point& p) const {
    frame_data f = (*this)(p.x());
    const cmat H = m_->h(p);
    const double hn = std::max(H.norm(), 1e-300);
    if (max_abs(herm(H) * 0.5 - H) > 1e-13 * hn) throw point_error("Hamiltonian not Hermitian");
    band_frame b;
    b.U0 = f.U0;
    b.eps0 = f.eps0;
    b.group = group_;
    b.point = p;
    b.eps = f.eps0.diagonal().real();
    for (int g = 0; g <= group_.back(); ++g) {
      auto [start, size] = block(g);
      auto seg = b.eps.segment(start, size);
      if (seg.maxCoeff() - seg.minCoeff() > tol_.degeneracy * hn)
        throw point_error("eigenvalue grouping inconsistent with declared band groups");
    }
    for (int i = 0; i < b.eps.size(); ++i)
      for (int j = 0; j < b.eps.size(); ++j)
        if (group_[i] != group_[j] && std::abs(b.eps[i] - b.eps[j]) < tol_.gap * hn)
          throw point_error("eigenvalue grouping inconsistent with declared band groups (gap)");
    if (max_abs(project(f.U0 * H * f.U0.adjoint(), group_, false)) > 1e-10 * hn)
      throw point_error("frame does not block-diagonalize H");
    return b;
  }

  double gap_abs(const phase_point& p) const { return tol_.gap * std::max(m_->h(p).norm(), 1e-300); }

 private:
  std::pair<int, int> block(int g) const {
    int start = -1, size = 0;
    for (int i = 0; i < static_cast<int>(group_.size()); ++i)
      if (group_[i] == g) {
        if (start < 0) start = i;
        ++size;
      }
    return {start, size};
  }

  std::pair<Eigen::VectorXd, cmat> raw(const phase_point& p) const {
    Eigen::SelfAdjointEigenSolver<cmat> es(m_->h(p));
    if (es.info() != Eigen::Success) throw point_error("eigendecomposition failed");
    const int n = m_->dim();
    Eigen::VectorXd v(n);
    cmat vec(n, n);
    for (int i = 0; i < n; ++i) {
      v[i] = es.eigenvalues()[n - 1 - i];
      vec.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return {v, vec};
  }

  const model* m_;
  tolerances tol_;
  std::vector<int> group_;
  cmat ref_;
};

inline band_frame diagonalize_classical(const model& m, const phase_point& x, tolerances tol = {}) {
  return frame_field(m, x, tol).classical(x);
}

// ---- local quantities --------------------------------------------------------------------

// frame, connections and energy gradient at one point, from one 24-point stencil
struct local_data {
  cmat U0, eps0;
  Eigen::VectorXd eps;
  conn6 A;
  grad6 g;  // d eps0
};

inline local_data local(const frame_field& ff, const vec6& x) {
  local_data d;
  frame_data f0 = ff(x);
  d.U0 = f0.U0;
  d.eps0 = f0.eps0;
  d.eps = f0.eps0.diagonal().real();
  const fd_options& o = ff.tol().fd;
  for (int k = 0; k < 6; ++k) {
    const double h = o.rel_step * (1.0 + std::abs(x[k]));
    vec6 dx = vec6::Zero();
    dx[k] = h;
    frame_data p1 = ff(x + dx), m1 = ff(x - dx);
    cmat dU, de;
    if (o.fourth_order) {
      frame_data p2 = ff(x + 2 * dx), m2 = ff(x - 2 * dx);
      dU = (-p2.U0 + 8.0 * p1.U0 - 8.0 * m1.U0 + m2.U0).adjoint() / (12 * h);
      de = (-p2.eps0 + 8.0 * p1.eps0 - 8.0 * m1.eps0 + m2.eps0) / (12 * h);
    } else {
      dU = (p1.U0 - m1.U0).adjoint() / (2 * h);
      de = (p1.eps0 - m1.eps0) / (2 * h);
    }
    d.g[k] = de;
    // d_{R_i} feeds A^{P_i}, d_{P_i} feeds A^{R_i}
    cmat a = k < 3 ? cmat(-I * d.U0 * dU) : cmat(I * d.U0 * dU);
    d.A[k < 3 ? k + 3 : k - 3] = 0.5 * herm(a);
  }
  return d;
}

inline conn6 numerical_connections(const frame_field& ff, const phase_point& x) { return local(ff, x.x()).A; }

// -[., eps0]^{-1} P- {1/2 A^k d_k eps0 + H.C.} + (i/4)(Z + Z^+),
// Z = sum_l P-A^{R_l} P+A^{P_l} - P-A^{P_l} P+A^{R_l}
inline cmat b_matrix(const local_data& d, const std::vector<int>& group, double gap_abs) {
  const int n = static_cast<int>(d.eps.size());
  cmat M = cmat::Zero(n, n);
  for (int k = 0; k < 6; ++k) M += 0.5 * d.A[k] * d.g[k];
  M = herm(M);
  cmat B = -inv_commutator(project(M, group, false), d.eps, group, gap_abs);
  cmat Z = cmat::Zero(n, n);
  for (int l = 0; l < 3; ++l) {
    Z += project(d.A[l], group, false) * project(d.A[3 + l], group, true);
    Z -= project(d.A[3 + l], group, false) * project(d.A[l], group, true);
  }
  return B + 0.25 * I * herm(Z);
}

// 1/2 P+ [(D_X eps0) A^X + H.C.] without the hbar,  D_R = d_R + (i/2)[A^P, .], D_P = d_P - (i/2)[A^R, .]
inline cmat first_order_coeff(const local_data& d, const std::vector<int>& group) {
  const int n = static_cast<int>(d.eps.size());
  cmat t = cmat::Zero(n, n);
  for (int l = 0; l < 3; ++l) {
    t += (d.g[l] + 0.5 * I * comm(d.A[3 + l], d.eps0)) * d.A[l];
    t += (d.g[3 + l] - 0.5 * I * comm(d.A[l], d.eps0)) * d.A[3 + l];
  }
  return 0.5 * project(herm(t), group, true);
}

// ---- second-order machinery --------------------------------------------------------------

// everything needed at a point for order hbar^2: centre data plus stencil derivatives of A, B, F
struct second_order_data {
  local_data c;
  cmat B;
  cmat F;                      // P+[(D eps0)A + H.C.] = 2 * first-order coefficient
  std::array<grad6, 6> dA;     // dA[k][l] = d_l A^k
  grad6 dB, dF;
  conn6 delta;                 // corrected connection: A = A0 + hbar * delta
};

inline second_order_data second_order(const frame_field& ff, const vec6& x) {
  second_order_data s;
  const auto& grp = ff.group();
  const double gap = ff.gap_abs(phase_point::from(x));
  s.c = local(ff, x);
  s.B = b_matrix(s.c, grp, gap);
  s.F = 2.0 * first_order_coeff(s.c, grp);
  const fd_options& o = ff.tol().fd;
  for (int l = 0; l < 6; ++l) {
    const double h = o.rel_step * (1.0 + std::abs(x[l]));
    vec6 dx = vec6::Zero();
    dx[l] = h;
    const std::array<double, 4> off{2, 1, -1, -2};
    const std::array<double, 4> w4{-1, 8, -8, 1};
    std::array<local_data, 4> st;
    std::array<cmat, 4> Bs, Fs;
    const int np = o.fourth_order ? 4 : 2;
    for (int q = 0; q < np; ++q) {
      double sft = o.fourth_order ? off[q] : (q == 0 ? 1.0 : -1.0);
      vec6 y = x + sft * dx;
      st[q] = local(ff, y);
      Bs[q] = b_matrix(st[q], grp, ff.gap_abs(phase_point::from(y)));
      Fs[q] = 2.0 * first_order_coeff(st[q], grp);
    }
    auto comb = [&](auto get) -> cmat {
      if (o.fourth_order) {
        cmat r = w4[0] * get(0);
        for (int q = 1; q < 4; ++q) r += w4[q] * get(q);
        return r / (12 * h);
      }
      return (get(0) - get(1)) / (2 * h);
    };
    for (int k = 0; k < 6; ++k) s.dA[k][l] = comb([&](int q) { return st[q].A[k]; });
    s.dB[l] = comb([&](int q) { return Bs[q]; });
    s.dF[l] = comb([&](int q) { return Fs[q]; });
  }
  // delta^k = 1/4 herm(1/2 sum_l A^l d_l A^k + [B, X^k/hbar] + [B, A^k])
  // [B, R_k/hbar] -> -i d_{P_k} B,  [B, P_k/hbar] -> +i d_{R_k} B
  for (int k = 0; k < 6; ++k) {
    cmat t = cmat::Zero(s.c.eps0.rows(), s.c.eps0.cols());
    for (int l = 0; l < 6; ++l) t += 0.5 * s.c.A[l] * s.dA[k][l];
    cmat bx = k < 3 ? cmat(-I * s.dB[3 + k]) : cmat(I * s.dB[k - 3]);
    t += bx + comm(s.B, s.c.A[k]);
    s.delta[k] = 0.25 * herm(t);
  }
  return s;
}

struct connection_set {
  conn6 A;
  bool corrected = false;
  double hbar = 0;
  phase_point point;
};

inline connection_set corrected_connections(const second_order_data& s, double hbar, const phase_point& x) {
  connection_set cs{{}, true, hbar, x};
  for (int k = 0; k < 6; ++k) cs.A[k] = s.c.A[k] + hbar * s.delta[k];
  return cs;
}

// hbar^2 coefficient of the canonical energy, bracket term excluded
inline cmat second_order_coeff(const second_order_data& s, const std::vector<int>& group) {
  const local_data& c = s.c;
  const auto& d = s.delta;
  const int n = static_cast<int>(c.eps.size());
  cmat t = cmat::Zero(n, n);
  for (int l = 0; l < 3; ++l) {
    t += c.g[l] * d[l] + c.g[3 + l] * d[3 + l];
    t += 0.5 * I * (comm(d[3 + l], c.eps0) * c.A[l] + comm(c.A[3 + l], c.eps0) * d[l]);
    t -= 0.5 * I * (comm(d[l], c.eps0) * c.A[3 + l] + comm(c.A[l], c.eps0) * d[3 + l]);
  }
  cmat o2a = 0.5 * project(herm(t), group, true);
  cmat u = cmat::Zero(n, n);
  for (int l = 0; l < 3; ++l) {
    u += (s.dF[l] + 0.5 * I * comm(c.A[3 + l], s.F)) * c.A[l];
    u += (s.dF[3 + l] - 0.5 * I * comm(c.A[l], s.F)) * c.A[3 + l];
  }
  cmat o2b = project(herm(u), group, true) / 8.0;
  return o2a + o2b;
}

// ---- energy reports ------------------------------------------------------------------------

struct energy_report {
  int order = 0;
  double hbar = 0;
  phase_point point;
  cmat zeroth, first, second, bracket;  // each already multiplied by its hbar power
  cmat total;
  bool partial = false;
  std::string note;
  cmat B;
};

inline energy_report energy_order0(const frame_field& ff, const phase_point& x, double hbar) {
  band_frame b = ff.classical(x);
  energy_report r;
  r.order = 0;
  r.hbar = hbar;
  r.point = x;
  const int n = static_cast<int>(b.eps.size());
  r.zeroth = b.eps0;
  r.first = r.second = r.bracket = r.B = cmat::Zero(n, n);
  r.total = r.zeroth;
  return r;
}

inline energy_report energy_order1(const frame_field& ff, const phase_point& x, double hbar) {
  energy_report r = energy_order0(ff, x, hbar);
  r.order = 1;
  local_data d = local(ff, x.x());
  r.first = hbar * first_order_coeff(d, ff.group());
  r.total = r.zeroth + r.first;
  return r;
}

inline void check_supported(const model& m) {
  if (!m.hamiltonian_bracket_free())
    throw std::invalid_argument("unsupported model: (d_hbar + <.>) H != 0 pathway not implemented");
}

inline energy_report energy_order2_canonical(const frame_field& ff, const phase_point& x, double hbar,
                                             const second_order_data* pre = nullptr) {
  check_supported(ff.mdl());
  energy_report r = energy_order0(ff, x, hbar);
  r.order = 2;
  second_order_data own;
  if (!pre) own = second_order(ff, x.x());
  const second_order_data& s = pre ? *pre : own;
  r.first = hbar * first_order_coeff(s.c, ff.group());
  r.second = hbar * hbar * second_order_coeff(s, ff.group());
  bracket_term bt = ff.mdl().bracket_eps0(x, hbar);
  r.bracket = bt.available ? bt.value : cmat::Zero(r.zeroth.rows(), r.zeroth.cols());
  r.partial = !bt.available;
  r.note = bt.note;
  r.B = s.B;
  r.total = r.zeroth + r.first + r.second + r.bracket;
  return r;
}

// ---- truncated hbar series ---------------------------------------------------------------

struct series2 {
  cmat c[3];
  static series2 of(const cmat& a0, const cmat& a1 = cmat(), const cmat& a2 = cmat()) {
    series2 s;
    const auto n = a0.rows();
    s.c[0] = a0;
    s.c[1] = a1.size() ? a1 : cmat::Zero(n, n);
    s.c[2] = a2.size() ? a2 : cmat::Zero(n, n);
    return s;
  }
  cmat at(double h) const { return c[0] + h * c[1] + h * h * c[2]; }
  friend series2 operator+(series2 a, const series2& b) {
    for (int k = 0; k < 3; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend series2 operator-(series2 a, const series2& b) {
    for (int k = 0; k < 3; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend series2 operator*(cd z, series2 a) {
    for (auto& m : a.c) m *= z;
    return a;
  }
  friend series2 operator*(const series2& a, const series2& b) {
    series2 r;
    r.c[0] = a.c[0] * b.c[0];
    r.c[1] = a.c[0] * b.c[1] + a.c[1] * b.c[0];
    r.c[2] = a.c[0] * b.c[2] + a.c[1] * b.c[1] + a.c[2] * b.c[0];
    return r;
  }
  series2 shift() const {  // multiply by hbar
    series2 r;
    r.c[0] = cmat::Zero(c[0].rows(), c[0].cols());
    r.c[1] = c[0];
    r.c[2] = c[1];
    return r;
  }
  series2 map(const std::function<cmat(const cmat&)>& f) const {
    series2 r;
    for (int k = 0; k < 3; ++k) r.c[k] = f(c[k]);
    return r;
  }
};

inline series2 scomm(const series2& a, const series2& b) { return a * b - b * a; }

// Covariant form: eps0(x) + (i hbar/4) P+{[eps0, Ah^{R_l}] Ah^{P_l} - [eps0, Ah^{P_l}] Ah^{R_l}
//   - [eps0, [A^{R_l}, A^{P_l}]] + H.C.} -/+ (hbar^2/8) strings - (hbar/2)<eps0>,
// Ah = A - (hbar/4)((P+A0^Y . d_Y) A + H.C.).  Coefficients are functions of x = (r, p).
// Returns the series; zeroth = eps0, first and second collect the rest.
inline series2 covariant_series(const second_order_data& s, const std::vector<int>& group) {
  const local_data& c = s.c;
  const int n = static_cast<int>(c.eps.size());
  const cmat Z = cmat::Zero(n, n);
  auto Pp = [&](const cmat& m) { return project(m, group, true); };
  std::array<series2, 6> A, Ah;
  for (int k = 0; k < 6; ++k) {
    A[k] = series2::of(c.A[k], s.delta[k]);
    cmat adv = Z;
    for (int l = 0; l < 6; ++l) adv += Pp(c.A[l]) * s.dA[k][l];
    Ah[k] = series2::of(c.A[k], s.delta[k] - 0.25 * herm(adv));
  }
  const series2 e0 = series2::of(c.eps0);
  series2 inner = series2::of(Z);
  for (int l = 0; l < 3; ++l) {
    inner = inner + scomm(e0, Ah[l]) * Ah[3 + l] - scomm(e0, Ah[3 + l]) * Ah[l] -
            scomm(e0, scomm(A[l], A[3 + l]));
  }
  // (i hbar / 4) P+ {...} + H.C. of the whole term
  series2 t1 = (0.25 * I * inner).map([&](const cmat& m) { return cmat(herm(Pp(m))); }).shift();

  cmat S = Z;
  for (int l = 0; l < 3; ++l)
    S += comm(c.eps0, c.A[l]) * c.A[3 + l] - comm(c.eps0, c.A[3 + l]) * c.A[l];
  cmat t23 = Z;
  for (int k = 0; k < 3; ++k)
    t23 += -comm(S, c.A[k]) * c.A[3 + k] + comm(S, c.A[3 + k]) * c.A[k];
  t23 = 0.5 * herm(Pp(t23)) / 8.0;

  series2 out = e0 + t1;
  out.c[2] += t23;
  return out;
}

inline energy_report energy_order2_covariant(const frame_field& ff, const phase_point& x, double hbar,
                                             const second_order_data* pre = nullptr) {
  check_supported(ff.mdl());
  energy_report r = energy_order0(ff, x, hbar);
  r.order = 2;
  second_order_data own;
  if (!pre) own = second_order(ff, x.x());
  const second_order_data& s = pre ? *pre : own;
  series2 cs = covariant_series(s, ff.group());
  r.first = hbar * cs.c[1];
  r.second = hbar * hbar * cs.c[2];
  bracket_term bt = ff.mdl().bracket_eps0(x, hbar);
  r.bracket = bt.available ? bt.value : cmat::Zero(r.zeroth.rows(), r.zeroth.cols());
  r.partial = !bt.available;
  r.note = bt.note;
  r.B = s.B;
  r.total = r.zeroth + r.first + r.second + r.bracket;
  return r;
}

// ---- transformation matrix ---------------------------------------------------------------

struct u_first_order {
  cmat U0;
  cmat generator;  // ahr + hr, so that U = (1 + hbar generator) U0
  cmat ahr, hr;
  cmat U(double hbar) const { return U0 + hbar * generator * U0; }
};

inline u_first_order u_order1(const local_data& d, const cmat& B) {
  u_first_order u;
  u.U0 = d.U0;
  u.ahr = B;
  u.hr = cmat::Zero(d.U0.rows(), d.U0.cols());
  for (int l = 0; l < 3; ++l) u.hr += -0.25 * I * comm(d.A[l], d.A[3 + l]);
  u.generator = u.ahr + u.hr;
  return u;
}

// anti-Hermitian part of the generator projected on the groups; zero when the gauge condition holds
inline double gauge_residual(const u_first_order& u, const std::vector<int>& group) {
  return max_abs(project(0.5 * (u.generator - u.generator.adjoint()), group, true));
}

// |U * U^+ - 1| with the first-order Moyal product,
// U * V = UV + (i hbar/2) sum_i (d_{R_i}U d_{P_i}V - d_{P_i}U d_{R_i}V)
inline double unitarity_defect(const frame_field& ff, const phase_point& x, double hbar) {
  auto U_at = [&](const vec6& y) -> cmat {
    local_data d = local(ff, y);
    cmat B = b_matrix(d, ff.group(), ff.gap_abs(phase_point::from(y)));
    return u_order1(d, B).U(hbar);
  };
  const vec6 x6 = x.x();
  cmat U = U_at(x6);
  grad6 dU = fd_gradient(U_at, x6, ff.tol().fd);
  cmat s = U * U.adjoint() - cmat::Identity(U.rows(), U.cols());
  for (int i = 0; i < 3; ++i)
    s += 0.5 * I * hbar * (dU[i] * dU[3 + i].adjoint() - dU[3 + i] * dU[i].adjoint());
  return max_abs(s);
}

// order-by-order energy coefficients: eps = c0 + hbar c1 + hbar^2 c2 (bracket folded into c2)
struct energy_coeffs {
  cmat c0, c1, c2;
  cmat bracket_rate;  // <eps0> / hbar, so that <eps> = hbar * bracket_rate
};

inline energy_coeffs coefficients(const frame_field& ff, const second_order_data& s, const phase_point& x) {
  energy_coeffs e;
  e.c0 = s.c.eps0;
  e.c1 = first_order_coeff(s.c, ff.group());
  e.c2 = second_order_coeff(s, ff.group());
  bracket_term bt = ff.mdl().bracket_eps0(x, 1.0);
  if (!bt.available) throw point_error(bt.note);
  e.c2 += bt.value;
  // -(hbar/2)<eps0> = hbar^2 * value(1)  ->  <eps0> = -2 hbar value(1)
  e.bracket_rate = -2.0 * bt.value;
  return e;
}

// residual of d_hbar eps = O_hbar eps - <eps> through order hbar, with the running connection
// A0 + 2 hbar delta and eps truncated at hbar^2; one value per requested hbar
inline std::vector<double> hbar_ode_residual(const frame_field& ff, const phase_point& x,
                                             const std::vector<double>& hbars) {
  check_supported(ff.mdl());
  const vec6 x6 = x.x();
  second_order_data s = second_order(ff, x6);
  energy_coeffs e = coefficients(ff, s, x);
  std::array<grad6, 3> de;
  {
    const fd_options& o = ff.tol().fd;
    for (int k = 0; k < 6; ++k) {
      const double h = o.rel_step * (1.0 + std::abs(x6[k]));
      vec6 dx = vec6::Zero();
      dx[k] = h;
      std::vector<double> off = o.fourth_order ? std::vector<double>{2, 1, -1, -2} : std::vector<double>{1, -1};
      std::vector<double> w = o.fourth_order ? std::vector<double>{-1, 8, -8, 1} : std::vector<double>{1, -1};
      const double den = o.fourth_order ? 12 * h : 2 * h;
      for (int c = 0; c < 3; ++c) de[c][k] = cmat::Zero(e.c0.rows(), e.c0.cols());
      for (std::size_t q = 0; q < off.size(); ++q) {
        vec6 y = x6 + off[q] * dx;
        energy_coeffs ey = coefficients(ff, second_order(ff, y), phase_point::from(y));
        de[0][k] += w[q] * ey.c0 / den;
        de[1][k] += w[q] * ey.c1 / den;
        de[2][k] += w[q] * ey.c2 / den;
      }
    }
  }
  const auto& grp = ff.group();
  std::vector<double> out;
  for (double hb : hbars) {
    cmat eps = e.c0 + hb * e.c1 + hb * hb * e.c2;
    cmat lhs = e.c1 + 2 * hb * e.c2;
    conn6 A;
    for (int k = 0; k < 6; ++k) A[k] = s.c.A[k] + 2 * hb * s.delta[k];
    cmat t = cmat::Zero(eps.rows(), eps.cols());
    for (int k = 0; k < 6; ++k) t += A[k] * (de[0][k] + hb * de[1][k] + hb * hb * de[2][k]);
    cmat O = 0.5 * project(herm(t), grp, true);
    cmat u = cmat::Zero(eps.rows(), eps.cols());
    for (int l = 0; l < 3; ++l) u += comm(eps, A[l]) * A[3 + l] - comm(eps, A[3 + l]) * A[l];
    O += herm(0.25 * I * project(u, grp, true));
    out.push_back(max_abs(lhs - (O - hb * e.bracket_rate)));
  }
  return out;
}

inline energy_report diagonalize(const frame_field& ff, const phase_point& x, int order, double hbar) {
  switch (order) {
    case 0: return energy_order0(ff, x, hbar);
    case 1: return energy_order1(ff, x, hbar);
    case 2: return energy_order2_canonical(ff, x, hbar);
    default: throw std::invalid_argument("order must be 0, 1 or 2");
  }
}

}  // namespace bd
