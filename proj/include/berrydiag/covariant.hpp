#pragma once

#include "berrydiag/diagonalizer.hpp"
#include "berrydiag/models/model.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <string>
#include <vector>

namespace bd {

// ---- covariant coordinates -----------------------------------------------------------------

struct covariant_vars {
  std::array<cmat, 3> r, p;
  conn6 a0;  // projected connections, R part then P part
  conn6 a1;  // second-order coefficients
  phase_point point;
  double hbar = 0;
};

// x = X + hbar a0 + (hbar^2/2) a1,  a0 = P+A0,  a1 = 2 P+delta + 1/2((P+A0^Y . d_Y) P+A0 + H.C.)
inline covariant_vars covariant(const second_order_data& s, const std::vector<int>& group, const phase_point& x,
                                double hbar) {
  covariant_vars cv;
  cv.point = x;
  cv.hbar = hbar;
  const auto n = s.c.eps0.rows();
  for (int k = 0; k < 6; ++k) {
    cv.a0[k] = project(s.c.A[k], group, true);
    cmat t = cmat::Zero(n, n);
    for (int l = 0; l < 6; ++l) t += project(s.c.A[l], group, true) * project(s.dA[k][l], group, true);
    cv.a1[k] = 2.0 * project(s.delta[k], group, true) + 0.5 * herm(t);
  }
  const vec6 x6 = x.x();
  for (int i = 0; i < 3; ++i) {
    cv.r[i] = x6[i] * cmat::Identity(n, n) + hbar * cv.a0[i] + 0.5 * hbar * hbar * cv.a1[i];
    cv.p[i] = x6[3 + i] * cmat::Identity(n, n) + hbar * cv.a0[3 + i] + 0.5 * hbar * hbar * cv.a1[3 + i];
  }
  return cv;
}

inline covariant_vars covariant(const frame_field& ff, const phase_point& x, double hbar) {
  return covariant(second_order(ff, x.x()), ff.group(), x, hbar);
}

// covariant energy with x = X + hbar a0 + (hbar^2/2) a1 Taylor-expanded through hbar^2 with fully
// symmetrized products, giving a canonical-variable matrix comparable to energy_order2_canonical
inline cmat reexpanded_covariant(const frame_field& ff, const phase_point& x, double hbar) {
  const vec6 x6 = x.x();
  const auto& grp = ff.group();
  second_order_data s = second_order(ff, x6);
  covariant_vars cv = covariant(s, grp, x, hbar);
  series2 cs = covariant_series(s, grp);
  auto c1_at = [&](const vec6& y) -> cmat { return covariant_series(second_order(ff, y), grp).c[1]; };
  auto g_at = [&](int l) { return [&, l](const vec6& y) -> cmat { return local(ff, y).g[l]; }; };
  grad6 dc1 = fd_gradient(c1_at, x6, ff.tol().fd);
  const auto n = s.c.eps0.rows();
  auto anti = [](const cmat& a, const cmat& b) -> cmat { return 0.5 * (a * b + b * a); };
  cmat out = s.c.eps0 + hbar * cs.c[1] + hbar * hbar * cs.c[2];
  for (int l = 0; l < 6; ++l) {
    const cmat a = cv.a0[l] + 0.5 * hbar * cv.a1[l];
    out += hbar * anti(a, s.c.g[l]) + hbar * hbar * anti(cv.a0[l], dc1[l]);
    grad6 dd = fd_gradient(g_at(l), x6, ff.tol().fd);
    for (int m = 0; m < 6; ++m) {
      const cmat& al = cv.a0[l];
      const cmat& am = cv.a0[m];
      const cmat D = 0.5 * (dd[m] + dd[m].adjoint());
      out += 0.5 * hbar * hbar * (al * am * D + al * D * am + D * al * am) / 3.0;
    }
  }
  bracket_term bt = ff.mdl().bracket_eps0(x, hbar);
  if (bt.available) out += bt.value;
  (void)n;
  return out;
}

// ---- curvatures ----------------------------------------------------------------------------

struct curvature_set {
  std::array<std::array<cmat, 3>, 3> rr, pp, pr;
  phase_point point;
  double hbar = 0;

  // Theta_k = 1/2 eps_kij Theta_ij
  std::array<cmat, 3> rr_vector() const {
    return {rr[1][2], rr[2][0], rr[0][1]};
  }
};

// the connection fields entering x = X + hbar a(x): a = a0 + (hbar/2) a1
inline conn6 covariant_connection(const frame_field& ff, const vec6& y, double hbar) {
  conn6 a;
  if (hbar == 0) {
    local_data d = local(ff, y);
    for (int k = 0; k < 6; ++k) a[k] = project(d.A[k], ff.group(), true);
    return a;
  }
  covariant_vars cv = covariant(ff, phase_point::from(y), hbar);
  for (int k = 0; k < 6; ++k) a[k] = cv.a0[k] + 0.5 * hbar * cv.a1[k];
  return a;
}

// [r_i, r_j] = i hbar^2 Theta^rr_ij, [p_i, p_j] = i hbar^2 Theta^pp_ij,
// [p_i, r_j] = -i hbar delta_ij + i hbar^2 Theta^pr_ij
inline curvature_set curvatures(const frame_field& ff, const phase_point& x, double hbar) {
  const vec6 x6 = x.x();
  const fd_options& o = ff.tol().fd;
  conn6 a = covariant_connection(ff, x6, hbar);
  std::array<conn6, 6> da;  // da[l][k] = d_l a^k
  for (int l = 0; l < 6; ++l) {
    const double h = o.rel_step * (1.0 + std::abs(x6[l]));
    vec6 dx = vec6::Zero();
    dx[l] = h;
    conn6 p1 = covariant_connection(ff, x6 + dx, hbar), m1 = covariant_connection(ff, x6 - dx, hbar);
    if (o.fourth_order) {
      conn6 p2 = covariant_connection(ff, x6 + 2 * dx, hbar), m2 = covariant_connection(ff, x6 - 2 * dx, hbar);
      for (int k = 0; k < 6; ++k) da[l][k] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12 * h);
    } else {
      for (int k = 0; k < 6; ++k) da[l][k] = (p1[k] - m1[k]) / (2 * h);
    }
  }
  curvature_set c;
  c.point = x;
  c.hbar = hbar;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      c.rr[i][j] = da[3 + i][j] - da[3 + j][i] - I * comm(a[i], a[j]);
      c.pp[i][j] = -(da[i][3 + j] - da[j][3 + i]) - I * comm(a[3 + i], a[3 + j]);
      c.pr[i][j] = -da[i][j] - da[3 + j][3 + i] - I * comm(a[3 + i], a[j]);
    }
  return c;
}

// ---- neutrino band dynamics ----------------------------------------------------------------

// positive-energy band of the massless field with fixed helicity lambda = +-1.
// spin is the spin projection per unit helicity entering the curvature monopole; the
// diagonalization gives 1/2 (see curvatures()), the closed form quoted with lambda alone uses 1
struct neutrino_band {
  const neutrino_model* m;
  double lambda = 1;
  double hbar = 1e-2;
  double spin = 0.5;

  double energy(const vec3& r, const vec3& P) const {
    const inverse_field F = m->F();
    return F.value(r) * P.norm() - hbar * hbar * P.dot(F.gradient(r)) / (4 * P.norm());
  }
  vec3 grad_P(const vec3& r, const vec3& P) const {
    const inverse_field F = m->F();
    const double p = P.norm();
    const vec3 n = P / p, g = F.gradient(r);
    return F.value(r) * n - hbar * hbar * (g - n * n.dot(g)) / (4 * p);
  }
  vec3 grad_r(const vec3& r, const vec3& P) const {
    const inverse_field F = m->F();
    return P.norm() * F.gradient(r) - hbar * hbar * (F.hessian(r) * P) / (4 * P.norm());
  }
  vec3 theta(const vec3& P) const { return -spin * lambda * P / std::pow(P.norm(), 3); }
};

struct eom {
  vec3 rdot, Pdot;
};

// Pdot = -grad_r eps (computed first), rdot = grad_P eps - hbar Pdot x Theta
inline eom eom_rhs(const neutrino_band& b, const vec3& r, const vec3& P) {
  if (P.norm() < 1e-12) throw point_error("|P| underflow");
  eom e;
  e.Pdot = -b.grad_r(r, P);
  e.rdot = b.grad_P(r, P) - b.hbar * e.Pdot.cross(b.theta(P));
  return e;
}

struct trajectory_state {
  double t = 0;
  vec3 r, P;
  double lambda = 1;
  double helicity = 1;  // chi^+ sigma.P^ chi of the transported spinor
  double eps = 0;
  double speed = 0;
};

// r(3), P(3), spinor chi(2 complex) as 4 reals
using ode_state = std::array<double, 10>;

enum class method { rk4, rk45 };

struct trajectory {
  std::vector<trajectory_state> states;
  double helicity_drift = 0;  // max |h(t) - lambda|
  double energy_drift = 0;    // max |eps(t) - eps(0)| / |eps(0)|
};

namespace detail {

inline Eigen::Vector2cd helicity_spinor(const vec3& P, double lambda) {
  const auto s = pauli_matrices();
  const vec3 n = P.normalized();
  Eigen::Matrix2cd h = n[0] * s[0] + n[1] * s[1] + n[2] * s[2];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
  return es.eigenvectors().col(lambda > 0 ? 1 : 0);
}

inline trajectory_state observe(const neutrino_band& b, const ode_state& y, double t) {
  trajectory_state s;
  s.t = t;
  s.r = vec3(y[0], y[1], y[2]);
  s.P = vec3(y[3], y[4], y[5]);
  s.lambda = b.lambda;
  Eigen::Vector2cd chi(cd(y[6], y[7]), cd(y[8], y[9]));
  const auto sg = pauli_matrices();
  const vec3 n = s.P.normalized();
  Eigen::Matrix2cd h = n[0] * sg[0] + n[1] * sg[1] + n[2] * sg[2];
  s.helicity = (chi.adjoint() * h * chi)(0, 0).real() / chi.squaredNorm();
  s.eps = b.energy(s.r, s.P);
  s.speed = eom_rhs(b, s.r, s.P).rdot.norm();
  return s;
}

}  // namespace detail

// the spinor is parallel transported with the momentum direction:
// chi' = -(i/2) sigma.(P^ x Pdot / |P|) chi, which keeps sigma.P^ fixed
inline void ode_rhs(const neutrino_band& b, const ode_state& y, ode_state& dy) {
  const vec3 r(y[0], y[1], y[2]), P(y[3], y[4], y[5]);
  eom e = eom_rhs(b, r, P);
  const vec3 w = P.normalized().cross(e.Pdot) / P.norm();
  const auto s = pauli_matrices();
  Eigen::Vector2cd chi(cd(y[6], y[7]), cd(y[8], y[9]));
  Eigen::Vector2cd dchi = -0.5 * I * ((w[0] * s[0] + w[1] * s[1] + w[2] * s[2]) * chi);
  for (int i = 0; i < 3; ++i) {
    dy[i] = e.rdot[i];
    dy[3 + i] = e.Pdot[i];
  }
  dy[6] = dchi[0].real();
  dy[7] = dchi[0].imag();
  dy[8] = dchi[1].real();
  dy[9] = dchi[1].imag();
}

// fixed output grid t_k = k dt; rk45 adapts internally between grid points
inline trajectory integrate(const neutrino_band& b, const vec3& r0, const vec3& P0, double dt, int steps,
                            method mth = method::rk4, int record_every = 1, double rtol = 1e-12,
                            double atol = 1e-14) {
  namespace odeint = boost::numeric::odeint;
  if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (P0.norm() < 1e-12) throw point_error("|P| underflow");
  ode_state y{};
  Eigen::Vector2cd chi = detail::helicity_spinor(P0, b.lambda);
  for (int i = 0; i < 3; ++i) {
    y[i] = r0[i];
    y[3 + i] = P0[i];
  }
  y[6] = chi[0].real();
  y[7] = chi[0].imag();
  y[8] = chi[1].real();
  y[9] = chi[1].imag();

  trajectory tr;
  const double e0 = b.energy(r0, P0);
  auto record = [&](const ode_state& s, double t) {
    trajectory_state st = detail::observe(b, s, t);
    tr.helicity_drift = std::max(tr.helicity_drift, std::abs(st.helicity - b.lambda));
    tr.energy_drift = std::max(tr.energy_drift, std::abs(st.eps - e0) / std::max(std::abs(e0), 1e-300));
    tr.states.push_back(st);
  };
  auto sys = [&](const ode_state& s, ode_state& d, double) { ode_rhs(b, s, d); };
  record(y, 0.0);
  if (mth == method::rk4) {
    odeint::runge_kutta4<ode_state> st;
    for (int k = 1; k <= steps; ++k) {
      st.do_step(sys, y, (k - 1) * dt, dt);
      if (k % record_every == 0 || k == steps) record(y, k * dt);
    }
  } else {
    auto st = odeint::make_controlled(atol, rtol, odeint::runge_kutta_dopri5<ode_state>());
    double t = 0, h = dt;
    for (int k = 1; k <= steps; ++k) {
      const double tend = k * dt;
      int rejected = 0;
      while (t < tend - 1e-15 * tend) {
        h = std::min(h, tend - t);
        if (st.try_step(sys, y, t, h) == odeint::fail) {
          if (++rejected > 1000) throw point_error("rk45 step rejection overflow");
        } else {
          rejected = 0;
        }
      }
      t = tend;
      if (k % record_every == 0 || k == steps) record(y, k * dt);
    }
  }
  return tr;
}

}  // namespace bd
