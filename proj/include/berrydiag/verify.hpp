#pragma once

#include "berrydiag/covariant.hpp"
#include "berrydiag/diagonalizer.hpp"
#include "berrydiag/oracles.hpp"
#include "berrydiag/weyl/suite.hpp"

#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace bd::verify {

struct check {
  std::string id;
  std::string name;
  bool pass = false;
  double value = 0;  // measured figure
  double tol = 0;    // bound it is held to
  std::string detail;
  bool diagnostic = false;  // reported only, not part of the verdict
  std::string timing;       // wall-clock note, kept out of reproducible reports
};

struct thresholds {
  double oracle = 1e-8;
  double pauli = 1e-4;
  double curvature = 1e-8;
  double helicity = 1e-9;
  double spin_hall = 1e-9;
  double energy = 1e-8;
  double velocity = 1e-8;
  double slope = 0.1;  // around 2
  double free_field = 1e-12;
  double connections = 1e-6;
  double round_trip = 1e-12;
  double rk4_slope = 0.2;  // around 4
  double runtime = 10.0;   // seconds for the Dirac batch
};

struct options {
  std::uint64_t seed = 1;
  int points = 100;
  int curvature_points = 50;
  int symbolic_cases = 200;
  int symbolic_degree = 6;
  double hbar = 0.1;
  thresholds tol{};
};

// deterministic doubles from the portable engine
class sampler {
 public:
  explicit sampler(std::uint64_t seed) : r_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(r_.engine()() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  vec3 cube(double a) { return {uniform(-a, a), uniform(-a, a), uniform(-a, a)}; }
  vec3 direction() {
    for (;;) {
      vec3 v = cube(1);
      const double n = v.norm();
      if (n > 0.1 && n <= 1) return v / n;
    }
  }
  // |P| log-uniform in [lo, hi]
  vec3 momentum(double lo, double hi) { return direction() * lo * std::pow(hi / lo, uniform(0, 1)); }

 private:
  weyl::rng r_;
};

inline std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

inline check make(std::string id, std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(id), std::move(name), value <= tol, value, tol, std::move(detail), false};
}

// least-squares slope of log y against log x
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// c0 + c1 q^2 fitted over the samples, returns c0
inline double intercept_q2(const std::vector<double>& q, const std::vector<double>& y) {
  Eigen::MatrixXd A(q.size(), 2);
  Eigen::VectorXd b(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    A(i, 0) = 1;
    A(i, 1) = q[i] * q[i];
    b[i] = y[i];
  }
  return A.colPivHouseholderQr().solve(b)[0];
}

inline scalar_field test_potential() { return scalar_field::gaussian(0.7, 1.3, vec3(0.2, -0.1, 0.3)); }
inline scalar_field test_index_gaussian() { return scalar_field::gaussian(0.3, 1.1, vec3(0.1, 0.2, -0.3), 1.0); }
inline scalar_field test_index_linear() { return scalar_field::linear_field(1.0, vec3(0.05, -0.02, 0.03)); }

inline two_level_model test_two_level() {
  auto mono = [](std::array<int, 3> r, std::array<int, 3> p) {
    weyl::monomial m;
    m.r = r;
    m.p = p;
    return m;
  };
  std::array<std::vector<std::pair<double, weyl::monomial>>, 3> h;
  h[0] = {{0.8, mono({0, 0, 0}, {0, 0, 0})}, {0.3, mono({1, 0, 0}, {0, 0, 0})}};
  h[1] = {{0.5, mono({0, 0, 0}, {0, 1, 0})}, {0.2, mono({0, 1, 0}, {1, 0, 0})}};
  h[2] = {{0.6, mono({0, 0, 0}, {0, 0, 0})}, {0.4, mono({0, 0, 1}, {0, 0, 1})}};
  return two_level_model(h);
}

// ---- criteria 1 and 2 ------------------------------------------------------------------------

inline std::vector<check> dirac_oracles(const options& o) {
  const scalar_field V = test_potential();
  dirac_model m(1.0, 1.0, V);
  sampler s(o.seed);
  double worst_c = 0, worst_v = 0;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<phase_point> pts;
  for (int i = 0; i < o.points; ++i) pts.push_back({s.cube(2), s.momentum(0.1, 10)});
  for (const auto& x : pts) {
    frame_field ff(m, x);
    second_order_data so = second_order(ff, x.x());
    energy_report r = energy_order2_canonical(ff, x, o.hbar, &so);
    worst_c = std::max(worst_c, rel_err(r.total, oracle::blount_energy(x, 1, 1, V, o.hbar)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& x : pts) {
    frame_field ff(m, x);
    energy_report r = energy_order2_covariant(ff, x, o.hbar);
    worst_v = std::max(worst_v, rel_err(r.total, oracle::relativistic_energy(x, 1, 1, V, o.hbar)));
  }
  check c1 = make("1", "Dirac order-2 canonical vs Blount form", worst_c, o.tol.oracle,
                  std::to_string(o.points) + " points");
  c1.timing = "runtime " + fmt(secs) + " s";
  if (secs > o.tol.runtime) {
    c1.pass = false;
    c1.detail += ", runtime bound " + fmt(o.tol.runtime) + " s exceeded";
  }
  return {c1, make("2", "Dirac covariant form vs relativistic closed form", worst_v, o.tol.oracle,
                   std::to_string(o.points) + " points")};
}

// ---- criterion 3 ---------------------------------------------------------------------------

// odd-in-field parts of the positive block at small |P|, extrapolated to P = 0
inline std::vector<check> pauli_limit(const options& o) {
  const double m = 1.0, e = 1.0, a = 0.5, hb = o.hbar;
  const vec3 R(0.4, -0.3, 0.5);
  const vec3 dir = vec3(0.3, 0.8, -0.5).normalized();
  const scalar_field V1 = scalar_field::gaussian(1.0, 1.3, vec3(0.2, -0.1, 0.3));
  const auto sg = pauli_matrices();
  std::vector<double> qs, darwin, so;
  for (int k = 0; k < 10; ++k) {
    const double q = 1e-3 * std::pow(10.0, k / 9.0);
    const phase_point x{R, q * dir};
    const vec3 axis = V1.gradient(R).cross(x.P);
    double d_odd = 0, s_odd = 0;
    for (double sgn : {1.0, -1.0}) {
      scalar_field V = V1;
      V.amp = sgn * a;
      dirac_model dm(m, e, V);
      frame_field ff(dm, x);
      energy_report r = energy_order2_canonical(ff, x, hb);
      cmat two = (r.second + r.bracket).topLeftCorner(2, 2) / (hb * hb);
      cmat one = r.first.topLeftCorner(2, 2) / hb;
      const cmat sa = oracle::sigma_dot(sg, axis.normalized());
      d_odd += sgn * two.trace().real() / 2;
      s_odd += sgn * (sa * one).trace().real() / 2;
    }
    qs.push_back(q);
    darwin.push_back(d_odd / (2 * a) / V1.laplacian(R));
    so.push_back(s_odd / (2 * a) / axis.norm());
  }
  const double cd = intercept_q2(qs, darwin), cs = intercept_q2(qs, so);
  const double wd = e / (8 * m * m), ws = e / (4 * m * m);
  const double err = std::max(std::abs(cd - wd) / wd, std::abs(cs - ws) / ws);
  return {make("3", "Pauli limit: Darwin and spin-orbit coefficients", err, o.tol.pauli,
               "darwin " + fmt(cd) + " (expect " + fmt(wd) + "), spin-orbit " + fmt(cs) + " (expect " + fmt(ws) +
                   ")")};
}

// ---- criterion 4 ---------------------------------------------------------------------------

inline std::vector<check> neutrino_oracle(const options& o) {
  sampler s(o.seed + 1);
  double worst = 0;
  for (const scalar_field& n : {test_index_linear(), test_index_gaussian()}) {
    neutrino_model m(n);
    for (int i = 0; i < o.points / 2; ++i) {
      phase_point x{s.cube(2), s.momentum(0.1, 10)};
      frame_field ff(m, x);
      energy_report r = energy_order2_canonical(ff, x, o.hbar);
      worst = std::max(worst, rel_err(r.total, oracle::neutrino_energy(x, n, o.hbar)));
    }
  }
  return {make("4", "neutrino energy vs closed form", worst, o.tol.oracle,
               std::to_string(o.points) + " points, linear and gaussian index")};
}

// ---- criterion 5 ---------------------------------------------------------------------------

// helicity-projected curvature vector on the positive-energy block
inline vec3 band_curvature(const curvature_set& c, const vec3& P, double lambda) {
  const auto& d = dirac_matrices::get();
  const vec3 n = P.normalized();
  const cmat one = cmat::Identity(4, 4);
  const cmat h = n[0] * d.Sigma[0] + n[1] * d.Sigma[1] + n[2] * d.Sigma[2];
  const cmat pi = 0.25 * (one + d.beta) * (one + lambda * h);
  const auto v = c.rr_vector();
  vec3 t;
  for (int k = 0; k < 3; ++k) t[k] = (pi * v[k]).trace().real() / pi.trace().real();
  return t;
}

inline std::vector<check> neutrino_curvature(const options& o) {
  sampler s(o.seed + 2);
  neutrino_model m(test_index_linear());
  double worst = 0, worst_half = 0;
  for (int i = 0; i < o.curvature_points; ++i) {
    phase_point x{s.cube(1), s.momentum(0.1, 10)};
    // nested differences of a 1/|P| field: the default step leaves ~5e-8 truncation at |P| = 0.1
    tolerances t;
    t.fd.rel_step = 3e-4;
    frame_field ff(m, x, t);
    curvature_set c = curvatures(ff, x, o.hbar);
    for (double lam : {1.0, -1.0}) {
      const vec3 t = band_curvature(c, x.P, lam);
      const vec3 w = oracle::neutrino_curvature(x.P, lam);
      worst = std::max(worst, (t - w).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff());
      const vec3 wh = oracle::neutrino_curvature(x.P, 0.5 * lam);
      worst_half = std::max(worst_half, (t - wh).cwiseAbs().maxCoeff() / wh.cwiseAbs().maxCoeff());
    }
  }
  check d = make("5d", "neutrino curvature vs -(lambda/2) P/P^3 (spin-1/2 monopole)", worst_half, o.tol.curvature);
  d.diagnostic = true;
  return {make("5", "neutrino curvature vs -lambda P/P^3", worst, o.tol.curvature,
               std::to_string(o.curvature_points) + " momenta, both helicities"),
          d};
}

// ---- criterion 6 ---------------------------------------------------------------------------

inline std::vector<check> trajectory_physics(const options& o) {
  const scalar_field n = scalar_field::linear_field(1.0, vec3(0.05, 0, 0));
  neutrino_model m(n);
  const double hb = 1e-2;
  const vec3 r0 = vec3::Zero(), P0(0.6, 0, 0.8);
  neutrino_band bp{&m, 1, hb}, bm{&m, -1, hb};
  trajectory tp = integrate(bp, r0, P0, 1e-3, 10000);
  trajectory tm = integrate(bm, r0, P0, 1e-3, 10000);
  const double hel = std::max(tp.helicity_drift, tm.helicity_drift);
  const double en = std::max(tp.energy_drift, tm.energy_drift);
  double hall = 0, y = 0;
  for (std::size_t k = 0; k < tp.states.size(); ++k) {
    hall = std::max(hall, std::abs(tp.states[k].r[1] + tm.states[k].r[1]));
    y = std::max(y, std::abs(tp.states[k].r[1]));
  }
  double v = 0, vh = 0;
  for (const trajectory* t : {&tp, &tm})
    for (const auto& st : t->states) {
      const phase_point x{st.r, st.P};
      const double lit = oracle::neutrino_velocity_modulus(x, st.lambda, n, hb);
      const double half = oracle::neutrino_velocity_modulus(x, 0.5 * st.lambda, n, hb);
      v = std::max(v, std::abs(st.speed - lit) / lit);
      vh = std::max(vh, std::abs(st.speed - half) / half);
    }
  const bool ok = hel <= o.tol.helicity && hall <= o.tol.spin_hall && en <= o.tol.energy && v <= o.tol.velocity;
  check c{"6", "trajectory physics (helicity, spin Hall, energy, |v|)", ok, std::max({hel / o.tol.helicity,
          hall / o.tol.spin_hall, en / o.tol.energy, v / o.tol.velocity}), 1.0,
          "helicity drift " + fmt(hel) + ", spin-Hall asymmetry " + fmt(hall) + " (|y| " + fmt(y) +
              "), energy drift " + fmt(en) + ", |v| rel " + fmt(v),
          false};
  check d = make("6d", "|v| vs modulus formula with lambda^2 = 1/4", vh, o.tol.velocity);
  d.diagnostic = true;
  return {c, d};
}

// ---- criterion 7 ---------------------------------------------------------------------------

inline std::vector<check> symbolic(const options& o) {
  auto pr = weyl::product_rule_suite(o.seed, o.symbolic_cases, o.symbolic_degree, {1, 2});
  auto inv = weyl::invariance_suite(o.seed + 1, o.symbolic_cases, o.symbolic_degree, {1, 2});
  const int bad = (pr.cases - pr.exact) + (inv.cases - inv.exact);
  check c{"7", "bracket product rule and symmetrization invariance", pr.pass() && inv.pass(),
          static_cast<double>(bad), 0.0,
          std::to_string(pr.exact) + "/" + std::to_string(pr.cases) + " product rule, " +
              std::to_string(inv.exact) + "/" + std::to_string(inv.cases) + " invariance exact",
          false};
  return {c};
}

// ---- criterion 8 ---------------------------------------------------------------------------

inline std::vector<check> residual_scaling(const options& o) {
  const std::vector<double> hs{1e-1, 1e-2, 1e-3};
  dirac_model dm(1.0, 1.0, test_potential());
  two_level_model tl = test_two_level();
  const phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field fd(dm, x), ft(tl, x);
  std::vector<double> ud, ut;
  for (double h : hs) {
    ud.push_back(unitarity_defect(fd, x, h));
    ut.push_back(unitarity_defect(ft, x, h));
  }
  std::vector<double> od = hbar_ode_residual(fd, x, hs);
  neutrino_model nm(test_index_gaussian());
  frame_field fn(nm, x);
  std::vector<double> on = hbar_ode_residual(fn, x, hs);
  const double s1 = loglog_slope(hs, ud), s2 = loglog_slope(hs, ut), s3 = loglog_slope(hs, od),
               s4 = loglog_slope(hs, on);
  const double dev = std::max({std::abs(s1 - 2), std::abs(s2 - 2), std::abs(s3 - 2), std::abs(s4 - 2)});
  return {make("8", "unitarity defect and hbar-ODE residual scale as hbar^2", dev, o.tol.slope,
               "slopes: unitarity Dirac " + fmt(s1) + ", two-level " + fmt(s2) + "; ODE residual Dirac " +
                   fmt(s3) + ", neutrino " + fmt(s4))};
}

// ---- criterion 9 ---------------------------------------------------------------------------

inline std::vector<check> free_field(const options& o) {
  sampler s(o.seed + 3);
  dirac_model dm(1.0, 1.0, scalar_field::constant(0.0));
  neutrino_model nm(scalar_field::constant(1.0));
  double worst = 0;
  for (const model* m : {static_cast<const model*>(&dm), static_cast<const model*>(&nm)})
    for (int i = 0; i < 20; ++i) {
      phase_point x{s.cube(2), s.momentum(0.1, 10)};
      frame_field ff(*m, x);
      second_order_data so = second_order(ff, x.x());
      energy_report a = energy_order2_canonical(ff, x, o.hbar, &so);
      energy_report b = energy_order2_covariant(ff, x, o.hbar, &so);
      for (const energy_report* r : {&a, &b})
        worst = std::max({worst, max_abs(r->first), max_abs(r->second), max_abs(r->bracket)});
    }
  return {make("9", "free fields: hbar^1 and hbar^2 corrections vanish", worst, o.tol.free_field,
               "Dirac V = 0, neutrino F = 1, 20 points each, canonical and covariant")};
}

// ---- criterion 10 --------------------------------------------------------------------------

inline double rk4_convergence_slope() {
  neutrino_model m(test_index_gaussian());
  neutrino_band b{&m, 1, 1e-2};
  const vec3 r0(0.2, -0.1, 0.0), P0(0.5, 0.3, 0.8);
  const double T = 4.0;
  trajectory ref = integrate(b, r0, P0, T / 1600, 1600, method::rk4, 1600);
  const vec3 rr = ref.states.back().r;
  std::vector<double> dts, errs;
  for (int steps : {20, 40, 80, 160}) {
    trajectory t = integrate(b, r0, P0, T / steps, steps, method::rk4, steps);
    dts.push_back(T / steps);
    errs.push_back((t.states.back().r - rr).norm());
  }
  return loglog_slope(dts, errs);
}

inline std::vector<check> plumbing(const options& o) {
  sampler s(o.seed + 4);
  dirac_model dm(1.0, 1.0, test_potential());
  neutrino_model nm(test_index_gaussian());
  double conn = 0, trip = 0;
  for (const model* m : {static_cast<const model*>(&dm), static_cast<const model*>(&nm)})
    for (int i = 0; i < 20; ++i) {
      phase_point x{s.cube(2), s.momentum(0.1, 10)};
      frame_field ff(*m, x);
      conn6 num = numerical_connections(ff, x), ana = *m->analytic_connections(x);
      for (int k = 0; k < 6; ++k) conn = std::max(conn, max_abs(num[k] - ana[k]) / std::max(max_abs(ana[k]), 1.0));
      band_frame bf = ff.classical(x);
      cmat M = cmat::Zero(4, 4);
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c)
          if (bf.group[a] != bf.group[c]) M(a, c) = cd(s.uniform(-1, 1), s.uniform(-1, 1));
      cmat Vi = inv_commutator(M, bf.eps, bf.group, ff.gap_abs(x));
      trip = std::max(trip, rel_err(comm(Vi, bf.eps0), M));
    }
  const double slope = rk4_convergence_slope();
  const bool ok = conn <= o.tol.connections && trip <= o.tol.round_trip && std::abs(slope - 4) <= o.tol.rk4_slope;
  check c{"10", "numerical plumbing (connections, inverse commutator, RK4 order)", ok,
          std::max({conn / o.tol.connections, trip / o.tol.round_trip, std::abs(slope - 4) / o.tol.rk4_slope}), 1.0,
          "connections " + fmt(conn) + ", round trip " + fmt(trip) + ", RK4 slope " + fmt(slope), false};
  return {c};
}

// ---- suites --------------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n{"dirac", "pauli",   "neutrino", "curvature", "trajectory",
                                          "bracket", "scaling", "free",     "plumbing"};
  return n;
}

inline std::vector<check> run_suite(const std::string& name, const options& o) {
  if (name == "dirac") return dirac_oracles(o);
  if (name == "pauli") return pauli_limit(o);
  if (name == "neutrino") return neutrino_oracle(o);
  if (name == "curvature") return neutrino_curvature(o);
  if (name == "trajectory") return trajectory_physics(o);
  if (name == "bracket") return symbolic(o);
  if (name == "scaling") return residual_scaling(o);
  if (name == "free") return free_field(o);
  if (name == "plumbing") return plumbing(o);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

inline std::vector<check> run_all(const options& o) {
  std::vector<check> out;
  for (const auto& n : suite_names()) {
    auto c = run_suite(n, o);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

}  // namespace bd::verify
