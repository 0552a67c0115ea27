#pragma once

#include "berrydiag/linalg.hpp"
#include "berrydiag/models/field.hpp"
#include "berrydiag/weyl/expr.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bd {

// errors tied to a single phase point (CLI exit code 2)
struct point_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct frame_data {
  cmat U0;    // rows: band states, U0 H U0^+ block diagonal
  cmat eps0;  // U0 H U0^+
};

// connections 0..2 along R (i U d_P U^+), 3..5 along P (-i U d_R U^+)
using conn6 = std::array<cmat, 6>;

struct bracket_term {
  bool available = false;
  cmat value;  // the full -(hbar/2)<eps0> contribution at the given hbar
  std::string note;
};

class model {
 public:
  virtual ~model() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual std::vector<int> groups() const = 0;
  virtual bool massless() const { return false; }

  virtual cmat h(const phase_point& x) const = 0;

  virtual bool has_analytic_frame() const { return false; }
  virtual std::optional<frame_data> analytic_frame(const phase_point&) const { return std::nullopt; }
  virtual bool has_analytic_connections() const { return false; }
  virtual std::optional<conn6> analytic_connections(const phase_point&) const { return std::nullopt; }

  virtual bracket_term bracket_eps0(const phase_point& x, double hbar) const = 0;

  // (d_hbar + <.>) H = 0 holds for every built-in; anything else is rejected upstream
  virtual bool hamiltonian_bracket_free() const { return true; }

  void check_point(const phase_point& x) const {
    if (!x.R.allFinite() || !x.P.allFinite()) throw point_error("non-finite phase point");
    if (massless() && x.P.norm() < 1e-12) throw point_error("|P| = 0 for a massless model");
  }
};

class dirac_model final : public model {
 public:
  dirac_model(double m, double e, scalar_field V) : m_(m), e_(e), V_(std::move(V)) {}

  std::string name() const override { return "dirac_electric"; }
  int dim() const override { return 4; }
  std::vector<int> groups() const override { return {2, 2}; }
  double mass() const { return m_; }
  double charge() const { return e_; }
  const scalar_field& potential() const { return V_; }

  cmat h(const phase_point& x) const override {
    const auto& d = dirac_matrices::get();
    cmat H = m_ * d.beta + e_ * V_.value(x.R) * cmat::Identity(4, 4);
    for (int i = 0; i < 3; ++i) H += x.P[i] * d.alpha[i];
    return H;
  }

  bool has_analytic_frame() const override { return true; }
  std::optional<frame_data> analytic_frame(const phase_point& x) const override {
    const auto& d = dirac_matrices::get();
    const double E = energy(x.P);
    cmat aP = cmat::Zero(4, 4);
    for (int i = 0; i < 3; ++i) aP += x.P[i] * d.alpha[i];
    cmat U = ((E + m_) * cmat::Identity(4, 4) + d.beta * aP) / std::sqrt(2 * E * (E + m_));
    cmat eps = E * d.beta + e_ * V_.value(x.R) * cmat::Identity(4, 4);
    return frame_data{U, eps};
  }

  bool has_analytic_connections() const override { return true; }
  std::optional<conn6> analytic_connections(const phase_point& x) const override {
    return free_connections(x.P, m_);
  }

  bracket_term bracket_eps0(const phase_point&, double) const override {
    return {true, cmat::Zero(4, 4), "eps0 = beta E(P) + eV(R) has no mixed factor"};
  }

  double energy(const vec3& P) const { return std::sqrt(P.squaredNorm() + m_ * m_); }

  // i(beta a.P P - E(E+m) beta a - i E P x Sigma) / (2E^2(E+m)) along R, zero along P
  static conn6 free_connections(const vec3& P, double m) {
    const auto& d = dirac_matrices::get();
    const double E = std::sqrt(P.squaredNorm() + m * m);
    cmat aP = cmat::Zero(4, 4);
    for (int i = 0; i < 3; ++i) aP += P[i] * d.alpha[i];
    conn6 A;
    for (int i = 0; i < 3; ++i) {
      cmat cross = cmat::Zero(4, 4);
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) cross += levi(i, j, k) * P[j] * d.Sigma[k];
      A[i] = I * (d.beta * aP * P[i] - E * (E + m) * d.beta * d.alpha[i] - I * E * cross) /
             (2 * E * E * (E + m));
      A[3 + i] = cmat::Zero(4, 4);
    }
    return A;
  }

  static double levi(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
  }

 private:
  double m_, e_;
  scalar_field V_;
};

class neutrino_model final : public model {
 public:
  explicit neutrino_model(scalar_field n) : n_(std::move(n)) {}

  std::string name() const override { return "neutrino_metric"; }
  int dim() const override { return 4; }
  std::vector<int> groups() const override { return {2, 2}; }
  bool massless() const override { return true; }
  const scalar_field& index() const { return n_; }
  inverse_field F() const { return {&n_}; }

  cmat h(const phase_point& x) const override {
    const auto& d = dirac_matrices::get();
    cmat H = cmat::Zero(4, 4);
    const double f = F().value(x.R);
    for (int i = 0; i < 3; ++i) H += f * x.P[i] * d.alpha[i];
    return H;
  }

  bool has_analytic_frame() const override { return true; }
  std::optional<frame_data> analytic_frame(const phase_point& x) const override {
    check_point(x);
    const auto& d = dirac_matrices::get();
    const double p = x.P.norm();
    cmat aP = cmat::Zero(4, 4);
    for (int i = 0; i < 3; ++i) aP += x.P[i] * d.alpha[i];
    cmat U = (p * cmat::Identity(4, 4) + d.beta * aP) / std::sqrt(2 * p * p);
    cmat eps = F().value(x.R) * p * d.beta;
    return frame_data{U, eps};
  }

  bool has_analytic_connections() const override { return true; }
  std::optional<conn6> analytic_connections(const phase_point& x) const override {
    check_point(x);
    return dirac_model::free_connections(x.P, 0.0);
  }

  // -(hbar^2 / 4|P|) P.grad F, the closed form carried by the model
  bracket_term bracket_eps0(const phase_point& x, double hbar) const override {
    const double v = -hbar * hbar * x.P.dot(F().gradient(x.R)) / (4 * x.P.norm());
    return {true, v * cmat::Identity(4, 4), "closed form -(hbar^2/4|P|) P.grad F"};
  }

 private:
  scalar_field n_;
};

// h(R,P).sigma with polynomial components
class two_level_model final : public model {
 public:
  explicit two_level_model(std::array<std::vector<std::pair<double, weyl::monomial>>, 3> h)
      : hc_(std::move(h)) {}

  std::string name() const override { return "two_level"; }
  int dim() const override { return 2; }
  std::vector<int> groups() const override { return {1, 1}; }

  vec3 hvec(const phase_point& x) const {
    vec3 v = vec3::Zero();
    for (int k = 0; k < 3; ++k)
      for (const auto& [c, m] : hc_[k]) {
        double t = c;
        for (int i = 0; i < 3; ++i) t *= std::pow(x.R[i], m.r[i]) * std::pow(x.P[i], m.p[i]);
        v[k] += t;
      }
    return v;
  }

  cmat h(const phase_point& x) const override {
    auto s = pauli_matrices();
    vec3 v = hvec(x);
    return v[0] * s[0] + v[1] * s[1] + v[2] * s[2];
  }

  // |h|^2 as a classical polynomial; when it is free of R or of P, eps0 = +-|h| is a pure factor
  // and its bracket vanishes exactly
  bracket_term bracket_eps0(const phase_point&, double) const override {
    weyl::expr sq(1);
    for (int k = 0; k < 3; ++k) {
      weyl::expr hk(1);
      for (const auto& [c, m] : hc_[k]) hk.add_term(m, 0, weyl::qmat::scalar(1, to_rational(c)));
      sq += classical_product(hk, hk);
    }
    if (sq.pure(weyl::var::R) || sq.pure(weyl::var::P))
      return {true, cmat::Zero(2, 2), "|h| depends on one of R, P only: bracket of a pure factor is 0"};
    return {false, cmat::Zero(2, 2), "bracket term unavailable: |h| mixes R and P"};
  }

  const auto& components() const { return hc_; }

 private:
  static weyl::rational to_rational(double c) {
    // config coefficients are short decimals; scale by 1e9 and keep exact
    long long num = std::llround(c * 1e9);
    return weyl::rational(num, 1000000000LL);
  }
  static weyl::expr classical_product(const weyl::expr& a, const weyl::expr& b) {
    weyl::expr out(1);
    for (const auto& [ka, ca] : a.terms())
      for (const auto& [kb, cb] : b.terms()) {
        weyl::monomial m;
        for (int i = 0; i < 3; ++i) {
          m.r[i] = ka.m.r[i] + kb.m.r[i];
          m.p[i] = ka.m.p[i] + kb.m.p[i];
        }
        out.add_term(m, 0, ca * cb);
      }
    return out;
  }
  std::array<std::vector<std::pair<double, weyl::monomial>>, 3> hc_;
};

}  // namespace bd
