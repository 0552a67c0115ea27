#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bd {

using cd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using vec3 = Eigen::Vector3d;
using vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr cd I{0.0, 1.0};

struct phase_point {
  vec3 R = vec3::Zero();
  vec3 P = vec3::Zero();

  vec6 x() const {
    vec6 v;
    v << R, P;
    return v;
  }
  static phase_point from(const vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

inline cmat herm(const cmat& m) { return m + m.adjoint(); }
inline cmat comm(const cmat& a, const cmat& b) { return a * b - b * a; }
inline double max_abs(const cmat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// max |a_ij - b_ij| / max |b_ij|
inline double rel_err(const cmat& a, const cmat& b) {
  double s = max_abs(b);
  return max_abs(a - b) / (s > 0 ? s : 1.0);
}

// six-component derivative bundle, index 0..2 for R, 3..5 for P
using grad6 = std::array<cmat, 6>;

struct fd_options {
  double rel_step = 1e-3;  // h = rel_step * (1 + |x_k|)
  bool fourth_order = true;
};

// central differences of a matrix-valued phase-space function along coordinate k
inline cmat fd_partial(const std::function<cmat(const vec6&)>& f, const vec6& x, int k,
                       const fd_options& o = {}) {
  const double h = o.rel_step * (1.0 + std::abs(x[k]));
  vec6 d = vec6::Zero();
  d[k] = h;
  if (!o.fourth_order) return (f(x + d) - f(x - d)) / (2 * h);
  return (-f(x + 2 * d) + 8.0 * f(x + d) - 8.0 * f(x - d) + f(x - 2 * d)) / (12 * h);
}

inline grad6 fd_gradient(const std::function<cmat(const vec6&)>& f, const vec6& x, const fd_options& o = {}) {
  grad6 g;
  for (int k = 0; k < 6; ++k) g[k] = fd_partial(f, x, k, o);
  return g;
}

// 4th vs 2nd order discrepancy, the reported Richardson consistency figure
inline double fd_discrepancy(const std::function<cmat(const vec6&)>& f, const vec6& x, int k,
                             double rel_step = 1e-3) {
  cmat a = fd_partial(f, x, k, {rel_step, true});
  cmat b = fd_partial(f, x, k, {rel_step, false});
  return rel_err(b, a);
}

inline std::array<cmat, 3> pauli_matrices() {
  cmat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;
  return {sx, sy, sz};
}

// Dirac representation: beta = diag(1,1,-1,-1), alpha_i off-diagonal sigma_i, Sigma = 1 (x) sigma
struct dirac_matrices {
  cmat beta;
  std::array<cmat, 3> alpha;
  std::array<cmat, 3> Sigma;

  static const dirac_matrices& get() {
    static const dirac_matrices d = [] {
      dirac_matrices m;
      auto s = pauli_matrices();
      m.beta = cmat::Identity(4, 4);
      m.beta.bottomRightCorner(2, 2) *= -1.0;
      for (int i = 0; i < 3; ++i) {
        m.alpha[i] = cmat::Zero(4, 4);
        m.alpha[i].topRightCorner(2, 2) = s[i];
        m.alpha[i].bottomLeftCorner(2, 2) = s[i];
        m.Sigma[i] = cmat::Zero(4, 4);
        m.Sigma[i].topLeftCorner(2, 2) = s[i];
        m.Sigma[i].bottomRightCorner(2, 2) = s[i];
      }
      return m;
    }();
    return d;
  }
};

inline vec3 unit(int k) {
  vec3 e = vec3::Zero();
  e[k] = 1.0;
  return e;
}

}  // namespace bd
