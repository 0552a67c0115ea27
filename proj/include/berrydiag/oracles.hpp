#pragma once

#include "berrydiag/linalg.hpp"
#include "berrydiag/models/field.hpp"

#include <string>

namespace bd::oracle {

inline cmat sigma_dot(const std::array<cmat, 3>& s, const vec3& v) {
  return v[0] * s[0] + v[1] * s[1] + v[2] * s[2];
}

// second-order Dirac energy in canonical variables (Blount form)
inline cmat blount_energy(const phase_point& x, double m, double e, const scalar_field& V, double hbar) {
  const auto& d = dirac_matrices::get();
  const vec3& P = x.P;
  const double E = std::sqrt(P.squaredNorm() + m * m);
  const vec3 gV = V.gradient(x.R);
  const Eigen::Matrix3d HV = V.hessian(x.R);
  const double pg = P.dot(gV);
  const cmat one = cmat::Identity(4, 4);
  cmat out = E * d.beta + e * V.value(x.R) * one;
  out += hbar * e * sigma_dot(d.Sigma, gV.cross(P)) / (2 * E * (E + m));
  out += hbar * hbar * e * d.beta * (E * E * gV.squaredNorm() - pg * pg) / (8 * std::pow(E, 5));
  const double s = HV.trace() / (4 * E * (E + m)) -
                   (2 * E * E + 2 * E * m + m * m) * P.dot(HV * P) / (8 * std::pow(E, 4) * (E + m) * (E + m));
  out += hbar * hbar * e * s * one;
  return out;
}

// covariant relativistic form evaluated at x = (r, p):
// beta sqrt(p^2+m^2) + eV(r) + (hbar^2 e/2) div_r[(E^2 grad V - (p.grad V) p) / 4E^4]
inline cmat relativistic_energy(const phase_point& x, double m, double e, const scalar_field& V, double hbar) {
  const auto& d = dirac_matrices::get();
  const vec3& P = x.P;
  const double E = std::sqrt(P.squaredNorm() + m * m);
  const Eigen::Matrix3d HV = V.hessian(x.R);
  const double div = (E * E * HV.trace() - P.dot(HV * P)) / (4 * std::pow(E, 4));
  return E * d.beta + (e * V.value(x.R) + 0.5 * hbar * hbar * e * div) * cmat::Identity(4, 4);
}

// non-relativistic positive block:
// P^2/2m - P^4/8m^3 + eV + (e hbar/4m^2) sigma.(grad V x P) + (e hbar^2/8m^2) lap V
inline cmat pauli_energy(const phase_point& x, double m, double e, const scalar_field& V, double hbar) {
  const auto s = pauli_matrices();
  const double p2 = x.P.squaredNorm();
  const vec3 gV = V.gradient(x.R);
  cmat out = (p2 / (2 * m) - p2 * p2 / (8 * m * m * m) + e * V.value(x.R) +
              e * hbar * hbar * V.laplacian(x.R) / (8 * m * m)) *
             cmat::Identity(2, 2);
  out += e * hbar / (4 * m * m) * sigma_dot(s, gV.cross(x.P));
  return out;
}

// energy of the massless field in a static index n, F = 1/n, re-expanded in canonical variables:
// r = R + hbar P x Sigma / 2P^2, so beta|P| F(r) -> beta|P| (F + hbar Ar.grad F + hbar^2/2 sym(Ar_i Ar_j) d_ij F),
// plus the ordering term -(hbar^2/4|P|) P.grad F
inline cmat neutrino_energy(const phase_point& x, const scalar_field& n, double hbar) {
  const auto& d = dirac_matrices::get();
  const inverse_field F{&n};
  const vec3& P = x.P;
  const double p = P.norm();
  const vec3 gF = F.gradient(x.R);
  const Eigen::Matrix3d HF = F.hessian(x.R);
  std::array<cmat, 3> Ar;
  for (int i = 0; i < 3; ++i) {
    Ar[i] = cmat::Zero(4, 4);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const int c = (i == j || j == k || i == k) ? 0 : ((j - i + 3) % 3 == 1 ? 1 : -1);
        if (c) Ar[i] += double(c) * P[j] * d.Sigma[k];
      }
    Ar[i] /= 2 * p * p;
  }
  cmat body = F.value(x.R) * cmat::Identity(4, 4);
  for (int i = 0; i < 3; ++i) body += hbar * gF[i] * Ar[i];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) body += 0.25 * hbar * hbar * HF(i, j) * (Ar[i] * Ar[j] + Ar[j] * Ar[i]);
  return p * d.beta * body - hbar * hbar * P.dot(gF) / (4 * p) * cmat::Identity(4, 4);
}

// |v| = (c/n) sqrt(1 + hbar^2 lambda^2 / P^2 ((grad ln n)^2 - (P.grad ln n)^2 / P^2)), c = 1
inline double neutrino_velocity_modulus(const phase_point& x, double lambda, const scalar_field& n, double hbar) {
  const double nv = n.value(x.R);
  const vec3 gl = n.gradient(x.R) / nv;
  const double p2 = x.P.squaredNorm();
  const double pg = x.P.dot(gl);
  return std::sqrt(1 + hbar * hbar * lambda * lambda / p2 * (gl.squaredNorm() - pg * pg / p2)) / nv;
}

// Berry curvature vector of the positive-energy band, Theta_k = -lambda P_k / P^3
inline vec3 neutrino_curvature(const vec3& P, double lambda) { return -lambda * P / std::pow(P.norm(), 3); }

}  // namespace bd::oracle
