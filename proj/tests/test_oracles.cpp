#include "berrydiag/oracles.hpp"
#include "berrydiag/verify.hpp"

#include <gtest/gtest.h>

using namespace bd;

namespace {

const scalar_field V = scalar_field::gaussian(0.7, 1.3, vec3(0.2, -0.1, 0.3));

bool hermitian(const cmat& m) { return max_abs(m - m.adjoint()) < 1e-14; }

}  // namespace

TEST(Blount, FreeFieldIsBetaE) {
  phase_point x{vec3(0.1, 0.2, 0.3), vec3(0.3, 0.4, 0)};
  cmat e = oracle::blount_energy(x, 1, 1, scalar_field::constant(0), 0.1);
  EXPECT_LT(max_abs(e - std::sqrt(1.25) * dirac_matrices::get().beta), 1e-15);
}

TEST(Blount, AtRest) {
  // P = 0: beta (m + hbar^2 |grad V|^2 / 8m^3) + eV + hbar^2 e lap V / 8m^2
  phase_point x{vec3(0.1, 0.2, 0.3), vec3::Zero()};
  const double m = 1.5, hb = 0.1;
  cmat e = oracle::blount_energy(x, m, 1, V, hb);
  cmat want = (m + hb * hb * V.gradient(x.R).squaredNorm() / (8 * m * m * m)) * dirac_matrices::get().beta +
              (V.value(x.R) + hb * hb * V.laplacian(x.R) / (8 * m * m)) * cmat::Identity(4, 4);
  EXPECT_LT(max_abs(e - want), 1e-15);
}

TEST(Blount, Hermitian) {
  phase_point x{vec3(0.1, 0.2, 0.3), vec3(0.5, -0.2, 0.7)};
  EXPECT_TRUE(hermitian(oracle::blount_energy(x, 1, 1, V, 0.1)));
  EXPECT_TRUE(hermitian(oracle::neutrino_energy(x, verify::test_index_gaussian(), 0.1)));
  EXPECT_TRUE(hermitian(oracle::pauli_energy(x, 1, 1, V, 0.1)));
}

TEST(Pauli, FreeDispersion) {
  const double q = 0.3;
  phase_point x{vec3::Zero(), vec3(0, 0, q)};
  cmat e = oracle::pauli_energy(x, 1, 1, scalar_field::constant(0), 0.1);
  EXPECT_NEAR(e(0, 0).real(), q * q / 2 - q * q * q * q / 8, 1e-15);
}

TEST(Pauli, NoSpinOrbitWhenGradientParallelToP) {
  scalar_field lin = scalar_field::linear_field(0, vec3(0, 0, 0.5));
  phase_point x{vec3::Zero(), vec3(0, 0, 0.3)};
  cmat e = oracle::pauli_energy(x, 1, 1, lin, 0.1);
  EXPECT_LT(std::abs(e(0, 1)), 1e-16);
  EXPECT_NEAR(e(0, 0).real(), e(1, 1).real(), 1e-16);
}

// positive block of the Blount form reduces to the Pauli form: odd-in-field coefficients at small |P|
TEST(Pauli, MatchesBlountCoefficients) {
  const vec3 R(0.4, -0.3, 0.5), dir = vec3(0.3, 0.8, -0.5).normalized();
  const auto s = pauli_matrices();
  std::vector<double> qs, dar_b, dar_p, so_b, so_p;
  const double hb = 0.1;
  for (int k = 0; k < 10; ++k) {
    const double q = 1e-3 * std::pow(10.0, k / 9.0);
    phase_point x{R, q * dir};
    const vec3 axis = V.gradient(R).cross(x.P);
    const cmat sa = oracle::sigma_dot(s, axis.normalized());
    auto odd = [&](auto energy) {
      scalar_field p = V, m = V;
      m.amp = -V.amp;
      return cmat((energy(x, p) - energy(x, m)).topLeftCorner(2, 2) / (2.0 * V.amp));
    };
    cmat b = odd([&](const phase_point& y, const scalar_field& f) { return oracle::blount_energy(y, 1, 1, f, hb); });
    cmat p = odd([&](const phase_point& y, const scalar_field& f) { return oracle::pauli_energy(y, 1, 1, f, hb); });
    const double vl = V.value(R) / V.amp;
    qs.push_back(q);
    // strip the eV part, keep the hbar^2 scalar and the spin-orbit projection
    dar_b.push_back((b.trace().real() / 2 - vl) / (hb * hb * V.laplacian(R) / V.amp));
    dar_p.push_back((p.trace().real() / 2 - vl) / (hb * hb * V.laplacian(R) / V.amp));
    so_b.push_back((sa * b).trace().real() / 2 / (hb * axis.norm() / V.amp));
    so_p.push_back((sa * p).trace().real() / 2 / (hb * axis.norm() / V.amp));
  }
  const double db = verify::intercept_q2(qs, dar_b), dp = verify::intercept_q2(qs, dar_p);
  const double sb = verify::intercept_q2(qs, so_b), sp = verify::intercept_q2(qs, so_p);
  EXPECT_NEAR(db / dp, 1.0, 1e-4);
  EXPECT_NEAR(sb / sp, 1.0, 1e-4);
}

TEST(Neutrino, FlatIsBetaP) {
  phase_point x{vec3(0.1, 0.2, 0.3), vec3(0.3, 0.4, 0)};
  cmat e = oracle::neutrino_energy(x, scalar_field::constant(1), 0.1);
  EXPECT_LT(max_abs(e - 0.5 * dirac_matrices::get().beta), 1e-15);
}

TEST(Neutrino, TransverseGradient) {
  // P perpendicular to grad F: the ordering term vanishes
  scalar_field n = scalar_field::linear_field(1.0, vec3(0.1, 0, 0));
  phase_point x{vec3::Zero(), vec3(0, 0, 2)};
  cmat e = oracle::neutrino_energy(x, n, 0.1);
  inverse_field F{&n};
  // hbar Ar.grad F is traceless in spin; Ar_x^2 = 1/4P^2 leaves hbar^2 F_xx / 8|P|
  const double want = 2 * F.value(x.R) + 0.01 * F.hessian(x.R)(0, 0) / 16;
  EXPECT_NEAR(e.topLeftCorner(2, 2).trace().real() / 2, want, 1e-15);
}

TEST(Velocity, FlatIsC) {
  phase_point x{vec3::Zero(), vec3(0.3, 0.4, 0)};
  EXPECT_DOUBLE_EQ(oracle::neutrino_velocity_modulus(x, 1, scalar_field::constant(1), 0.1), 1.0);
}

TEST(Velocity, GradientAlongPGivesCOverN) {
  scalar_field n = scalar_field::linear_field(1.5, vec3(0.1, 0, 0));
  phase_point x{vec3::Zero(), vec3(2, 0, 0)};
  EXPECT_NEAR(oracle::neutrino_velocity_modulus(x, 1, n, 0.1), 1 / 1.5, 1e-15);
}
