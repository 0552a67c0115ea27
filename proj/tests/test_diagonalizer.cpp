#include "berrydiag/covariant.hpp"
#include "berrydiag/diagonalizer.hpp"
#include "berrydiag/oracles.hpp"
#include "berrydiag/verify.hpp"

#include <gtest/gtest.h>

using namespace bd;

namespace {

const scalar_field V = verify::test_potential();

double hermiticity(const cmat& m) { return max_abs(m - m.adjoint()) / std::max(max_abs(m), 1e-300); }

}  // namespace

TEST(Frame, DegenerateGroupsAreDetected) {
  // declare {1,1} for a Dirac-like H with doubly degenerate levels
  two_level_model tl = verify::test_two_level();
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  band_frame b = diagonalize_classical(tl, x);
  EXPECT_EQ(b.group, (std::vector<int>{0, 1}));
  EXPECT_GT(b.eps[0], b.eps[1]);
}

TEST(Frame, NearDegenerateGapIsPointError) {
  // h vanishes at R_x = -0.8/0.3 with the other components zero
  auto mono = [](std::array<int, 3> r) {
    weyl::monomial m;
    m.r = r;
    m.p = {0, 0, 0};
    return m;
  };
  std::array<std::vector<std::pair<double, weyl::monomial>>, 3> h;
  h[0] = {{0.8, mono({0, 0, 0})}, {0.3, mono({1, 0, 0})}};
  two_level_model tl(h);
  phase_point x{vec3(-0.8 / 0.3, 0, 0), vec3(1, 0, 0)};
  EXPECT_THROW(diagonalize_classical(tl, x), point_error);
}

TEST(Frame, NumericalGaugeIsSmooth) {
  two_level_model tl = verify::test_two_level();
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(tl, x);
  vec6 d = vec6::Constant(1e-4);
  EXPECT_LT(max_abs(ff(x.x() + d).U0 - ff(x.x()).U0), 1e-3);
}

TEST(InvCommutator, RightInverse) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  band_frame b = diagonalize_classical(m, x);
  cmat M = cmat::Zero(4, 4);
  M.topRightCorner(2, 2) << cd(0.3, 0.1), cd(-0.2, 0.5), cd(0.7, 0), cd(0.1, -0.4);
  M.bottomLeftCorner(2, 2) = M.topRightCorner(2, 2).adjoint();
  cmat W = inv_commutator(M, b.eps, b.group, 1e-12);
  EXPECT_LT(max_abs(comm(W, b.eps0) - M), 1e-12);
  EXPECT_TRUE(project(W, b.group, true).isZero(0));
}

TEST(InvCommutator, SmallGapThrows) {
  Eigen::VectorXd eps(2);
  eps << 1.0, 1.0 + 1e-12;
  cmat M = cmat::Zero(2, 2);
  M(0, 1) = 1;
  EXPECT_THROW(inv_commutator(M, eps, {0, 1}, 1e-9), point_error);
}

TEST(Connections, FiniteDifferencesMatchClosedForm) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  conn6 num = numerical_connections(ff, x), ana = *m.analytic_connections(x);
  for (int k = 0; k < 6; ++k) EXPECT_LT(max_abs(num[k] - ana[k]), 1e-6) << k;
}

TEST(Connections, RichardsonDiscrepancyReported) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  auto f = [&](const vec6& y) { return ff(y).U0; };
  const double d = fd_discrepancy(f, x.x(), 4);
  EXPECT_GT(d, 0);
  EXPECT_LT(d, 1e-5);
}

TEST(FirstOrder, DiracSpinOrbit) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  energy_report r = energy_order1(ff, x, 0.1);
  const double E = m.energy(x.P);
  const auto& d = dirac_matrices::get();
  cmat want = 0.1 * oracle::sigma_dot(d.Sigma, V.gradient(x.R).cross(x.P)) / (2 * E * (E + 1));
  EXPECT_LT(max_abs(project(r.first - want, {0, 0, 1, 1}, true).topLeftCorner(2, 2)), 1e-10);
}

TEST(FirstOrder, FreeDiracVanishes) {
  dirac_model m(1, 1, scalar_field::constant(0));
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  EXPECT_LT(max_abs(energy_order1(ff, x, 0.1).first), 1e-13);
}

TEST(SecondOrder, DiracMatchesBlountAtRandomPoints) {
  dirac_model m(1, 1, V);
  verify::sampler s(7);
  for (int i = 0; i < 20; ++i) {
    phase_point x{s.cube(2), s.momentum(0.1, 10)};
    frame_field ff(m, x);
    energy_report r = energy_order2_canonical(ff, x, 0.1);
    EXPECT_LT(rel_err(r.total, oracle::blount_energy(x, 1, 1, V, 0.1)), 1e-8);
  }
}

TEST(SecondOrder, NeutrinoMatchesClosedForm) {
  scalar_field n = verify::test_index_gaussian();
  neutrino_model m(n);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  EXPECT_LT(rel_err(energy_order2_canonical(ff, x, 0.1).total, oracle::neutrino_energy(x, n, 0.1)), 1e-8);
}

TEST(SecondOrder, CovariantMatchesRelativisticForm) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(-0.4, 0.6, 0.2), vec3(1.5, 0.3, -0.9)};
  frame_field ff(m, x);
  EXPECT_LT(rel_err(energy_order2_covariant(ff, x, 0.1).total, oracle::relativistic_energy(x, 1, 1, V, 0.1)),
            1e-8);
}

TEST(SecondOrder, HermitianAndBlockDiagonal) {
  dirac_model dm(1, 1, V);
  neutrino_model nm(verify::test_index_gaussian());
  two_level_model tl = verify::test_two_level();
  verify::sampler s(11);
  for (const model* m : {static_cast<const model*>(&dm), static_cast<const model*>(&nm),
                         static_cast<const model*>(&tl)})
    for (int i = 0; i < 10; ++i) {
      phase_point x{s.cube(1), s.momentum(0.3, 3)};
      frame_field ff(*m, x);
      second_order_data so = second_order(ff, x.x());
      for (const energy_report& r :
           {energy_order2_canonical(ff, x, 0.1, &so), energy_order2_covariant(ff, x, 0.1, &so)}) {
        EXPECT_LT(hermiticity(r.total), 1e-12) << m->name();
        EXPECT_LE(max_abs(project(r.total, ff.group(), false)), 1e-10 * max_abs(r.total)) << m->name();
      }
    }
}

TEST(SecondOrder, MixedTwoLevelIsPartial) {
  two_level_model tl = verify::test_two_level();
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(tl, x);
  energy_report r = energy_order2_canonical(ff, x, 0.1);
  EXPECT_TRUE(r.partial);
  EXPECT_NE(r.note.find("unavailable"), std::string::npos);
}

TEST(SecondOrder, CanonicalCovariantConsistency) {
  dirac_model dm(1, 1, V);
  neutrino_model nm(verify::test_index_gaussian());
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  for (const model* m : {static_cast<const model*>(&dm), static_cast<const model*>(&nm)}) {
    frame_field ff(*m, x);
    for (double h : {1e-1, 1e-2, 1e-3}) {
      const double d = max_abs(reexpanded_covariant(ff, x, h) - energy_order2_canonical(ff, x, h).total);
      EXPECT_LT(d / (h * h * h), 1e-3) << m->name() << " hbar " << h;
    }
  }
}

TEST(Transformation, GaugeConditionAndB) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  local_data d = local(ff, x.x());
  cmat B = b_matrix(d, ff.group(), ff.gap_abs(x));
  u_first_order u = u_order1(d, B);
  EXPECT_LT(gauge_residual(u, ff.group()), 1e-12);
  // A^P = 0 for Dirac, so hr vanishes and the anti-Hermitian part is B
  EXPECT_LT(max_abs(u.hr), 1e-12);
  EXPECT_LT(max_abs(0.5 * (u.generator - u.generator.adjoint()) - B), 1e-12);
}

TEST(Transformation, FreeFieldIsU0) {
  dirac_model m(1, 1, scalar_field::constant(0));
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  local_data d = local(ff, x.x());
  u_first_order u = u_order1(d, b_matrix(d, ff.group(), ff.gap_abs(x)));
  EXPECT_LT(max_abs(u.U(0.1) - u.U0), 1e-13);
}

TEST(Transformation, UnitarityDefectScalesAsHbarSquared) {
  two_level_model tl = verify::test_two_level();
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(tl, x);
  std::vector<double> hs{1e-1, 1e-2, 1e-3}, d;
  for (double h : hs) d.push_back(unitarity_defect(ff, x, h));
  EXPECT_NEAR(verify::loglog_slope(hs, d), 2.0, 0.1);
}

TEST(HbarEquation, ResidualScalesAsHbarSquared) {
  dirac_model m(1, 1, V);
  phase_point x{vec3(0.3, 0.1, -0.2), vec3(0.5, -0.4, 0.8)};
  frame_field ff(m, x);
  std::vector<double> hs{1e-1, 1e-2, 1e-3};
  EXPECT_NEAR(verify::loglog_slope(hs, hbar_ode_residual(ff, x, hs)), 2.0, 0.1);
}

TEST(Supported, BuiltinsAreBracketFree) {
  dirac_model m(1, 1, V);
  EXPECT_NO_THROW(check_supported(m));
}

TEST(Order, DispatchRejectsThree) {
  dirac_model m(1, 1, V);
  phase_point x{vec3::Zero(), vec3(1, 0, 0)};
  frame_field ff(m, x);
  EXPECT_THROW(diagonalize(ff, x, 3, 0.1), std::invalid_argument);
}
