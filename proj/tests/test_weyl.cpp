#include "berrydiag/weyl.hpp"

#include <gtest/gtest.h>

using namespace bd::weyl;

namespace {

const qcomplex I(0, 1);

expr R1() { return expr::R(0); }
expr P1() { return expr::P(0); }
expr h() { return expr::hbar(); }

factorization single(std::initializer_list<factor> fs, std::size_t n = 1) {
  return factorization{n, {word(fs)}};
}

expr from_qmat(const qmat& m) { return expr::constant(m); }

}  // namespace

TEST(WeylMultiply, PRRewritesToRPMinusIHbar) {
  EXPECT_EQ(P1() * R1(), R1() * P1() - I * h());
}

TEST(WeylMultiply, NormalOrderedProductUnchanged) {
  expr rp = R1() * P1();
  EXPECT_EQ(rp.terms().size(), 1u);
  EXPECT_EQ(rp.terms().begin()->first.hbar, 0);
}

TEST(WeylMultiply, PSquaredR) {
  // applying P R = R P - i hbar twice by hand
  expr lhs = P1() * P1() * R1();
  expr rhs = R1() * P1() * P1() - qcomplex(2) * I * (h() * P1());
  EXPECT_EQ(lhs, rhs);
}

TEST(WeylMultiply, DistinctCoordinatesCommute) {
  EXPECT_EQ(expr::P(1) * expr::R(0), expr::R(0) * expr::P(1));
}

TEST(WeylMultiply, DimensionMismatchThrows) {
  EXPECT_THROW(expr::R(0, 2) * expr::R(0, 1), std::invalid_argument);
}

TEST(WeylCommutator, CanonicalPair) { EXPECT_EQ(commutator(R1(), P1()), I * h()); }

TEST(WeylCommutator, RWithRSquaredP) {
  // R R^2 P - R^2 P R = R^3 P - R^2 (R P - i hbar)
  expr lhs = commutator(R1(), R1() * R1() * P1());
  EXPECT_EQ(lhs, I * (h() * R1() * R1()));
}

TEST(WeylCommutator, PauliAlgebra) {
  expr sx = from_qmat(pauli(1)), sy = from_qmat(pauli(2)), sz = from_qmat(pauli(3));
  EXPECT_EQ(commutator(sx, sy), qcomplex(0, 2) * sz);
}

TEST(WeylCommutator, Antisymmetric) {
  rng r(7);
  for (int c = 0; c < 20; ++c) {
    expr a = random_pure(r, var::R, 2, 3) * random_pure(r, var::P, 2, 2);
    expr b = random_pure(r, var::P, 2, 3) * random_pure(r, var::R, 2, 2);
    EXPECT_TRUE((commutator(a, b) + commutator(b, a)).is_zero());
  }
}

TEST(WeylMultiply, AssociativeOnRandomTriples) {
  rng r(11);
  for (int c = 0; c < 30; ++c) {
    std::size_t n = c % 2 ? 2 : 1;
    auto mk = [&] { return random_pure(r, var::P, n, 2) * random_pure(r, var::R, n, 2); };
    expr a = mk(), b = mk(), d = mk();
    EXPECT_EQ((a * b) * d, a * (b * d));
  }
}

TEST(WeylDerivative, Basics) {
  expr f = R1() * R1() * P1();
  EXPECT_EQ(derivative(f, var::R, 0), qcomplex(2) * (R1() * P1()));
  EXPECT_EQ(derivative(f, var::P, 0), R1() * R1());
  EXPECT_TRUE(derivative(h() * P1(), var::R, 0).is_zero());
}

TEST(WeylBracket, HalfSymmetrizedScalarIsZero) {
  factorization f{1, {{{var::R, qcomplex(rational(1, 2)) * R1()}, {var::P, P1()}},
                      {{var::P, P1()}, {var::R, qcomplex(rational(1, 2)) * R1()}}}};
  EXPECT_TRUE(bracket(f).is_zero());
}

TEST(WeylBracket, PauliHalfSymmetrized) {
  // (i/4)[sx, sy] = -sz/2
  expr a = from_qmat(pauli(1) * qcomplex(rational(1, 2))) * expr::R(0, 2);
  expr b = from_qmat(pauli(2)) * expr::P(0, 2);
  expr a2 = from_qmat(pauli(1) * qcomplex(rational(1, 2))) * expr::R(0, 2);
  factorization f{2, {{{var::R, a}, {var::P, b}}, {{var::P, b}, {var::R, a2}}}};
  EXPECT_EQ(bracket(f), from_qmat(pauli(3) * qcomplex(rational(-1, 2))));
}

TEST(WeylBracket, PureSumHasNoBracket) {
  factorization f{1, {{{var::R, R1() * R1()}}, {{var::P, P1() * expr::P(2)}}}};
  EXPECT_TRUE(bracket(f).is_zero());
}

TEST(WeylBracket, MisdeclaredFactorThrows) {
  EXPECT_THROW(bracket(single({{var::R, P1()}})), invalid_factor);
  EXPECT_THROW(bracket(single({{var::P, R1()}})), invalid_factor);
}

TEST(WeylProductRule, RAndP) {
  EXPECT_TRUE(bracket_product_check(single({{var::R, R1()}}), single({{var::P, P1()}})).is_zero());
}

TEST(WeylProductRule, RSquaredPSquared) {
  EXPECT_TRUE(bracket_product_check(single({{var::R, R1() * R1()}}), single({{var::P, P1() * P1()}}))
                  .is_zero());
}

TEST(WeylProductRule, RandomDims1And2) {
  auto res = product_rule_suite(3, 60, 6, {1, 2});
  EXPECT_TRUE(res.pass()) << (res.failures.empty() ? "" : res.failures.front());
}

TEST(WeylInvariance, PRVersusRPMinusIHbar) {
  factorization f1 = single({{var::P, P1()}, {var::R, R1()}});
  factorization f2{1, {{{var::R, R1()}, {var::P, P1()}}, {{var::R, -I * h()}}}};
  EXPECT_TRUE(invariant_derivative_check(f1, f2).is_zero());
}

TEST(WeylInvariance, SymmetrizedVersusNormalOrderDegree4) {
  rng r(5);
  monomial m;
  m.r = {2, 0, 0};
  m.p = {1, 1, 0};
  factorization sym = symmetrized(m, 0, qmat::identity(1));
  expr e = expand(sym);
  EXPECT_TRUE(invariant_derivative_check(sym, normal_form(e)).is_zero());
}

TEST(WeylInvariance, ConstantMatrixOnly) {
  factorization f = single({{var::R, from_qmat(pauli(3))}}, 2);
  EXPECT_TRUE(invariant_derivative_check(f, f).is_zero());
  EXPECT_TRUE(bracket(f).is_zero());
}

TEST(WeylInvariance, UnequalOperatorsRejected) {
  EXPECT_THROW(invariant_derivative_check(single({{var::R, R1()}}), single({{var::P, P1()}})),
               not_equal_operators);
}

TEST(WeylInvariance, RandomResymmetrizations) {
  auto res = invariance_suite(9, 40, 6, {1, 2});
  EXPECT_TRUE(res.pass()) << (res.failures.empty() ? "" : res.failures.front());
}

TEST(WeylSymmetrize, FullySymmetrizedBracketVanishes) {
  auto res = symmetric_bracket_suite(13, 40, 5, {1, 2});
  EXPECT_TRUE(res.pass()) << (res.failures.empty() ? "" : res.failures.front());
}

TEST(WeylSymmetrize, DegreeCap) {
  monomial m;
  m.r = {5, 0, 0};
  m.p = {4, 0, 0};
  EXPECT_THROW(symmetrized(m, 0, qmat::identity(1)), degree_cap_exceeded);
}

TEST(WeylSymmetrize, ResymmetrizedEqualsOriginal) {
  rng r(21);
  for (int c = 0; c < 10; ++c) {
    expr e = expand(random_factorization(r, 2, 5));
    EXPECT_EQ(expand(resymmetrize(e, resym_mode::full, r)), e);
    EXPECT_EQ(expand(resymmetrize(e, resym_mode::random_order, r)), e);
  }
}
