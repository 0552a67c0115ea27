#include "berrydiag/models/config.hpp"

#include <gtest/gtest.h>

using namespace bd;
using nlohmann::json;

namespace {

phase_point pt(vec3 R, vec3 P) { return {R, P}; }

}  // namespace

TEST(Field, GaussianDerivativesMatchDifferences) {
  scalar_field f = scalar_field::gaussian(0.7, 1.3, vec3(0.2, -0.1, 0.3), 0.4);
  vec3 r(0.5, -0.2, 0.1);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    vec3 d = h * unit(i);
    EXPECT_NEAR(f.gradient(r)[i], (f.value(r + d) - f.value(r - d)) / (2 * h), 1e-9);
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(f.hessian(r)(i, j), (f.gradient(r + d)[j] - f.gradient(r - d)[j]) / (2 * h), 1e-8);
  }
}

TEST(Field, CoulombIsRegularAtOrigin) {
  scalar_field f = scalar_field::coulomb(2.0, 0.5, vec3::Zero());
  EXPECT_DOUBLE_EQ(f.value(vec3::Zero()), 4.0);
  EXPECT_TRUE(f.gradient(vec3::Zero()).isZero(0));
}

TEST(Field, PolynomialHessian) {
  scalar_field f;
  f.kind = field_kind::polynomial;
  f.terms = {{1.5, {2, 1, 0}}};  // 1.5 x^2 y
  vec3 r(2, 3, 0);
  EXPECT_DOUBLE_EQ(f.value(r), 18);
  EXPECT_DOUBLE_EQ(f.gradient(r)[0], 18);
  EXPECT_DOUBLE_EQ(f.hessian(r)(0, 1), 6);
  EXPECT_DOUBLE_EQ(f.hessian(r)(0, 0), 9);
}

TEST(Field, InverseFieldChainRule) {
  scalar_field n = scalar_field::linear_field(1.0, vec3(0.1, 0.2, -0.1));
  inverse_field F{&n};
  vec3 r(0.3, 0.1, 0.2);
  const double v = n.value(r);
  EXPECT_NEAR(F.value(r), 1 / v, 1e-15);
  EXPECT_TRUE((F.gradient(r) + n.gradient(r) / (v * v)).isZero(1e-15));
  EXPECT_TRUE((F.hessian(r) - 2.0 * n.gradient(r) * n.gradient(r).transpose() / (v * v * v)).isZero(1e-15));
}

TEST(Dirac, FrameDiagonalizes) {
  dirac_model m(1.0, 1.0, scalar_field::gaussian(0.7, 1.3, vec3::Zero()));
  phase_point x = pt(vec3(0.1, 0.2, 0.3), vec3(0.5, -0.4, 0.8));
  frame_data f = *m.analytic_frame(x);
  EXPECT_LT(max_abs(f.U0 * f.U0.adjoint() - cmat::Identity(4, 4)), 1e-14);
  EXPECT_LT(max_abs(f.U0 * m.h(x) * f.U0.adjoint() - f.eps0), 1e-14);
}

TEST(Dirac, ConnectionsVanishAtRestAlongSpin) {
  conn6 A = dirac_model::free_connections(vec3::Zero(), 1.0);
  for (int k = 3; k < 6; ++k) EXPECT_TRUE(A[k].isZero(0));
  for (int k = 0; k < 3; ++k) EXPECT_LT(max_abs(A[k] - A[k].adjoint()), 1e-15);
}

TEST(Neutrino, RejectsZeroMomentum) {
  neutrino_model m(scalar_field::constant(1));
  EXPECT_THROW(m.check_point(pt(vec3::Zero(), vec3::Zero())), point_error);
}

TEST(Neutrino, BracketClosedForm) {
  neutrino_model m(scalar_field::linear_field(1.0, vec3(0.1, 0, 0)));
  phase_point x = pt(vec3::Zero(), vec3(1, 0, 0));
  bracket_term b = m.bracket_eps0(x, 0.1);
  ASSERT_TRUE(b.available);
  // F = 1/(1 + 0.1x), dF/dx = -0.1 at x = 0
  EXPECT_NEAR(b.value(0, 0).real(), -0.01 * 1 * (-0.1) / 4, 1e-15);
}

TEST(TwoLevel, PureFactorBracketVanishes) {
  json cfg = json::parse(R"({"model":"two_level","h":[[{"coef":1.0,"p":[1,0,0]}],[{"coef":0.5}],[{"coef":0.2,"p":[0,2,0]}]]})");
  auto m = parse_model(cfg);
  bracket_term b = m->bracket_eps0(pt(vec3::Zero(), vec3(1, 1, 1)), 0.1);
  EXPECT_TRUE(b.available);
  EXPECT_TRUE(b.value.isZero(0));
}

TEST(TwoLevel, MixedFactorBracketUnavailable) {
  json cfg = json::parse(R"({"model":"two_level","h":[[{"coef":1.0,"r":[1,0,0]}],[{"coef":0.5,"p":[1,0,0]}],[]]})");
  auto m = parse_model(cfg);
  EXPECT_FALSE(m->bracket_eps0(pt(vec3::Zero(), vec3(1, 1, 1)), 0.1).available);
}

TEST(Config, UnknownModelIsConfigError) {
  EXPECT_THROW(parse_model(json::parse(R"({"model":"photon"})")), config_error);
}

TEST(Config, BadFieldKind) {
  EXPECT_THROW(parse_model(json::parse(R"({"model":"dirac_electric","field":{"kind":"yukawa"}})")), config_error);
}

TEST(Config, NegativeMassRejected) {
  EXPECT_THROW(parse_model(json::parse(R"({"model":"dirac_electric","m":-1})")), config_error);
}

TEST(Config, ParsesDirac) {
  auto m = parse_model(json::parse(
      R"({"model":"dirac_electric","m":2,"e":-1,"field":{"kind":"coulomb","charge":1,"softening":0.5}})"));
  auto* d = dynamic_cast<dirac_model*>(m.get());
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->mass(), 2);
  EXPECT_EQ(d->charge(), -1);
  EXPECT_EQ(m->groups(), (std::vector<int>{2, 2}));
}
