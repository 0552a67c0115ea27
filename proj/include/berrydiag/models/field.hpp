#pragma once

#include "berrydiag/linalg.hpp"

#include <string>
#include <vector>

namespace bd {

enum class field_kind { polynomial, gaussian, coulomb, linear };

struct poly_term {
  double coef = 0;
  std::array<int, 3> pow{0, 0, 0};
};

// scalar background field with closed-form derivatives
struct scalar_field {
  field_kind kind = field_kind::linear;
  double offset = 0;
  vec3 slope = vec3::Zero();   // linear
  double amp = 0;              // gaussian amplitude / coulomb charge
  double width = 1;            // gaussian width
  double soft = 1;             // coulomb regularization a
  vec3 center = vec3::Zero();  // gaussian, coulomb
  std::vector<poly_term> terms;

  static scalar_field constant(double c) {
    scalar_field f;
    f.offset = c;
    return f;
  }
  static scalar_field linear_field(double c, const vec3& g) {
    scalar_field f;
    f.offset = c;
    f.slope = g;
    return f;
  }
  static scalar_field gaussian(double a, double w, const vec3& c, double off = 0) {
    scalar_field f;
    f.kind = field_kind::gaussian;
    f.amp = a;
    f.width = w;
    f.center = c;
    f.offset = off;
    return f;
  }
  static scalar_field coulomb(double q, double a, const vec3& c) {
    scalar_field f;
    f.kind = field_kind::coulomb;
    f.amp = q;
    f.soft = a;
    f.center = c;
    return f;
  }

  bool is_constant() const {
    switch (kind) {
      case field_kind::linear: return slope.isZero(0);
      case field_kind::gaussian:
      case field_kind::coulomb: return amp == 0;
      case field_kind::polynomial:
        for (const auto& t : terms)
          if (t.coef != 0 && t.pow[0] + t.pow[1] + t.pow[2] > 0) return false;
        return true;
    }
    return true;
  }

  double value(const vec3& r) const {
    switch (kind) {
      case field_kind::linear: return offset + slope.dot(r);
      case field_kind::gaussian: {
        vec3 d = r - center;
        return offset + amp * std::exp(-d.squaredNorm() / (2 * width * width));
      }
      case field_kind::coulomb: return offset + amp / std::sqrt((r - center).squaredNorm() + soft * soft);
      case field_kind::polynomial: {
        double v = offset;
        for (const auto& t : terms) v += t.coef * mono(r, t.pow);
        return v;
      }
    }
    return 0;
  }

  vec3 gradient(const vec3& r) const {
    switch (kind) {
      case field_kind::linear: return slope;
      case field_kind::gaussian: {
        vec3 d = r - center;
        return -(value(r) - offset) * d / (width * width);
      }
      case field_kind::coulomb: {
        vec3 d = r - center;
        double s = d.squaredNorm() + soft * soft;
        return -amp * d / (s * std::sqrt(s));
      }
      case field_kind::polynomial: {
        vec3 g = vec3::Zero();
        for (const auto& t : terms)
          for (int i = 0; i < 3; ++i) {
            if (t.pow[i] == 0) continue;
            auto q = t.pow;
            q[i] -= 1;
            g[i] += t.coef * t.pow[i] * mono(r, q);
          }
        return g;
      }
    }
    return vec3::Zero();
  }

  Eigen::Matrix3d hessian(const vec3& r) const {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    switch (kind) {
      case field_kind::linear: break;
      case field_kind::gaussian: {
        vec3 d = r - center;
        double w2 = width * width;
        h = (value(r) - offset) * (d * d.transpose() / (w2 * w2) - Eigen::Matrix3d::Identity() / w2);
        break;
      }
      case field_kind::coulomb: {
        vec3 d = r - center;
        double s = d.squaredNorm() + soft * soft;
        h = amp * (3 * d * d.transpose() / (s * s * std::sqrt(s)) - Eigen::Matrix3d::Identity() / (s * std::sqrt(s)));
        break;
      }
      case field_kind::polynomial:
        for (const auto& t : terms)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              auto q = t.pow;
              double c = q[i];
              q[i] -= 1;
              if (c == 0) continue;
              c *= q[j];
              q[j] -= 1;
              if (c == 0) continue;
              h(i, j) += t.coef * c * mono(r, q);
            }
        break;
    }
    return h;
  }

  double laplacian(const vec3& r) const { return hessian(r).trace(); }

 private:
  static double mono(const vec3& r, const std::array<int, 3>& p) {
    double v = 1;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < p[i]; ++k) v *= r[i];
    return v;
  }
};

// F = 1/n with derivatives from those of n
struct inverse_field {
  const scalar_field* n;
  double value(const vec3& r) const { return 1.0 / n->value(r); }
  vec3 gradient(const vec3& r) const {
    double v = n->value(r);
    return -n->gradient(r) / (v * v);
  }
  Eigen::Matrix3d hessian(const vec3& r) const {
    double v = n->value(r);
    vec3 g = n->gradient(r);
    return -n->hessian(r) / (v * v) + 2.0 * g * g.transpose() / (v * v * v);
  }
};

}  // namespace bd
