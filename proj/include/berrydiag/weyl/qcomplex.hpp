#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bd::weyl {

using rational = boost::multiprecision::cpp_rational;

// exact a + i b
struct qcomplex {
  rational re{0};
  rational im{0};

  qcomplex() = default;
  qcomplex(rational r) : re(std::move(r)) {}
  qcomplex(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}
  qcomplex(long r) : re(r) {}
  qcomplex(int r) : re(r) {}

  static qcomplex i_unit() { return {0, 1}; }

  bool is_zero() const { return re == 0 && im == 0; }
  qcomplex conj() const { return {re, -im}; }

  qcomplex& operator+=(const qcomplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  qcomplex& operator-=(const qcomplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend qcomplex operator+(qcomplex a, const qcomplex& b) { return a += b; }
  friend qcomplex operator-(qcomplex a, const qcomplex& b) { return a -= b; }
  friend qcomplex operator-(const qcomplex& a) { return {-a.re, -a.im}; }
  friend qcomplex operator*(const qcomplex& a, const qcomplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  qcomplex& operator*=(const qcomplex& o) { return *this = *this * o; }
  friend qcomplex operator/(const qcomplex& a, const qcomplex& b) {
    rational d = b.re * b.re + b.im * b.im;
    if (d == 0) throw std::domain_error("qcomplex: division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend bool operator==(const qcomplex& a, const qcomplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const qcomplex& a, const qcomplex& b) { return !(a == b); }

  double real_d() const { return re.convert_to<double>(); }
  double imag_d() const { return im.convert_to<double>(); }

  std::string str() const {
    if (im == 0) return re.str();
    if (re == 0) return im.str() + "i";
    return "(" + re.str() + (im < 0 ? "" : "+") + im.str() + "i)";
  }
};

inline std::ostream& operator<<(std::ostream& os, const qcomplex& z) { return os << z.str(); }

// small dense matrix over qcomplex, row major
class qmat {
 public:
  qmat() = default;
  explicit qmat(std::size_t n) : n_(n), a_(n * n) {}

  static qmat identity(std::size_t n) {
    qmat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static qmat scalar(std::size_t n, const qcomplex& z) {
    qmat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = z;
    return m;
  }

  std::size_t dim() const { return n_; }
  qcomplex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const qcomplex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  bool is_zero() const {
    for (const auto& z : a_)
      if (!z.is_zero()) return false;
    return true;
  }

  qmat& operator+=(const qmat& o) {
    check(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  qmat& operator-=(const qmat& o) {
    check(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  qmat& operator*=(const qcomplex& z) {
    for (auto& x : a_) x *= z;
    return *this;
  }
  friend qmat operator+(qmat a, const qmat& b) { return a += b; }
  friend qmat operator-(qmat a, const qmat& b) { return a -= b; }
  friend qmat operator*(qmat a, const qcomplex& z) { return a *= z; }
  friend qmat operator*(const qcomplex& z, qmat a) { return a *= z; }
  friend qmat operator*(const qmat& a, const qmat& b) {
    a.check(b);
    qmat c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        const qcomplex& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const qmat& a, const qmat& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

  qmat adjoint() const {
    qmat t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j).conj();
    return t;
  }

 private:
  void check(const qmat& o) const {
    if (o.n_ != n_) throw std::invalid_argument("qmat: dimension mismatch");
  }
  std::size_t n_ = 0;
  std::vector<qcomplex> a_;
};

inline qmat pauli(int k) {
  qmat m(2);
  switch (k) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = qcomplex(0, -1); m(1, 0) = qcomplex(0, 1); break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::invalid_argument("pauli index");
  }
  return m;
}

}  // namespace bd::weyl
