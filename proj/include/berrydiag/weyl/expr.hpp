#pragma once

#include "berrydiag/weyl/qcomplex.hpp"

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace bd::weyl {

// R^r P^p with all R to the left
struct monomial {
  std::array<int, 3> r{0, 0, 0};
  std::array<int, 3> p{0, 0, 0};

  int degree() const { return r[0] + r[1] + r[2] + p[0] + p[1] + p[2]; }
  bool pure_r() const { return p[0] == 0 && p[1] == 0 && p[2] == 0; }
  bool pure_p() const { return r[0] == 0 && r[1] == 0 && r[2] == 0; }
  auto tie() const { return std::tie(r, p); }
  friend bool operator<(const monomial& a, const monomial& b) { return a.tie() < b.tie(); }
  friend bool operator==(const monomial& a, const monomial& b) { return a.tie() == b.tie(); }
};

struct term_key {
  monomial m;
  int hbar = 0;
  friend bool operator<(const term_key& a, const term_key& b) {
    return std::tie(a.m, a.hbar) < std::tie(b.m, b.hbar);
  }
  friend bool operator==(const term_key& a, const term_key& b) {
    return a.m == b.m && a.hbar == b.hbar;
  }
};

enum class var { R, P };

class expr {
 public:
  using map_type = std::map<term_key, qmat>;

  explicit expr(std::size_t n = 1) : n_(n) {}

  static expr constant(const qmat& c) {
    expr e(c.dim());
    e.add_term({}, 0, c);
    return e;
  }
  static expr scalar(std::size_t n, const qcomplex& z) { return constant(qmat::scalar(n, z)); }
  static expr one(std::size_t n = 1) { return scalar(n, 1); }
  static expr hbar(std::size_t n = 1) {
    expr e(n);
    e.add_term({}, 1, qmat::identity(n));
    return e;
  }
  static expr R(int i, std::size_t n = 1) {
    monomial m;
    m.r[i] = 1;
    expr e(n);
    e.add_term(m, 0, qmat::identity(n));
    return e;
  }
  static expr P(int i, std::size_t n = 1) {
    monomial m;
    m.p[i] = 1;
    expr e(n);
    e.add_term(m, 0, qmat::identity(n));
    return e;
  }
  static expr term(const monomial& m, int hbar_pow, const qmat& c) {
    expr e(c.dim());
    e.add_term(m, hbar_pow, c);
    return e;
  }

  std::size_t dim() const { return n_; }
  const map_type& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const monomial& m, int hbar_pow, const qmat& c) {
    if (c.dim() != n_) throw std::invalid_argument("weyl::expr: dimension mismatch");
    if (c.is_zero()) return;
    term_key k{m, hbar_pow};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  bool pure(var v) const {
    for (const auto& [k, c] : terms_)
      if (v == var::R ? !k.m.pure_r() : !k.m.pure_p()) return false;
    return true;
  }
  int max_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.m.degree());
    return d;
  }

  expr& operator+=(const expr& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k.m, k.hbar, c);
    return *this;
  }
  expr& operator-=(const expr& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k.m, k.hbar, -qcomplex(1) * c);
    return *this;
  }
  expr& operator*=(const qcomplex& z) {
    if (z.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= z;
    return *this;
  }
  friend expr operator+(expr a, const expr& b) { return a += b; }
  friend expr operator-(expr a, const expr& b) { return a -= b; }
  friend expr operator*(expr a, const qcomplex& z) { return a *= z; }
  friend expr operator*(const qcomplex& z, expr a) { return a *= z; }
  friend expr operator-(expr a) { return a *= qcomplex(-1); }
  friend bool operator==(const expr& a, const expr& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }
  friend bool operator!=(const expr& a, const expr& b) { return !(a == b); }

  friend expr operator*(const expr& a, const expr& b);

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      if (n_ == 1)
        os << c(0, 0);
      else
        os << "[mat]";
      if (k.hbar) os << "*hbar^" << k.hbar;
      for (int i = 0; i < 3; ++i)
        if (k.m.r[i]) os << "*R" << i << "^" << k.m.r[i];
      for (int i = 0; i < 3; ++i)
        if (k.m.p[i]) os << "*P" << i << "^" << k.m.p[i];
    }
    return os.str();
  }

 private:
  void check(const expr& o) const {
    if (o.n_ != n_) throw std::invalid_argument("weyl::expr: dimension mismatch");
  }
  std::size_t n_;
  map_type terms_;
};

namespace detail {

inline rational binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  rational r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}
inline rational factorial(int n) {
  rational r = 1;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}
inline qcomplex minus_i_pow(int k) {
  // (-i)^k
  switch (k % 4) {
    case 0: return {1, 0};
    case 1: return {0, -1};
    case 2: return {-1, 0};
    default: return {0, 1};
  }
}

}  // namespace detail

// P_i^b R_i^c = sum_k k! C(b,k) C(c,k) (-i hbar)^k R_i^(c-k) P_i^(b-k), coordinates independent
inline expr operator*(const expr& a, const expr& b) {
  a.check(b);
  expr out(a.n_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      qmat cc = ca * cb;
      if (cc.is_zero()) continue;
      struct partial {
        monomial m;
        int h;
        qcomplex w;
      };
      std::vector<partial> acc{{monomial{}, ka.hbar + kb.hbar, qcomplex(1)}};
      for (int i = 0; i < 3; ++i) {
        int bp = ka.m.p[i], cr = kb.m.r[i];
        std::vector<partial> next;
        for (int k = 0; k <= std::min(bp, cr); ++k) {
          qcomplex w = qcomplex(detail::factorial(k) * detail::binom(bp, k) * detail::binom(cr, k)) *
                       detail::minus_i_pow(k);
          for (const auto& pa : acc) {
            partial q = pa;
            q.m.r[i] = ka.m.r[i] + cr - k;
            q.m.p[i] = bp - k + kb.m.p[i];
            q.h += k;
            q.w = pa.w * w;
            next.push_back(std::move(q));
          }
        }
        acc = std::move(next);
      }
      for (const auto& pa : acc) out.add_term(pa.m, pa.h, cc * pa.w);
    }
  }
  return out;
}

inline expr commutator(const expr& a, const expr& b) { return a * b - b * a; }

// formal derivative on the normal-ordered basis
inline expr derivative(const expr& f, var v, int l) {
  expr out(f.dim());
  for (const auto& [k, c] : f.terms()) {
    monomial m = k.m;
    int e = v == var::R ? m.r[l] : m.p[l];
    if (e == 0) continue;
    (v == var::R ? m.r[l] : m.p[l]) = e - 1;
    out.add_term(m, k.hbar, c * qcomplex(e));
  }
  return out;
}

// derivative with respect to explicit hbar powers
inline expr dhbar(const expr& f) {
  expr out(f.dim());
  for (const auto& [k, c] : f.terms()) {
    if (k.hbar == 0) continue;
    out.add_term(k.m, k.hbar - 1, c * qcomplex(k.hbar));
  }
  return out;
}

inline expr pow(const expr& a, int k) {
  expr r = expr::one(a.dim());
  for (int j = 0; j < k; ++j) r = r * a;
  return r;
}

}  // namespace bd::weyl
