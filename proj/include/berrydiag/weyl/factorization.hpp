#pragma once

#include "berrydiag/weyl/expr.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

namespace bd::weyl {

// one factor of an ordered word; constants and explicit hbar are allowed in either kind
struct factor {
  var kind;
  expr e;
};

using word = std::vector<factor>;

struct factorization {
  std::size_t n = 1;
  std::vector<word> words;  // the operator is the sum of the word products
};

struct invalid_factor : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void validate(const factorization& f) {
  for (const auto& w : f.words)
    for (const auto& fa : w) {
      if (fa.e.dim() != f.n) throw invalid_factor("factor dimension mismatch");
      if (!fa.e.pure(fa.kind))
        throw invalid_factor(fa.kind == var::R ? "factor declared pure-R contains P"
                                               : "factor declared pure-P contains R");
    }
}

inline expr expand(const word& w, std::size_t n) {
  expr out = expr::one(n);
  for (const auto& fa : w) out = out * fa.e;
  return out;
}

inline expr expand(const factorization& f) {
  expr out(f.n);
  for (const auto& w : f.words) out += expand(w, f.n);
  return out;
}

namespace detail {

inline expr product_with(const word& w, std::size_t n, std::size_t a, const expr& ea, std::size_t b,
                         const expr& eb) {
  expr out = expr::one(n);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (j == a)
      out = out * ea;
    else if (j == b)
      out = out * eb;
    else
      out = out * w[j].e;
    if (out.is_zero()) break;
  }
  return out;
}

}  // namespace detail

// sum over (R-factor, P-factor) pairs of the word with d/dR_i on one and d/dP_i on the other;
// weight +i/2 when the R factor stands left of the P factor, -i/2 otherwise
inline expr bracket(const factorization& f) {
  validate(f);
  const qcomplex half_i(0, rational(1, 2));
  expr out(f.n);
  for (const auto& w : f.words) {
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (w[a].kind != var::R) continue;
      for (std::size_t b = 0; b < w.size(); ++b) {
        if (b == a || w[b].kind != var::P) continue;
        const qcomplex wt = a < b ? half_i : -half_i;
        for (int i = 0; i < 3; ++i) {
          expr dr = derivative(w[a].e, var::R, i);
          if (dr.is_zero()) continue;
          expr dp = derivative(w[b].e, var::P, i);
          if (dp.is_zero()) continue;
          out += detail::product_with(w, f.n, a, dr, b, dp) * wt;
        }
      }
    }
  }
  return out;
}

// d/dhbar acting on the explicit hbar carried by the factors (Leibniz over the word)
inline expr dhbar(const factorization& f) {
  expr out(f.n);
  for (const auto& w : f.words)
    for (std::size_t a = 0; a < w.size(); ++a) {
      expr d = dhbar(w[a].e);
      if (d.is_zero()) continue;
      out += detail::product_with(w, f.n, a, d, w.size(), d);
    }
  return out;
}

inline factorization product(const factorization& f, const factorization& g) {
  if (f.n != g.n) throw std::invalid_argument("factorization dimension mismatch");
  factorization out{f.n, {}};
  for (const auto& a : f.words)
    for (const auto& b : g.words) {
      word w = a;
      w.insert(w.end(), b.begin(), b.end());
      out.words.push_back(std::move(w));
    }
  return out;
}

// <FG> - [<F>G + F<G> - (i/2) d_P F d_R G + (i/2) d_R F d_P G]
inline expr bracket_product_check(const factorization& f, const factorization& g) {
  const expr F = expand(f), G = expand(g);
  const qcomplex half_i(0, rational(1, 2));
  expr rhs = bracket(f) * G + F * bracket(g);
  for (int i = 0; i < 3; ++i) {
    rhs -= half_i * (derivative(F, var::P, i) * derivative(G, var::R, i));
    rhs += half_i * (derivative(F, var::R, i) * derivative(G, var::P, i));
  }
  return bracket(product(f, g)) - rhs;
}

struct not_equal_operators : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline expr invariant_derivative_check(const factorization& f1, const factorization& f2) {
  if (expand(f1) != expand(f2)) throw not_equal_operators("factorizations are not equal as operators");
  return (dhbar(f1) + bracket(f1)) - (dhbar(f2) + bracket(f2));
}

// R-left normal order as a factorization: [coefficient*R-part, P-part] per term
inline factorization normal_form(const expr& e) {
  factorization f{e.dim(), {}};
  for (const auto& [k, c] : e.terms()) {
    monomial mr, mp;
    mr.r = k.m.r;
    mp.p = k.m.p;
    word w;
    w.push_back({var::R, expr::term(mr, k.hbar, c)});
    w.push_back({var::P, expr::term(mp, 0, qmat::identity(e.dim()))});
    f.words.push_back(std::move(w));
  }
  return f;
}

// letters of a monomial, coded 0..2 for R_i and 3..5 for P_i
inline std::vector<int> letters(const monomial& m) {
  std::vector<int> out;
  for (int i = 0; i < 3; ++i) out.insert(out.end(), m.r[i], i);
  for (int i = 0; i < 3; ++i) out.insert(out.end(), m.p[i], 3 + i);
  return out;
}

inline word letter_word(const std::vector<int>& seq, std::size_t n) {
  word w;
  for (int c : seq) {
    if (c < 3)
      w.push_back({var::R, expr::R(c, n)});
    else
      w.push_back({var::P, expr::P(c - 3, n)});
  }
  return w;
}

struct degree_cap_exceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// equal-weight average over all distinguishable letter orderings, times coefficient c hbar^h
inline factorization symmetrized(const monomial& m, int hbar_pow, const qmat& c, int degree_cap = 8) {
  if (m.degree() > degree_cap) throw degree_cap_exceeded("monomial degree exceeds symmetrization cap");
  std::vector<int> seq = letters(m);
  std::sort(seq.begin(), seq.end());
  std::vector<std::vector<int>> perms;
  do perms.push_back(seq);
  while (std::next_permutation(seq.begin(), seq.end()));
  factorization f{c.dim(), {}};
  const qcomplex w(rational(1, static_cast<long>(perms.size())));
  for (const auto& s : perms) {
    word wd;
    wd.push_back({var::R, expr::term({}, hbar_pow, c * w)});
    word lw = letter_word(s, c.dim());
    wd.insert(wd.end(), lw.begin(), lw.end());
    f.words.push_back(std::move(wd));
  }
  return f;
}

}  // namespace bd::weyl
