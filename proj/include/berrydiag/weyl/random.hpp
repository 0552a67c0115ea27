#pragma once

#include "berrydiag/weyl/factorization.hpp"

#include <cstdint>
#include <random>

namespace bd::weyl {

// mt19937_64 with explicit modular draws, so sequences do not depend on the standard library
class rng {
 public:
  explicit rng(std::uint64_t seed) : g_(seed) {}
  int uniform(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(g_() % span);
  }
  bool coin() { return (g_() >> 17) & 1U; }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

inline qcomplex random_scalar(rng& r) {
  rational re(r.uniform(-3, 3), r.uniform(1, 3));
  rational im = r.coin() ? rational(r.uniform(-3, 3), r.uniform(1, 3)) : rational(0);
  if (re == 0 && im == 0) re = 1;
  return {re, im};
}

inline qmat random_matrix(rng& r, std::size_t n) {
  qmat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (n == 1 || r.uniform(0, 2) > 0) m(i, j) = random_scalar(r);
  if (m.is_zero()) m(0, 0) = 1;
  return m;
}

inline monomial random_monomial(rng& r, var kind, int degree) {
  monomial m;
  for (int d = 0; d < degree; ++d) {
    int i = r.uniform(0, 2);
    (kind == var::R ? m.r[i] : m.p[i]) += 1;
  }
  return m;
}

// pure expression of the given kind, max degree deg, up to 2 terms, occasional explicit hbar
inline expr random_pure(rng& r, var kind, std::size_t n, int deg) {
  expr e(n);
  const int nt = r.uniform(1, 2);
  for (int t = 0; t < nt; ++t) {
    int d = r.uniform(0, deg);
    int h = r.uniform(0, 3) == 0 ? 1 : 0;
    e.add_term(random_monomial(r, kind, d), h, random_matrix(r, n));
  }
  if (e.is_zero()) e = expr::one(n);
  return e;
}

// word whose factors alternate kinds; total degree <= deg_budget
inline word random_word(rng& r, std::size_t n, int deg_budget) {
  word w;
  const int nf = r.uniform(1, 3);
  var kind = r.coin() ? var::R : var::P;
  int left = deg_budget;
  for (int j = 0; j < nf; ++j) {
    int d = j + 1 == nf ? left : r.uniform(0, left);
    w.push_back({kind, random_pure(r, kind, n, d)});
    left -= d;
    kind = kind == var::R ? var::P : var::R;
  }
  return w;
}

inline factorization random_factorization(rng& r, std::size_t n, int deg_budget) {
  factorization f{n, {}};
  const int nw = r.uniform(1, 2);
  for (int j = 0; j < nw; ++j) f.words.push_back(random_word(r, n, deg_budget));
  return f;
}

enum class resym_mode { full, random_order };

// Rewrite e as a sum of ordered letter words, eliminating from the top degree down.
// full: every monomial becomes its equal-weight symmetrization; random_order: one random
// permutation of its letters.  The correction terms this generates are absorbed recursively.
inline factorization resymmetrize(const expr& e, resym_mode mode, rng& r, int degree_cap = 8) {
  factorization out{e.dim(), {}};
  expr rest = e;
  while (!rest.is_zero()) {
    int top = rest.max_degree();
    const auto it = std::find_if(rest.terms().begin(), rest.terms().end(),
                                 [&](const auto& kv) { return kv.first.m.degree() == top; });
    const term_key k = it->first;
    const qmat c = it->second;
    factorization piece;
    if (mode == resym_mode::full) {
      piece = symmetrized(k.m, k.hbar, c, degree_cap);
    } else {
      std::vector<int> seq = letters(k.m);
      for (std::size_t j = seq.size(); j > 1; --j)
        std::swap(seq[j - 1], seq[static_cast<std::size_t>(r.uniform(0, static_cast<int>(j) - 1))]);
      word w;
      w.push_back({var::R, expr::term({}, k.hbar, c)});
      word lw = letter_word(seq, e.dim());
      w.insert(w.end(), lw.begin(), lw.end());
      piece = factorization{e.dim(), {std::move(w)}};
    }
    rest -= expand(piece);
    out.words.insert(out.words.end(), piece.words.begin(), piece.words.end());
  }
  return out;
}

}  // namespace bd::weyl
