#pragma once

#include "berrydiag/weyl/random.hpp"

#include <string>
#include <vector>

namespace bd::weyl {

struct suite_result {
  std::string name;
  int cases = 0;
  int exact = 0;
  std::vector<std::string> failures;
  bool pass() const { return cases > 0 && exact == cases; }
};

// <FG> product rule on random factorization pairs, total degree <= max_degree
inline suite_result product_rule_suite(std::uint64_t seed, int cases, int max_degree,
                                       const std::vector<std::size_t>& dims) {
  suite_result res{"bracket_product_rule", 0, 0, {}};
  rng r(seed);
  for (int c = 0; c < cases; ++c) {
    std::size_t n = dims[static_cast<std::size_t>(c) % dims.size()];
    int df = r.uniform(0, max_degree);
    factorization f = random_factorization(r, n, df);
    factorization g = random_factorization(r, n, max_degree - df);
    expr resid = bracket_product_check(f, g);
    ++res.cases;
    if (resid.is_zero())
      ++res.exact;
    else
      res.failures.push_back("case " + std::to_string(c) + ": " + resid.str());
  }
  return res;
}

// d_hbar F + <F> compared between a random factorization and a re-symmetrized form of it
inline suite_result invariance_suite(std::uint64_t seed, int cases, int max_degree,
                                     const std::vector<std::size_t>& dims, int degree_cap = 8) {
  suite_result res{"derivative_invariance", 0, 0, {}};
  rng r(seed);
  for (int c = 0; c < cases; ++c) {
    std::size_t n = dims[static_cast<std::size_t>(c) % dims.size()];
    factorization f1 = random_factorization(r, n, max_degree);
    expr e = expand(f1);
    resym_mode mode = c % 2 == 0 ? resym_mode::full : resym_mode::random_order;
    factorization f2 = resymmetrize(e, mode, r, degree_cap);
    expr resid = invariant_derivative_check(f1, f2);
    ++res.cases;
    if (resid.is_zero())
      ++res.exact;
    else
      res.failures.push_back("case " + std::to_string(c) + ": " + resid.str());
  }
  return res;
}

// brackets of fully symmetrized monomials vanish
inline suite_result symmetric_bracket_suite(std::uint64_t seed, int cases, int max_degree,
                                            const std::vector<std::size_t>& dims) {
  suite_result res{"symmetrized_bracket_zero", 0, 0, {}};
  rng r(seed);
  for (int c = 0; c < cases; ++c) {
    std::size_t n = dims[static_cast<std::size_t>(c) % dims.size()];
    int dr = r.uniform(0, max_degree);
    int dp = r.uniform(0, max_degree - dr);
    monomial m = random_monomial(r, var::R, dr);
    m.p = random_monomial(r, var::P, dp).p;
    factorization f = symmetrized(m, 0, random_matrix(r, n));
    expr b = bracket(f);
    ++res.cases;
    if (b.is_zero())
      ++res.exact;
    else
      res.failures.push_back("case " + std::to_string(c) + ": " + b.str());
  }
  return res;
}

}  // namespace bd::weyl
