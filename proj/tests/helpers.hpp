#pragma once

#include <random>
#include <vector>

#include "kdveq/expr.hpp"

namespace kdveq::testkit {

inline Expr P(std::string_view text) { return parse_expr(text); }

// Random bindings of the whole alphabet in [lo, hi].
inline Bindings random_bindings(std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Bindings b;
  for (Symbol s : kAllSymbols) b.set(s, dist(rng));
  return b;
}

// Small random trees over the full alphabet; positive bindings keep them finite.
inline Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int k = depth <= 0 ? pick(rng) % 2 : pick(rng);
  if (k == 0) {
    std::uniform_int_distribution<int> c(-5, 5);
    std::uniform_int_distribution<int> d(1, 3);
    return Expr::constant(Rational(c(rng), d(rng)));
  }
  if (k == 1 || k == 2) {
    std::uniform_int_distribution<std::size_t> s(0, kAllSymbols.size() - 1);
    return sym(kAllSymbols[s(rng)]);
  }
  if (k <= 5) {
    std::vector<Expr> terms;
    for (int i = 0; i < 2 + pick(rng) % 2; ++i) terms.push_back(random_expr(rng, depth - 1));
    return Expr::sum(std::move(terms));
  }
  if (k <= 8) {
    std::vector<Expr> factors;
    for (int i = 0; i < 2 + pick(rng) % 2; ++i) factors.push_back(random_expr(rng, depth - 1));
    return Expr::product(std::move(factors));
  }
  static const Rational exps[] = {Rational(2), Rational(3), Rational(-1), Rational(-2),
                                  Rational(1, 3), Rational(1, 2), Rational(-2, 3)};
  std::uniform_int_distribution<std::size_t> e(0, std::size(exps) - 1);
  Expr base = random_expr(rng, depth - 1);
  return pow(base, exps[e(rng)]);
}

inline bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace kdveq::testkit
