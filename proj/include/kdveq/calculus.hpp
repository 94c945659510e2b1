#pragma once

#include <string>

#include "kdveq/expr.hpp"

namespace kdveq {

/// Exact partial derivative, returned in normal form.
Expr diff(const Expr& e, Symbol s);

/// Normal form: an expanded sum of monomials c * prod(base^q) with exact
/// rational c and q. Bases are symbols, primes (constant radicals such as
/// 2^(2/3)) or sums that cannot be expanded (negative or fractional powers).
/// Rational powers distribute over products, never over sums. Equal normal
/// forms print identically.
Expr simplify(const Expr& e);

struct ZeroTest {
  bool zero = false;
  /// Normal form and numeric probes disagree.
  bool inconsistent = false;
  /// Largest relative probe magnitude seen.
  double max_relative = 0.0;
  std::string detail;
};

/// Decides zero by the normal form and cross-checks it at eight fixed
/// pseudo-random bindings with every symbol drawn from [0.5, 2].
ZeroTest zero_test(const Expr& e);

/// zero_test(e).zero; an inconsistency is logged to the diagnostics sink.
bool is_zero(const Expr& e);

/// Central difference (e(b + h e_s) - e(b - h e_s)) / 2h.
double numeric_partial(const Expr& e, Symbol s, const Bindings& b, double h);

}  // namespace kdveq
