#pragma once

// Canonical orderings shared by the printer and the simplifier.

#include <compare>
#include <vector>

#include "kdveq/expr.hpp"

namespace kdveq::detail {

/// base^exp view of a product factor.
struct Factor {
  Expr base;
  Rational exp;
};

/// Power(b, q) -> (b, q); anything else -> (x, 1).
Factor as_factor(const Expr& x);

/// Rational constants first, then constant radicals, then symbols in
/// alphabet order, then composite bases.
std::strong_ordering compare_factors(const Factor& a, const Factor& b);

/// Graded lexicographic order on symbol exponents (higher degree first, u
/// before ux before w ...), then non-symbol factors, then coefficient, then
/// structure.
std::strong_ordering compare_terms(const Expr& a, const Expr& b);

}  // namespace kdveq::detail
