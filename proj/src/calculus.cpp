#include "kdveq/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "kdveq/diagnostics.hpp"
#include "kdveq/errors.hpp"
#include "kdveq/random.hpp"
#include "order.hpp"

namespace kdveq {

namespace {

using detail::Factor;

// A monomial is a list of factors sorted by compare_factors with distinct
// bases. Bases are symbols, primes (exponent in (0, 1)), sums in canonical
// form, or opaque constants (zero / negative bases under even roots).
using Monomial = std::vector<Factor>;

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      auto c = detail::compare_factors(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return a.size() < b.size();
  }
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

Poly to_poly(const Expr& e);
Expr to_expr(const Poly& p);

Poly constant_poly(const Rational& c) {
  Poly p;
  if (c != 0) p.emplace(Monomial{}, c);
  return p;
}

void add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Poly add(Poly a, const Poly& b) {
  for (const auto& [m, c] : b) add_term(a, m, c);
  return a;
}

Poly scale(const Poly& p, const Rational& c) {
  Poly out;
  if (c == 0) return out;
  for (const auto& [m, k] : p) out.emplace(m, k * c);
  return out;
}

BigInt floor_of(const Rational& q) {
  BigInt n = numerator_of(q);
  BigInt d = denominator_of(q);
  BigInt f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

bool is_prime_base(const Expr& base) {
  return base.kind() == Expr::Kind::Constant && is_integer(base.value()) && base.value() > 1;
}

Poly mul(const Poly& a, const Poly& b);
Poly pow_integer(const Poly& p, BigInt n);

Rational rational_pow_int(const Rational& base, const BigInt& n) {
  Rational result(1);
  Rational b = n >= 0 ? base : Rational(1) / base;
  BigInt k = n >= 0 ? n : BigInt(-n);
  while (k > 0) {
    if (k & 1) result *= b;
    b *= b;
    k >>= 1;
  }
  return result;
}

/// Builds coefficient * prod(factors) with exponents normalized: zero
/// exponents dropped, primes reduced to a fractional part, sums with exponent
/// >= 1 partly expanded.
Poly normalized(Rational coef, std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return compare(a.base, b.base) < 0; });
  Monomial kept;
  std::vector<Poly> expansions;
  for (std::size_t i = 0; i < factors.size();) {
    Factor f = factors[i];
    std::size_t j = i + 1;
    while (j < factors.size() && factors[j].base == f.base) f.exp += factors[j++].exp;
    i = j;
    if (f.exp == 0) continue;
    switch (f.base.kind()) {
      case Expr::Kind::Sym:
        kept.push_back(std::move(f));
        break;
      case Expr::Kind::Constant:
        if (is_prime_base(f.base)) {
          BigInt whole = floor_of(f.exp);
          coef *= rational_pow_int(f.base.value(), whole);
          Rational frac = f.exp - Rational(whole);
          if (frac != 0) kept.push_back({f.base, frac});
        } else {
          kept.push_back(std::move(f));
        }
        break;
      default:
        if (f.exp >= 1) {
          BigInt whole = floor_of(f.exp);
          Rational frac = f.exp - Rational(whole);
          expansions.push_back(pow_integer(to_poly(f.base), whole));
          if (frac != 0) kept.push_back({f.base, frac});
        } else {
          kept.push_back(std::move(f));
        }
    }
  }
  std::sort(kept.begin(), kept.end(),
            [](const Factor& a, const Factor& b) { return detail::compare_factors(a, b) < 0; });
  Poly out;
  if (coef == 0) return out;
  out.emplace(std::move(kept), coef);
  for (const Poly& e : expansions) out = mul(out, e);
  return out;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<Factor> factors(ma.begin(), ma.end());
      factors.insert(factors.end(), mb.begin(), mb.end());
      for (const auto& [m, c] : normalized(ca * cb, std::move(factors))) add_term(out, m, c);
    }
  }
  return out;
}

Poly pow_integer(const Poly& p, BigInt n) {
  Poly result = constant_poly(Rational(1));
  Poly b = p;
  while (n > 0) {
    if (n & 1) result = mul(result, b);
    n >>= 1;
    if (n > 0) b = mul(b, b);
  }
  return result;
}

/// Prime factorization by trial division; a leftover cofactor above the
/// trial bound is kept whole.
std::vector<std::pair<BigInt, BigInt>> factorize(BigInt n) {
  std::vector<std::pair<BigInt, BigInt>> out;
  auto take = [&](const BigInt& p) {
    BigInt k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    if (k > 0) out.emplace_back(p, k);
  };
  take(2);
  for (BigInt p = 3; p * p <= n && p < 1000000; p += 2) take(p);
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// c^q as a monomial of prime radicals.
Poly rational_power(const Rational& c, const Rational& q) {
  if (is_integer(q)) return constant_poly(rational_pow_int(c, numerator_of(q)));
  Rational magnitude = c;
  Rational sign(1);
  if (c < 0) {
    if (denominator_of(q) % 2 == 0) {
      return normalized(Rational(1), {{Expr::constant(c), q}});
    }
    magnitude = -c;
    if (numerator_of(q) % 2 != 0) sign = -1;
  }
  std::vector<Factor> factors;
  for (const auto& [p, k] : factorize(numerator_of(magnitude)))
    factors.push_back({Expr::constant(Rational(p)), Rational(k) * q});
  for (const auto& [p, k] : factorize(denominator_of(magnitude)))
    factors.push_back({Expr::constant(Rational(p)), Rational(-k) * q});
  return normalized(sign, std::move(factors));
}

/// Splits a sum into lead * base with the base's leading coefficient
/// normalized to 1 (or -1 when q is an even root), making powers of the base
/// unique up to that normalization.
std::pair<Rational, Expr> split_lead(const Poly& p, const Rational& q) {
  Expr canonical = to_expr(p);
  Rational lead(1);
  const Expr& first = canonical.operands().front();
  if (first.kind() == Expr::Kind::Constant) {
    lead = first.value();
  } else if (first.kind() == Expr::Kind::Product && first.operands().front().kind() == Expr::Kind::Constant) {
    lead = first.operands().front().value();
  }
  if (lead < 0 && denominator_of(q) % 2 == 0) lead = -lead;
  return {lead, to_expr(scale(p, Rational(1) / lead))};
}

Poly pow_poly(const Poly& p, const Rational& q) {
  if (q == 0) return constant_poly(Rational(1));
  if (p.empty()) {
    if (q > 0) return {};
    return normalized(Rational(1), {{Expr::constant(Rational(0)), q}});
  }
  if (is_integer(q) && q > 0) return pow_integer(p, numerator_of(q));
  if (p.size() == 1) {
    const auto& [m, c] = *p.begin();
    std::vector<Factor> factors;
    for (const Factor& f : m) factors.push_back({f.base, f.exp * q});
    Poly radical = rational_power(c, q);
    return mul(radical, normalized(Rational(1), std::move(factors)));
  }
  auto [lead, base] = split_lead(p, q);
  return mul(rational_power(lead, q), normalized(Rational(1), {{base, q}}));
}

Poly to_poly(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return constant_poly(e.value());
    case Expr::Kind::Sym:
      return normalized(Rational(1), {{e, Rational(1)}});
    case Expr::Kind::Sum: {
      Poly acc;
      for (const Expr& t : e.operands()) acc = add(std::move(acc), to_poly(t));
      return acc;
    }
    case Expr::Kind::Product: {
      // Powers of a common sum merge before any of them is expanded, so
      // s^(-1)*s collapses instead of distributing.
      Poly acc = constant_poly(Rational(1));
      std::vector<std::pair<Expr, Rational>> sums;
      for (const Expr& f : e.operands()) {
        const bool is_power = f.kind() == Expr::Kind::Power;
        const Expr& base = is_power ? f.base() : f;
        const Rational q = is_power ? f.exponent() : Rational(1);
        Poly p = base.kind() == Expr::Kind::Sum ? to_poly(base) : Poly{};
        if (p.size() < 2) {
          acc = mul(acc, to_poly(f));
          if (acc.empty()) return acc;
          continue;
        }
        auto [lead, key] = split_lead(p, q);
        acc = mul(acc, rational_power(lead, q));
        auto it = std::find_if(sums.begin(), sums.end(), [&](const auto& s) { return s.first == key; });
        if (it == sums.end()) {
          sums.emplace_back(std::move(key), q);
        } else {
          it->second += q;
        }
      }
      for (const auto& [key, q] : sums) {
        acc = mul(acc, pow_poly(to_poly(key), q));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Expr::Kind::Power:
      return pow_poly(to_poly(e.base()), e.exponent());
  }
  return {};
}

Expr term_expr(const Monomial& m, const Rational& c) {
  std::vector<Expr> factors;
  for (const Factor& f : m)
    factors.push_back(f.exp == 1 ? f.base : Expr::power(f.base, f.exp));
  std::stable_sort(factors.begin(), factors.end(), [](const Expr& a, const Expr& b) {
    return detail::compare_factors(detail::as_factor(a), detail::as_factor(b)) < 0;
  });
  if (factors.empty()) return Expr::constant(c);
  if (c == 1 && factors.size() == 1) return factors.front();
  if (c != 1) factors.insert(factors.begin(), Expr::constant(c));
  return Expr::product(std::move(factors));
}

Expr to_expr(const Poly& p) {
  if (p.empty()) return Expr::constant(Rational(0));
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p) terms.push_back(term_expr(m, c));
  if (terms.size() == 1) return terms.front();
  std::sort(terms.begin(), terms.end(),
            [](const Expr& a, const Expr& b) { return detail::compare_terms(a, b) < 0; });
  return Expr::sum(std::move(terms));
}

Expr raw_diff(const Expr& e, Symbol s) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return Expr::constant(Rational(0));
    case Expr::Kind::Sym:
      return Expr::constant(Rational(e.sym() == s ? 1 : 0));
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      for (const Expr& t : e.operands())
        if (t.contains(s)) terms.push_back(raw_diff(t, s));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!ops[i].contains(s)) continue;
        std::vector<Expr> factors(ops.begin(), ops.end());
        factors[i] = raw_diff(ops[i], s);
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Power: {
      if (!e.base().contains(s)) return Expr::constant(Rational(0));
      const Rational& q = e.exponent();
      return Expr::product({Expr::constant(q), Expr::power(e.base(), q - 1), raw_diff(e.base(), s)});
    }
  }
  return Expr::constant(Rational(0));
}

/// Evaluates with every Sum replaced by the sum of its terms' magnitudes; the
/// scale against which cancellation is judged.
double magnitude(const Expr& e, const Bindings& b) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return std::abs(to_double(e.value()));
    case Expr::Kind::Sym:
      return std::abs(b.at(e.sym()));
    case Expr::Kind::Sum: {
      double acc = 0.0;
      for (const Expr& t : e.operands()) acc += magnitude(t, b);
      return acc;
    }
    case Expr::Kind::Product: {
      double acc = 1.0;
      for (const Expr& f : e.operands()) acc *= magnitude(f, b);
      return acc;
    }
    case Expr::Kind::Power:
      return std::abs(real_power(magnitude(e.base(), b), e.exponent()));
  }
  return 0.0;
}

constexpr std::uint64_t kProbeSeed = 0x6b64766571ULL;
constexpr int kProbeCount = 8;
constexpr double kProbeTolerance = 1e-9;

}  // namespace

Expr simplify(const Expr& e) { return to_expr(to_poly(e)); }

Expr diff(const Expr& e, Symbol s) { return simplify(raw_diff(e, s)); }

ZeroTest zero_test(const Expr& e) {
  ZeroTest result;
  Expr nf = simplify(e);
  result.zero = nf.is_constant(Rational(0));
  std::size_t evaluated = 0;
  std::size_t nonzero_probes = 0;
  for (int k = 0; k < kProbeCount; ++k) {
    std::mt19937_64 gen(substream_seed(kProbeSeed, {static_cast<std::uint64_t>(k)}));
    Bindings b;
    for (Symbol s : kAllSymbols) b.set(s, 0.5 + 1.5 * unit_interval(gen()));
    double value = 0.0;
    double scale = 0.0;
    try {
      value = eval_expr(e, b);
      scale = magnitude(e, b);
    } catch (const Error&) {
      continue;  // probe outside the expression's domain
    }
    ++evaluated;
    double rel = value == 0.0 ? 0.0 : std::abs(value) / std::max(scale, 1e-300);
    if (!std::isfinite(rel)) rel = 1.0;
    result.max_relative = std::max(result.max_relative, rel);
    if (rel > kProbeTolerance) ++nonzero_probes;
  }
  if (evaluated > 0) {
    if (result.zero && nonzero_probes > 0) {
      result.inconsistent = true;
    } else if (!result.zero && nonzero_probes == 0) {
      result.inconsistent = true;
    }
  }
  if (result.inconsistent) {
    std::ostringstream os;
    os << "zero test disagreement for '" << print_expr(e) << "': normal form is "
       << (result.zero ? "zero" : "nonzero") << " but max relative probe magnitude is "
       << result.max_relative;
    result.detail = os.str();
  }
  return result;
}

bool is_zero(const Expr& e) {
  ZeroTest t = zero_test(e);
  if (t.inconsistent) report_diagnostic(t.detail);
  return t.zero;
}

double numeric_partial(const Expr& e, Symbol s, const Bindings& b, double h) {
  double x = b.at(s);
  Bindings plus = b;
  Bindings minus = b;
  plus.set(s, x + h);
  minus.set(s, x - h);
  return (eval_expr(e, plus) - eval_expr(e, minus)) / (2.0 * h);
}

}  // namespace kdveq
