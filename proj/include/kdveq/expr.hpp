#pragma once

#include <array>
#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kdveq/rational.hpp"
#include "kdveq/symbol.hpp"

namespace kdveq {

/// Immutable expression tree over the fixed symbol alphabet. Nodes are
/// shared, so copies are cheap and trees can be read from any thread.
class Expr {
 public:
  enum class Kind : std::uint8_t { Constant, Sym, Sum, Product, Power };

  /// The zero constant.
  Expr();

  static Expr constant(Rational value);
  static Expr constant(long long value) { return constant(Rational(value)); }
  static Expr symbol(Symbol s);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, Rational exponent);

  [[nodiscard]] Kind kind() const noexcept;
  [[nodiscard]] bool is_constant() const noexcept { return kind() == Kind::Constant; }
  [[nodiscard]] bool is_constant(const Rational& r) const;

  /// Constant value (Constant) or exponent (Power).
  [[nodiscard]] const Rational& value() const;
  [[nodiscard]] const Rational& exponent() const { return value(); }
  [[nodiscard]] Symbol sym() const;
  /// Terms of a Sum, factors of a Product, {base} of a Power.
  [[nodiscard]] std::span<const Expr> operands() const;
  [[nodiscard]] const Expr& base() const;

  /// Total structural order: kind, then payload, then operands.
  friend std::strong_ordering compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) {
    return compare(a, b) == std::strong_ordering::equal;
  }

  [[nodiscard]] bool contains(Symbol s) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Builders. These create raw nodes; nothing is simplified.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Rational& exponent);
inline Expr sym(Symbol s) { return Expr::symbol(s); }
inline Expr num(long long n) { return Expr::constant(n); }

/// Numeric values for (a subset of) the alphabet.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<Symbol, double>> values);

  Bindings& set(Symbol s, double value) {
    values_[index_of(s)] = value;
    return *this;
  }
  void clear(Symbol s) { values_[index_of(s)].reset(); }
  [[nodiscard]] bool has(Symbol s) const { return values_[index_of(s)].has_value(); }
  [[nodiscard]] std::optional<double> get(Symbol s) const { return values_[index_of(s)]; }
  /// Throws Error(UnboundSymbol).
  [[nodiscard]] double at(Symbol s) const;

 private:
  std::array<std::optional<double>, kSymbolCount> values_{};
};

/// Grammar:
///   expr := term (("+"|"-") term)*      term := factor (("*"|"/") factor)*
///   factor := "-" factor | atom ("^" exponent)?
///   atom := number | ident | "(" expr ")"
///   exponent := ["-"] integer | "(" ["-"] integer ["/" integer] ")"
/// `ux` is the symbol v. Throws Error(Syntax) with a byte offset or
/// Error(UnknownIdentifier) naming the token.
Expr parse_expr(std::string_view text);

/// Deterministic text. Sum terms and Product factors are emitted in
/// canonical order; nothing is merged. Output of a simplified expression
/// parses back to the identical tree.
std::string print_expr(const Expr& e);

/// Throws Error(UnboundSymbol), Error(Domain) for an even root of a negative
/// base, Error(DivisionByZero) for a negative power of zero. Odd roots of
/// negative bases are real.
double eval_expr(const Expr& e, const Bindings& b);

/// Real power x^q with the same branch rules as eval_expr.
double real_power(double x, const Rational& q);

/// Replaces every occurrence of `s`; the result is not simplified.
Expr substitute(const Expr& e, Symbol s, const Expr& replacement);

/// Flat evaluation tape for repeated evaluation of one expression. Any base
/// raised to a negative power whose magnitude is below `singular_threshold`
/// raises Error(SingularPoint) naming that base.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e, double singular_threshold = 0.0);

  [[nodiscard]] double operator()(const Bindings& b) const;
  /// Jet-only variant: values in kJetSymbols order, parameters must be absent.
  [[nodiscard]] double operator()(std::span<const double, 5> jet) const;

 private:
  enum class Op : std::uint8_t { Const, Load, Add, Mul, Pow };
  struct Instr {
    Op op;
    std::uint32_t arg = 0;  // symbol index / operand count / label index
    double constant = 0.0;  // Const value or Pow exponent
    std::int64_t num = 0;   // Pow exponent numerator
    std::int64_t den = 1;   // Pow exponent denominator
  };
  template <typename Load>
  double run(Load&& load) const;

  std::vector<Instr> tape_;
  std::vector<std::string> labels_;
  double threshold_ = 0.0;
  std::size_t max_stack_ = 0;
};

}  // namespace kdveq
