#include "kdveq/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

#include "kdveq/errors.hpp"
#include "order.hpp"

namespace kdveq {

struct Expr::Node {
  Kind kind = Kind::Constant;
  Symbol symbol = Symbol::u;
  Rational value;  // constant value or exponent
  std::vector<Expr> children;
};

namespace {

std::strong_ordering compare_rationals(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

Expr::Expr() : Expr(constant(Rational(0))) {}

Expr Expr::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::symbol(Symbol s) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sym;
  n->symbol = s;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, Rational exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->value = std::move(exponent);
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_constant(const Rational& r) const {
  return kind() == Kind::Constant && node_->value == r;
}

const Rational& Expr::value() const { return node_->value; }
Symbol Expr::sym() const { return node_->symbol; }
std::span<const Expr> Expr::operands() const { return node_->children; }
const Expr& Expr::base() const { return node_->children.front(); }

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return compare_rationals(a.value(), b.value());
    case Expr::Kind::Sym:
      return a.sym() <=> b.sym();
    case Expr::Kind::Power:
      if (auto c = compare_rationals(a.exponent(), b.exponent()); c != 0) return c;
      return compare(a.base(), b.base());
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      auto x = a.operands();
      auto y = b.operands();
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (auto c = compare(x[i], y[i]); c != 0) return c;
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

bool Expr::contains(Symbol s) const {
  switch (kind()) {
    case Kind::Constant: return false;
    case Kind::Sym: return sym() == s;
    default:
      return std::any_of(node_->children.begin(), node_->children.end(),
                         [s](const Expr& c) { return c.contains(s); });
  }
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr::constant(Rational(-1)), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  return Expr::product({a, Expr::power(b, Rational(-1))});
}
Expr pow(const Expr& base, const Rational& exponent) { return Expr::power(base, exponent); }

Bindings::Bindings(std::initializer_list<std::pair<Symbol, double>> values) {
  for (const auto& [s, v] : values) set(s, v);
}

double Bindings::at(Symbol s) const {
  if (auto v = get(s)) return *v;
  throw Error(ErrorKind::UnboundSymbol, "unbound symbol '" + std::string(surface_name(s)) + "'");
}

// ---------------------------------------------------------------------------
// Canonical orderings

namespace detail {

Factor as_factor(const Expr& x) {
  if (x.kind() == Expr::Kind::Power) return {x.base(), x.exponent()};
  return {x, Rational(1)};
}

namespace {
int factor_category(const Factor& f) {
  switch (f.base.kind()) {
    case Expr::Kind::Constant: return f.exp == 1 ? 0 : 1;
    // Parameters print ahead of jet coordinates, like coefficients.
    case Expr::Kind::Sym: return is_parameter(f.base.sym()) ? 2 : 3;
    default: return 4;
  }
}
}  // namespace

std::strong_ordering compare_factors(const Factor& a, const Factor& b) {
  int ca = factor_category(a);
  int cb = factor_category(b);
  if (auto c = ca <=> cb; c != 0) return c;
  if (auto c = compare(a.base, b.base); c != 0) return c;
  return compare_rationals(a.exp, b.exp);
}

namespace {

struct TermKey {
  Rational coef{1};
  std::array<Rational, kSymbolCount> exps{};
  std::vector<Factor> others;
};

TermKey term_key(const Expr& t) {
  TermKey key;
  auto absorb = [&key](const Expr& x) {
    Factor f = as_factor(x);
    if (f.base.kind() == Expr::Kind::Constant && f.exp == 1) {
      key.coef *= f.base.value();
    } else if (f.base.kind() == Expr::Kind::Sym) {
      key.exps[index_of(f.base.sym())] += f.exp;
    } else {
      key.others.push_back(std::move(f));
    }
  };
  if (t.kind() == Expr::Kind::Product) {
    for (const Expr& x : t.operands()) absorb(x);
  } else {
    absorb(t);
  }
  std::sort(key.others.begin(), key.others.end(),
            [](const Factor& a, const Factor& b) { return compare_factors(a, b) < 0; });
  return key;
}

}  // namespace

std::strong_ordering compare_terms(const Expr& a, const Expr& b) {
  TermKey ka = term_key(a);
  TermKey kb = term_key(b);
  Rational da, db;
  for (std::size_t i = 0; i < kSymbolCount; ++i) {
    da += ka.exps[i];
    db += kb.exps[i];
  }
  // Higher degree first.
  if (auto c = compare_rationals(db, da); c != 0) return c;
  for (std::size_t i = 0; i < kSymbolCount; ++i)
    if (auto c = compare_rationals(kb.exps[i], ka.exps[i]); c != 0) return c;
  for (std::size_t i = 0; i < std::min(ka.others.size(), kb.others.size()); ++i)
    if (auto c = compare_factors(ka.others[i], kb.others[i]); c != 0) return c;
  if (auto c = ka.others.size() <=> kb.others.size(); c != 0) return c;
  if (auto c = compare_rationals(ka.coef, kb.coef); c != 0) return c;
  return compare(a, b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
        ++i;
      out.push_back({Tok::Number, text.substr(start, i - start), start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
      out.push_back({Tok::Ident, text.substr(start, i - start), start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw Error(ErrorKind::Syntax,
                    "unexpected character '" + std::string(1, c) + "' at offset " +
                        std::to_string(start),
                    start);
    }
    ++i;
    out.push_back({kind, text.substr(start, 1), start});
  }
  out.push_back({Tok::End, {}, text.size()});
  return out;
}

/// Negation that keeps canonical products canonical: a leading rational
/// coefficient is flipped (and dropped when it becomes 1).
Expr negate(const Expr& x) {
  if (x.kind() == Expr::Kind::Constant) return Expr::constant(Rational(-x.value()));
  if (x.kind() == Expr::Kind::Product && !x.operands().empty() &&
      x.operands().front().kind() == Expr::Kind::Constant) {
    std::vector<Expr> ops(x.operands().begin(), x.operands().end());
    Rational c = -ops.front().value();
    if (c == 1) {
      ops.erase(ops.begin());
      if (ops.size() == 1) return ops.front();
    } else {
      ops.front() = Expr::constant(c);
    }
    return Expr::product(std::move(ops));
  }
  std::vector<Expr> ops{Expr::constant(Rational(-1))};
  if (x.kind() == Expr::Kind::Product) {
    ops.insert(ops.end(), x.operands().begin(), x.operands().end());
  } else {
    ops.push_back(x);
  }
  return Expr::product(std::move(ops));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Expr parse() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail("unexpected token '" + std::string(peek().text) + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string where = t.kind == Tok::End ? "end of input" : "offset " + std::to_string(t.offset);
    throw Error(ErrorKind::Syntax, "syntax error at " + where + ": " + what, t.offset);
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = next().kind == Tok::Minus;
      Expr t = term();
      terms.push_back(minus ? negate(t) : t);
    }
    if (terms.size() == 1) return terms.front();
    std::vector<Expr> flat;
    for (const Expr& t : terms) {
      if (t.kind() == Expr::Kind::Sum) {
        flat.insert(flat.end(), t.operands().begin(), t.operands().end());
      } else {
        flat.push_back(t);
      }
    }
    return Expr::sum(std::move(flat));
  }

  Expr term() {
    std::vector<Expr> factors{factor()};
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      bool divide = next().kind == Tok::Slash;
      Expr f = factor();
      if (!divide) {
        factors.push_back(f);
      } else if (factors.size() == 1 && factors.front().kind() == Expr::Kind::Constant &&
                 f.kind() == Expr::Kind::Constant && f.value() != 0) {
        factors.front() = Expr::constant(Rational(factors.front().value() / f.value()));
      } else {
        factors.push_back(Expr::power(f, Rational(-1)));
      }
    }
    if (factors.size() == 1) return factors.front();
    std::vector<Expr> flat;
    for (const Expr& f : factors) {
      if (f.kind() == Expr::Kind::Product) {
        flat.insert(flat.end(), f.operands().begin(), f.operands().end());
      } else {
        flat.push_back(f);
      }
    }
    return Expr::product(std::move(flat));
  }

  Expr factor() {
    if (peek().kind == Tok::Minus) {
      next();
      return negate(factor());
    }
    Expr a = atom();
    if (peek().kind == Tok::Caret) {
      next();
      return Expr::power(a, exponent());
    }
    return a;
  }

  BigInt integer() {
    if (peek().kind != Tok::Number) fail("expected integer");
    std::string_view digits = peek().text;
    if (digits.find('.') != std::string_view::npos) fail("exponent must be an integer");
    next();
    return BigInt(std::string(digits));
  }

  Rational exponent() {
    if (peek().kind == Tok::Number) return Rational(integer());
    if (peek().kind == Tok::Minus) {
      next();
      return Rational(-integer());
    }
    if (peek().kind != Tok::LParen) fail("expected exponent");
    next();
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      next();
      negative = true;
    }
    BigInt num = integer();
    BigInt den = 1;
    if (peek().kind == Tok::Slash) {
      next();
      den = integer();
      if (den == 0) fail("zero denominator in exponent");
    }
    if (peek().kind != Tok::RParen) fail("expected ')'");
    next();
    Rational q(num, den);
    return negative ? Rational(-q) : q;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        try {
          return Expr::constant(parse_rational(t.text));
        } catch (const Error&) {
          throw Error(ErrorKind::Syntax,
                      "syntax error at offset " + std::to_string(t.offset) + ": malformed number '" +
                          std::string(t.text) + "'",
                      t.offset);
        }
      }
      case Tok::Ident: {
        auto s = symbol_from_name(t.text);
        if (!s)
          throw Error(ErrorKind::UnknownIdentifier,
                      "unknown identifier '" + std::string(t.text) + "' at offset " +
                          std::to_string(t.offset),
                      t.offset);
        next();
        return Expr::symbol(*s);
      }
      case Tok::LParen: {
        next();
        Expr e = expr();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        next();
        return e;
      }
      default:
        fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected token '" + std::string(t.text) + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

std::vector<Expr> sorted_factors(const Expr& p) {
  std::vector<Expr> ops(p.operands().begin(), p.operands().end());
  std::stable_sort(ops.begin(), ops.end(), [](const Expr& a, const Expr& b) {
    return detail::compare_factors(detail::as_factor(a), detail::as_factor(b)) < 0;
  });
  return ops;
}

std::vector<Expr> sorted_terms(const Expr& s) {
  std::vector<Expr> ops(s.operands().begin(), s.operands().end());
  std::stable_sort(ops.begin(), ops.end(),
                   [](const Expr& a, const Expr& b) { return detail::compare_terms(a, b) < 0; });
  return ops;
}

void print(std::ostream& os, const Expr& e);

void print_coefficient(std::ostream& os, const Rational& c) {
  if (is_integer(c)) {
    os << to_string(c);
  } else {
    os << '(' << to_string(c) << ')';
  }
}

void print_exponent(std::ostream& os, const Rational& q) {
  if (is_integer(q) && q >= 0) {
    os << to_string(q);
  } else {
    os << '(' << to_string(q) << ')';
  }
}

void print_power_base(std::ostream& os, const Expr& b) {
  if (b.kind() == Expr::Kind::Sym ||
      (b.kind() == Expr::Kind::Constant && is_integer(b.value()) && b.value() >= 0)) {
    print(os, b);
  } else {
    os << '(';
    print(os, b);
    os << ')';
  }
}

/// A factor that is not the leading coefficient of its product.
void print_inner_factor(std::ostream& os, const Expr& f) {
  switch (f.kind()) {
    case Expr::Kind::Sum:
    case Expr::Kind::Product:
      os << '(';
      print(os, f);
      os << ')';
      break;
    case Expr::Kind::Constant:
      if (is_integer(f.value()) && f.value() >= 0) {
        print(os, f);
      } else {
        os << '(';
        print(os, f);
        os << ')';
      }
      break;
    default:
      print(os, f);
  }
}

void print_product(std::ostream& os, const Expr& p) {
  std::vector<Expr> ops = sorted_factors(p);
  if (ops.empty()) {
    os << '1';
    return;
  }
  if (ops.size() == 1) {
    print(os, ops.front());
    return;
  }
  std::size_t first = 0;
  if (ops.front().kind() == Expr::Kind::Constant) {
    const Rational& c = ops.front().value();
    if (c == -1) {
      os << '-';
    } else if (c < 0) {
      os << '-';
      print_coefficient(os, Rational(-c));
      os << '*';
    } else {
      print_coefficient(os, c);
      os << '*';
    }
    first = 1;
  }
  for (std::size_t i = first; i < ops.size(); ++i) {
    if (i > first) os << '*';
    print_inner_factor(os, ops[i]);
  }
}

bool is_negative_term(const Expr& t) {
  if (t.kind() == Expr::Kind::Constant) return t.value() < 0;
  if (t.kind() == Expr::Kind::Product && t.operands().size() > 1) {
    std::vector<Expr> ops = sorted_factors(t);
    return ops.front().kind() == Expr::Kind::Constant && ops.front().value() < 0;
  }
  return false;
}

void print_sum(std::ostream& os, const Expr& s) {
  std::vector<Expr> terms = sorted_terms(s);
  if (terms.empty()) {
    os << '0';
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Expr& t = terms[i];
    bool nested = t.kind() == Expr::Kind::Sum;
    if (i == 0) {
      if (nested) os << '(';
      print(os, t);
      if (nested) os << ')';
      continue;
    }
    if (is_negative_term(t)) {
      os << " - ";
      Expr sorted = t.kind() == Expr::Kind::Product ? Expr::product(sorted_factors(t)) : t;
      print(os, negate(sorted));
    } else {
      os << " + ";
      if (nested) os << '(';
      print(os, t);
      if (nested) os << ')';
    }
  }
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      const Rational& c = e.value();
      if (is_integer(c)) {
        os << to_string(c);
      } else if (c < 0) {
        os << "-(" << to_string(Rational(-c)) << ')';
      } else {
        os << '(' << to_string(c) << ')';
      }
      break;
    }
    case Expr::Kind::Sym:
      os << surface_name(e.sym());
      break;
    case Expr::Kind::Sum:
      print_sum(os, e);
      break;
    case Expr::Kind::Product:
      print_product(os, e);
      break;
    case Expr::Kind::Power:
      print_power_base(os, e.base());
      os << '^';
      print_exponent(os, e.exponent());
      break;
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::int64_t to_i64(const BigInt& x) {
  if (x > BigInt(std::numeric_limits<std::int64_t>::max()) ||
      x < BigInt(std::numeric_limits<std::int64_t>::min()))
    throw Error(ErrorKind::Domain, "exponent out of range");
  return x.convert_to<std::int64_t>();
}

double power_i64(double x, std::int64_t num, std::int64_t den) {
  if (den == 1) return std::pow(x, static_cast<double>(num));
  double magnitude = std::abs(x);
  double root = den == 3 ? std::cbrt(magnitude)
                         : std::pow(magnitude, 1.0 / static_cast<double>(den));
  double value = std::pow(root, static_cast<double>(num));
  bool flip = x < 0 && (num % 2 != 0);
  return flip ? -value : value;
}

void check_power_domain(double x, std::int64_t num, std::int64_t den, double threshold,
                        const std::string* label) {
  if (num < 0) {
    if (threshold > 0 && std::abs(x) < threshold) {
      throw Error(ErrorKind::SingularPoint,
                  "singular point: denominator " + (label ? *label : std::string("?")) +
                      " has magnitude below threshold");
    }
    if (x == 0) throw Error(ErrorKind::DivisionByZero, "division by zero");
  }
  if (x < 0 && den % 2 == 0) throw Error(ErrorKind::Domain, "even root of a negative number");
}

}  // namespace

double real_power(double x, const Rational& q) {
  std::int64_t num = to_i64(numerator_of(q));
  std::int64_t den = to_i64(denominator_of(q));
  check_power_domain(x, num, den, 0.0, nullptr);
  return power_i64(x, num, den);
}

double eval_expr(const Expr& e, const Bindings& b) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return to_double(e.value());
    case Expr::Kind::Sym:
      return b.at(e.sym());
    case Expr::Kind::Sum: {
      double acc = 0.0;
      for (const Expr& t : e.operands()) acc += eval_expr(t, b);
      return acc;
    }
    case Expr::Kind::Product: {
      double acc = 1.0;
      for (const Expr& f : e.operands()) acc *= eval_expr(f, b);
      return acc;
    }
    case Expr::Kind::Power:
      return real_power(eval_expr(e.base(), b), e.exponent());
  }
  return 0.0;
}

Expr substitute(const Expr& e, Symbol s, const Expr& replacement) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e;
    case Expr::Kind::Sym:
      return e.sym() == s ? replacement : e;
    case Expr::Kind::Power:
      return Expr::power(substitute(e.base(), s, replacement), e.exponent());
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::vector<Expr> ops;
      ops.reserve(e.operands().size());
      for (const Expr& x : e.operands()) ops.push_back(substitute(x, s, replacement));
      return e.kind() == Expr::Kind::Sum ? Expr::sum(std::move(ops))
                                         : Expr::product(std::move(ops));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Compiled evaluation

CompiledExpr::CompiledExpr(const Expr& e, double singular_threshold)
    : threshold_(singular_threshold) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr& x) -> void {
    switch (x.kind()) {
      case Expr::Kind::Constant:
        tape_.push_back({Op::Const, 0, to_double(x.value())});
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case Expr::Kind::Sym:
        tape_.push_back({Op::Load, static_cast<std::uint32_t>(index_of(x.sym()))});
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case Expr::Kind::Sum:
      case Expr::Kind::Product: {
        auto ops = x.operands();
        if (ops.empty()) {
          tape_.push_back({Op::Const, 0, x.kind() == Expr::Kind::Sum ? 0.0 : 1.0});
          max_stack_ = std::max(max_stack_, ++depth);
          break;
        }
        for (const Expr& c : ops) self(self, c);
        tape_.push_back({x.kind() == Expr::Kind::Sum ? Op::Add : Op::Mul,
                         static_cast<std::uint32_t>(ops.size())});
        depth -= ops.size() - 1;
        break;
      }
      case Expr::Kind::Power: {
        self(self, x.base());
        Instr in{Op::Pow};
        in.num = to_i64(numerator_of(x.exponent()));
        in.den = to_i64(denominator_of(x.exponent()));
        in.arg = static_cast<std::uint32_t>(labels_.size());
        labels_.push_back(print_expr(x.base()));
        tape_.push_back(in);
        break;
      }
    }
  };
  emit(emit, e);
}

template <typename Load>
double CompiledExpr::run(Load&& load) const {
  constexpr std::size_t kInline = 64;
  std::array<double, kInline> inline_stack;
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_stack_ > kInline) {
    heap_stack.resize(max_stack_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& in : tape_) {
    switch (in.op) {
      case Op::Const:
        stack[top++] = in.constant;
        break;
      case Op::Load:
        stack[top++] = load(in.arg);
        break;
      case Op::Add: {
        double acc = 0.0;
        for (std::size_t i = top - in.arg; i < top; ++i) acc += stack[i];
        top -= in.arg;
        stack[top++] = acc;
        break;
      }
      case Op::Mul: {
        double acc = 1.0;
        for (std::size_t i = top - in.arg; i < top; ++i) acc *= stack[i];
        top -= in.arg;
        stack[top++] = acc;
        break;
      }
      case Op::Pow: {
        double x = stack[top - 1];
        check_power_domain(x, in.num, in.den, threshold_, &labels_[in.arg]);
        stack[top - 1] = power_i64(x, in.num, in.den);
        break;
      }
    }
  }
  return tape_.empty() ? 0.0 : stack[0];
}

double CompiledExpr::operator()(const Bindings& b) const {
  return run([&b](std::uint32_t i) { return b.at(kAllSymbols[i]); });
}

double CompiledExpr::operator()(std::span<const double, 5> jet) const {
  return run([&jet](std::uint32_t i) {
    if (i >= 5)
      throw Error(ErrorKind::UnboundParameter, "unbound parameter '" +
                                                   std::string(surface_name(kAllSymbols[i])) + "'");
    return jet[i];
  });
}

}  // namespace kdveq
