#include <algorithm>
#include <cctype>
#include <charconv>
#include <mutex>
#include <string>

#include "kdveq/diagnostics.hpp"
#include "kdveq/errors.hpp"
#include "kdveq/rational.hpp"
#include "kdveq/symbol.hpp"

namespace kdveq {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UnknownIdentifier: return "unknown_identifier";
    case ErrorKind::UnboundSymbol: return "unbound_symbol";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DivisionByZero: return "division_by_zero";
    case ErrorKind::InvalidEquation: return "invalid_equation";
    case ErrorKind::UnboundParameter: return "unbound_parameter";
    case ErrorKind::NotS2: return "not_s2";
    case ErrorKind::OutsideSubclass: return "outside_subclass";
    case ErrorKind::SingularPoint: return "singular_point";
    case ErrorKind::InsufficientSamples: return "insufficient_samples";
    case ErrorKind::ArityMismatch: return "arity_mismatch";
    case ErrorKind::UndeterminedResidual: return "undetermined_residual";
    case ErrorKind::UnknownForm: return "unknown_form";
    case ErrorKind::ModelFormat: return "model_format";
  }
  return "unknown";
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error(ErrorKind::Syntax, "malformed number '" + std::string(text) + "'", 0); };
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) fail();
  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (num.empty() || den.empty() || !std::all_of(num.begin(), num.end(), ::isdigit) ||
        !std::all_of(den.begin(), den.end(), ::isdigit))
      fail();
    BigInt d{std::string(den)};
    if (d == 0) fail();
    value = Rational(BigInt{std::string(num)}, d);
  } else {
    auto dot = s.find('.');
    std::string digits(s.substr(0, dot));
    std::string frac = dot == std::string_view::npos ? "" : std::string(s.substr(dot + 1));
    if (digits.empty() && frac.empty()) fail();
    if (!std::all_of(digits.begin(), digits.end(), ::isdigit) ||
        !std::all_of(frac.begin(), frac.end(), ::isdigit))
      fail();
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt whole(digits + frac);
    value = Rational(whole, scale);
  }
  return negative ? Rational(-value) : value;
}

namespace {
constexpr std::string_view kSurfaceNames[kSymbolCount] = {"u",   "ux", "w", "u_t", "v_t",
                                                          "A",   "B",  "C", "D"};
}

std::string_view surface_name(Symbol s) noexcept { return kSurfaceNames[index_of(s)]; }

std::optional<Symbol> symbol_from_name(std::string_view name) noexcept {
  for (Symbol s : kAllSymbols)
    if (kSurfaceNames[index_of(s)] == name) return s;
  return std::nullopt;
}

Symbol parse_symbol(std::string_view name) {
  if (auto s = symbol_from_name(name)) return *s;
  throw Error(ErrorKind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'");
}

namespace {
std::mutex& diag_mutex() {
  static std::mutex m;
  return m;
}
std::vector<std::string>& diag_log() {
  static std::vector<std::string> log;
  return log;
}
}  // namespace

void report_diagnostic(std::string message) {
  std::lock_guard lock(diag_mutex());
  diag_log().push_back(std::move(message));
}

std::size_t diagnostic_count() {
  std::lock_guard lock(diag_mutex());
  return diag_log().size();
}

std::vector<std::string> take_diagnostics() {
  std::lock_guard lock(diag_mutex());
  return std::exchange(diag_log(), {});
}

}  // namespace kdveq
