#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace kdveq {

/// Fixed alphabet. Order is the canonical monomial order u < v < w < u_t <
/// v_t < A < B < C < D. `v` is u_x and `w` is u_xx.
enum class Symbol : std::uint8_t { u, v, w, u_t, v_t, A, B, C, D };

inline constexpr std::size_t kSymbolCount = 9;

inline constexpr std::array<Symbol, kSymbolCount> kAllSymbols = {
    Symbol::u,   Symbol::v, Symbol::w, Symbol::u_t, Symbol::v_t,
    Symbol::A,   Symbol::B, Symbol::C, Symbol::D};

/// Jet coordinates in JetPoint order.
inline constexpr std::array<Symbol, 5> kJetSymbols = {
    Symbol::u, Symbol::v, Symbol::w, Symbol::u_t, Symbol::v_t};

inline constexpr std::array<Symbol, 4> kParameterSymbols = {
    Symbol::A, Symbol::B, Symbol::C, Symbol::D};

constexpr std::size_t index_of(Symbol s) noexcept {
  return static_cast<std::size_t>(s);
}

constexpr bool is_parameter(Symbol s) noexcept {
  return index_of(s) >= index_of(Symbol::A);
}

constexpr bool is_jet(Symbol s) noexcept { return !is_parameter(s); }

/// Name used by the expression grammar and the printer ("ux" for v).
std::string_view surface_name(Symbol s) noexcept;

/// Inverse of surface_name; nullopt for anything outside the alphabet.
std::optional<Symbol> symbol_from_name(std::string_view name) noexcept;

/// Like symbol_from_name but throws Error(UnknownIdentifier).
Symbol parse_symbol(std::string_view name);

}  // namespace kdveq
