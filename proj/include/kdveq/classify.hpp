#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "kdveq/expr.hpp"

namespace kdveq {

enum class Subclass { S1, S2, S3, S4, Outside };

std::string_view to_string(Subclass s) noexcept;
std::optional<Subclass> subclass_from_string(std::string_view text) noexcept;

/// u_xxx = u_t + Q(u, u_x). Q may mention the parameters A..D; each one is
/// either bound in `params` or the whole equation is flagged `generic`, in
/// which case unbound parameters are treated as generic nonzero reals.
struct EquationSpec {
  Expr q;
  std::map<Symbol, Rational> params;
  bool generic = false;

  static EquationSpec from_text(std::string_view q_text,
                                std::map<Symbol, Rational> params = {},
                                bool generic = false);

  /// Q with bound parameters substituted. Throws Error(InvalidEquation) if Q
  /// mentions w, u_t or v_t, and Error(UnboundParameter) if a parameter is
  /// unbound and the equation is not generic.
  [[nodiscard]] Expr effective_q() const;
};

struct SecondPartials {
  Expr quu;
  Expr quv;
  Expr qvv;
};

SecondPartials second_partials(const EquationSpec& eq);

/// S1: Quu = Quv = Qvv = 0.  S2: Quu = Qvv = 0, Quv != 0.
/// S3: Qvv != 0, Quv != 0.    S4: Quu != 0, Quv != 0, Qvv = 0.
/// Outside: Quv = 0 with Quu or Qvv nonzero. "= 0" means identically zero.
Subclass classify(const EquationSpec& eq);
Subclass classify(const SecondPartials& partials);

/// Q = A u + B u_x + C u u_x + D for S2 equations.
struct AffineCoeffs {
  Expr a;
  Expr b;
  Expr c;
  Expr d;
};

/// Throws Error(NotS2) unless classify(eq) == S2.
AffineCoeffs extract_affine(const EquationSpec& eq);

}  // namespace kdveq
