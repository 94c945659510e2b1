#include "kdveq/classify.hpp"

#include <array>

#include "kdveq/calculus.hpp"
#include "kdveq/errors.hpp"

namespace kdveq {

std::string_view to_string(Subclass s) noexcept {
  switch (s) {
    case Subclass::S1: return "S1";
    case Subclass::S2: return "S2";
    case Subclass::S3: return "S3";
    case Subclass::S4: return "S4";
    case Subclass::Outside: return "Outside";
  }
  return "Outside";
}

std::optional<Subclass> subclass_from_string(std::string_view text) noexcept {
  for (Subclass s : {Subclass::S1, Subclass::S2, Subclass::S3, Subclass::S4, Subclass::Outside})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

EquationSpec EquationSpec::from_text(std::string_view q_text, std::map<Symbol, Rational> params,
                                     bool generic) {
  return EquationSpec{parse_expr(q_text), std::move(params), generic};
}

Expr EquationSpec::effective_q() const {
  for (Symbol s : {Symbol::w, Symbol::u_t, Symbol::v_t}) {
    if (q.contains(s))
      throw Error(ErrorKind::InvalidEquation,
                  "Q may depend on u and ux only, found '" + std::string(surface_name(s)) + "'");
  }
  Expr out = q;
  for (const auto& [s, value] : params) {
    if (!is_parameter(s))
      throw Error(ErrorKind::InvalidEquation,
                  "'" + std::string(surface_name(s)) + "' is not a parameter");
    out = substitute(out, s, Expr::constant(value));
  }
  if (!generic) {
    for (Symbol s : kParameterSymbols) {
      if (out.contains(s))
        throw Error(ErrorKind::UnboundParameter,
                    "parameter '" + std::string(surface_name(s)) + "' is unbound");
    }
  }
  return out;
}

SecondPartials second_partials(const EquationSpec& eq) {
  Expr q = eq.effective_q();
  Expr qu = diff(q, Symbol::u);
  Expr qv = diff(q, Symbol::v);
  return {diff(qu, Symbol::u), diff(qu, Symbol::v), diff(qv, Symbol::v)};
}

Subclass classify(const SecondPartials& p) {
  const bool uu = is_zero(p.quu);
  const bool uv = is_zero(p.quv);
  const bool vv = is_zero(p.qvv);
  if (uu && uv && vv) return Subclass::S1;
  if (uu && vv && !uv) return Subclass::S2;
  if (!vv && !uv) return Subclass::S3;
  if (!uu && !uv && vv) return Subclass::S4;
  return Subclass::Outside;
}

Subclass classify(const EquationSpec& eq) { return classify(second_partials(eq)); }

AffineCoeffs extract_affine(const EquationSpec& eq) {
  if (Subclass s = classify(eq); s != Subclass::S2)
    throw Error(ErrorKind::NotS2, "equation is in " + std::string(to_string(s)) + ", not S2");
  const Expr q = eq.effective_q();
  const Expr zero = Expr::constant(Rational(0));
  const Expr qu = diff(q, Symbol::u);
  const Expr qv = diff(q, Symbol::v);
  AffineCoeffs out;
  out.a = simplify(substitute(qu, Symbol::v, zero));
  out.b = simplify(substitute(qv, Symbol::u, zero));
  out.c = diff(qu, Symbol::v);
  out.d = simplify(substitute(substitute(q, Symbol::u, zero), Symbol::v, zero));
  return out;
}

}  // namespace kdveq
