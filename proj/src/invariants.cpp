#include "kdveq/invariants.hpp"

#include <array>

#include "kdveq/calculus.hpp"
#include "kdveq/errors.hpp"

namespace kdveq {

namespace {

/// Partials of Q(u, v) up to third order.
struct QPartials {
  Expr u, v;
  Expr uu, uv, vv;
  Expr uuu, uuv, uvv, vvv;

  explicit QPartials(const Expr& q)
      : u(diff(q, Symbol::u)),
        v(diff(q, Symbol::v)),
        uu(diff(u, Symbol::u)),
        uv(diff(u, Symbol::v)),
        vv(diff(v, Symbol::v)),
        uuu(diff(uu, Symbol::u)),
        uuv(diff(uu, Symbol::v)),
        uvv(diff(uv, Symbol::v)),
        vvv(diff(vv, Symbol::v)) {}
};

const Expr U = sym(Symbol::u);
const Expr V = sym(Symbol::v);
const Expr W = sym(Symbol::w);
const Expr Ut = sym(Symbol::u_t);
const Expr Vt = sym(Symbol::v_t);

Expr p(const Expr& x, long long n) { return pow(x, Rational(n)); }

std::vector<NamedInvariant> s2_invariants(const EquationSpec& eq) {
  AffineCoeffs k = extract_affine(eq);
  const Expr& A = k.a;
  const Expr& B = k.b;
  const Expr& C = k.c;
  return {
      {"I1", W * pow(C * p(V, 2), Rational(-1, 3))},
      {"I2", -(B * W + C * U * V + Vt) / (C * p(V, 2))},
      {"I3", A / (C * V)},
  };
}

std::vector<NamedInvariant> s3_invariants(const QPartials& q, const InvariantOptions& opt) {
  Expr l2_den = opt.use_alternates ? p(q.v, 8) : p(q.vv, 4);
  Expr l4_lead = opt.use_alternates ? W : U;
  return {
      {"L1", q.uvv * q.uv / p(q.vv, 3)},
      {"L2", q.vvv * p(q.uv, 2) / l2_den},
      {"L3", q.u * p(q.v, 2) / p(q.uv, 3)},
      {"L4", q.vv * (l4_lead * q.v * q.uuv + Ut * q.uuv + W * q.v * q.uvv + Vt * q.uvv) /
                 p(q.uv, 4)},
      {"L5", p(q.vv, 2) * (V * q.v * q.uvv + Ut * q.uvv + W * q.v * q.vvv + Vt * q.vvv) /
                 p(q.uv, 3)},
      {"L6", q.vv * (U * q.uuv + V * q.uvv) / p(q.uv, 2)},
      {"L7", (W * q.vvv + V * q.uvv) / q.uv},
      {"L8", q.uuv / p(q.vv, 2)},
      {"L9", p(q.vv, 3) * (W * q.vv + V * q.uv) / p(q.uv, 3)},
      {"L10", p(q.vv, 4) * (W * q.uv + V * q.uu) / p(q.uv, 4)},
      {"L11", q.vv * q.uu / p(q.uv, 2)},
  };
}

std::vector<NamedInvariant> s4_invariants(const QPartials& q) {
  return {
      {"M1", q.uuv * p(q.uu, 2) / p(q.uv, 4)},
      {"M2", q.uuv * p(q.uv, 2) * (V * q.v + Ut) / p(q.uu, 3)},
      {"M3", p(q.uv, 3) * (Vt * q.uuv + V * q.v * q.uuu + W * q.v * q.uuv + Ut * q.uuu) /
                 p(q.uu, 4)},
      {"M4", q.u * p(q.uv, 3) / p(q.uu, 3)},
      {"M5", q.uv * (V * q.uuu + W * q.uuv) / p(q.uu, 2)},
      {"M6", V * q.uuv / q.uu},
      {"M7", q.uu * q.uuu / p(q.uv, 3)},
      {"M8", V * p(q.uv, 4) / p(q.uu, 3)},
      {"M9", W * p(q.uv, 5) / p(q.uu, 4)},
  };
}

const AlternateReading kAlternates[] = {
    {"L2", "Q_vvv*Q_uv^2/(Q_vv)^4", "Q_vvv*Q_uv^2/(Q_v)^8"},
    {"L4", "Q_vv*(u*Q_v*Q_uuv + u_t*Q_uuv + w*Q_v*Q_uvv + v_t*Q_uvv)/Q_uv^4",
     "Q_vv*(w*Q_v*Q_uuv + u_t*Q_uuv + w*Q_v*Q_uvv + v_t*Q_uvv)/Q_uv^4"},
};

}  // namespace

std::span<const AlternateReading> alternate_readings() { return kAlternates; }

InvariantSet invariants_for(const EquationSpec& eq, InvariantOptions options) {
  InvariantSet out;
  out.subclass = classify(eq);
  switch (out.subclass) {
    case Subclass::S1:
      break;
    case Subclass::S2:
      out.items = s2_invariants(eq);
      break;
    case Subclass::S3:
      out.items = s3_invariants(QPartials(eq.effective_q()), options);
      break;
    case Subclass::S4:
      out.items = s4_invariants(QPartials(eq.effective_q()));
      break;
    case Subclass::Outside:
      throw Error(ErrorKind::OutsideSubclass,
                  "equation lies outside S1..S4 (Quv = 0 with Quu or Qvv nonzero)");
  }
  for (NamedInvariant& item : out.items) item.value = simplify(item.value);
  return out;
}

InvariantMap::InvariantMap(const InvariantSet& set) : set_(set) {
  for (const NamedInvariant& item : set_.items) {
    for (Symbol s : kParameterSymbols) {
      if (item.value.contains(s))
        throw Error(ErrorKind::UnboundParameter,
                    "invariant " + item.name + " depends on unbound parameter '" +
                        std::string(surface_name(s)) + "'");
    }
    values_.emplace_back(item.value, kSingularThreshold);
    for (Symbol s : kJetSymbols) {
      partials_.push_back(diff(item.value, s));
      compiled_partials_.emplace_back(partials_.back(), kSingularThreshold);
    }
  }
}

Eigen::VectorXd InvariantMap::values(const JetPoint& pt) const {
  const auto x = pt.as_array();
  Eigen::VectorXd out(static_cast<Eigen::Index>(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = values_[i](std::span<const double, 5>(x));
  return out;
}

Eigen::MatrixXd InvariantMap::jacobian(const JetPoint& pt) const {
  const auto x = pt.as_array();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(values_.size()), 5);
  for (std::size_t i = 0; i < values_.size(); ++i)
    for (std::size_t j = 0; j < 5; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          compiled_partials_[i * 5 + j](std::span<const double, 5>(x));
  return out;
}

std::vector<double> eval_invariants(const InvariantSet& set, const JetPoint& pt) {
  std::vector<double> out;
  const auto x = pt.as_array();
  for (const NamedInvariant& item : set.items) {
    for (Symbol s : kParameterSymbols) {
      if (item.value.contains(s))
        throw Error(ErrorKind::UnboundParameter,
                    "invariant " + item.name + " depends on unbound parameter '" +
                        std::string(surface_name(s)) + "'");
    }
    out.push_back(CompiledExpr(item.value, kSingularThreshold)(std::span<const double, 5>(x)));
  }
  return out;
}

}  // namespace kdveq
