#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "kdveq/calculus.hpp"
#include "kdveq/corpus.hpp"
#include "kdveq/diagnostics.hpp"
#include "kdveq/errors.hpp"

using namespace kdveq;
using kdveq::testkit::P;

namespace {

Expr S(std::string_view text) { return simplify(P(text)); }

}  // namespace

TEST(Diff, Examples) {
  EXPECT_EQ(diff(P("u*ux"), Symbol::u), S("ux"));
  EXPECT_EQ(diff(P("u^2*ux"), Symbol::v), S("u^2"));
  EXPECT_EQ(diff(P("(C*ux^2)^(1/3)"), Symbol::v), S("(2/3)*C*ux*(C*ux^2)^(-2/3)"));
}

TEST(Diff, NonJetSymbols) {
  EXPECT_EQ(diff(P("w*u_t + v_t^2"), Symbol::v_t), S("2*v_t"));
  EXPECT_EQ(diff(P("A*u + B"), Symbol::A), S("u"));
  EXPECT_EQ(diff(P("u*ux"), Symbol::w), S("0"));
}

TEST(Simplify, Examples) {
  EXPECT_EQ(S("(u+ux)^2 - u^2 - 2*u*ux - ux^2"), num(0));
  EXPECT_EQ(S("u*ux - ux*u"), num(0));
  EXPECT_EQ(S("(C*ux^2)^(1/3)"), S("C^(1/3)*ux^(2/3)"));
  EXPECT_EQ(print_expr(S("(C*ux^2)^(1/3)")), "C^(1/3)*ux^(2/3)");
}

TEST(Simplify, PowersDoNotDistributeOverSums) {
  EXPECT_EQ(print_expr(S("(u + ux)^(1/2)")), "(u + ux)^(1/2)");
  EXPECT_EQ(print_expr(S("(u + ux)^(-1)*(u + ux)")), "1");
  EXPECT_EQ(S("(2*u + 2*ux)^(-1)"), S("(1/2)*(u + ux)^(-1)"));
}

TEST(Simplify, ConstantRadicals) {
  EXPECT_EQ(S("8^(1/3)"), num(2));
  EXPECT_EQ(S("2^(1/3)*2^(2/3)"), num(2));
  EXPECT_EQ(S("(4*u^2)^(1/2)"), S("2*u"));
  EXPECT_EQ(S("12^(1/2)"), S("2*3^(1/2)"));
}

TEST(Simplify, Idempotent) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    Expr s;
    try {
      s = simplify(testkit::random_expr(rng, 3));
    } catch (const Error&) {
      continue;
    }
    EXPECT_EQ(simplify(s), s) << print_expr(s);
  }
}

TEST(Simplify, PreservesValue) {
  std::mt19937_64 rng(22);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    Expr e = testkit::random_expr(rng, 3);
    Bindings b = testkit::random_bindings(rng);
    double ref;
    Expr s;
    try {
      ref = eval_expr(e, b);
      s = simplify(e);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(ref) || std::abs(ref) > 1e8) continue;
    EXPECT_TRUE(testkit::close(eval_expr(s, b), ref, 1e-9)) << print_expr(e) << " -> " << print_expr(s);
    ++checked;
  }
  EXPECT_GT(checked, 250);
}

TEST(IsZero, Examples) {
  EXPECT_TRUE(is_zero(P("u*ux - ux*u")));
  EXPECT_FALSE(is_zero(diff(diff(P("u^2*ux"), Symbol::u), Symbol::u)));
  EXPECT_TRUE(is_zero(P("(u+ux)^2 - u^2 - 2*u*ux - ux^2")));
  EXPECT_TRUE(take_diagnostics().empty());
}

TEST(IsZero, SoundnessAgainstProbes) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    Expr a;
    try {
      a = simplify(testkit::random_expr(rng, 2));
    } catch (const Error&) {
      continue;
    }
    // a - a in a scrambled shape is always zero.
    Expr e = Expr::sum({Expr::product({num(2), a}), Expr::product({num(-1), a}), -a});
    ZeroTest z = zero_test(e);
    EXPECT_TRUE(z.zero);
    EXPECT_FALSE(z.inconsistent);
    EXPECT_LE(z.max_relative, 1e-9);
  }
  EXPECT_TRUE(take_diagnostics().empty());
}

TEST(NumericPartial, Examples) {
  EXPECT_NEAR(numeric_partial(P("u^2"), Symbol::u, Bindings{{Symbol::u, 3}}, 1e-4), 6.0, 1e-7);
  EXPECT_NEAR(numeric_partial(P("u*ux"), Symbol::v, Bindings{{Symbol::u, 2}, {Symbol::v, 5}}, 1e-4),
              2.0, 1e-8);
  EXPECT_NEAR(numeric_partial(P("ux^(1/3)"), Symbol::v, Bindings{{Symbol::v, 8}}, 1e-4), 1.0 / 12.0,
              1e-7);
}

TEST(Diff, ClairautOnCorpus) {
  for (const CorpusEntry& e : builtin_corpus()) {
    Expr q = e.equation().effective_q();
    Expr uv = diff(diff(q, Symbol::u), Symbol::v);
    Expr vu = diff(diff(q, Symbol::v), Symbol::u);
    EXPECT_TRUE(is_zero(uv - vu)) << e.id;
  }
}

TEST(Diff, FiniteDifferenceOracleOnCorpus) {
  std::mt19937_64 rng(24);
  for (const CorpusEntry& e : builtin_corpus()) {
    Expr q = P(e.q_text);
    for (int i = 0; i < 100; ++i) {
      Bindings b = testkit::random_bindings(rng);
      for (Symbol s : kAllSymbols) {
        const double exact = eval_expr(diff(q, s), b);
        const double fd = numeric_partial(q, s, b, 1e-4);
        EXPECT_LE(std::abs(exact - fd), 1e-5 * (1 + std::abs(exact))) << e.id << " d/d" << surface_name(s);
      }
    }
  }
}

TEST(Diff, FiniteDifferenceOracleOnRandomExpressions) {
  std::mt19937_64 rng(25);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Expr e = testkit::random_expr(rng, 2);
    Bindings b = testkit::random_bindings(rng);
    for (Symbol s : {Symbol::u, Symbol::v, Symbol::C}) {
      double exact, fd;
      try {
        exact = eval_expr(diff(e, s), b);
        fd = numeric_partial(e, s, b, 1e-4);
      } catch (const Error&) {
        continue;
      }
      if (!std::isfinite(exact) || std::abs(exact) > 1e4) continue;
      EXPECT_LE(std::abs(exact - fd), 1e-4 * (1 + std::abs(exact))) << print_expr(e);
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}
