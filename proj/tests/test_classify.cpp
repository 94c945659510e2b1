#include <gtest/gtest.h>

#include "helpers.hpp"
#include "kdveq/calculus.hpp"
#include "kdveq/classify.hpp"
#include "kdveq/corpus.hpp"
#include "kdveq/errors.hpp"

using namespace kdveq;
using kdveq::testkit::P;

namespace {

Subclass cls(std::string_view q) { return classify(EquationSpec::from_text(q)); }
Expr S(std::string_view text) { return simplify(P(text)); }

}  // namespace

TEST(SecondPartials, Examples) {
  auto check = [](std::string_view q, std::string_view uu, std::string_view uv, std::string_view vv) {
    SecondPartials p = second_partials(EquationSpec::from_text(q));
    EXPECT_EQ(simplify(p.quu), S(uu)) << q;
    EXPECT_EQ(simplify(p.quv), S(uv)) << q;
    EXPECT_EQ(simplify(p.qvv), S(vv)) << q;
  };
  check("u*ux", "0", "1", "0");
  check("u^2*ux", "2*ux", "2*u", "0");
  check("u*ux + ux^2", "0", "1", "2");
}

TEST(Classify, Examples) {
  EXPECT_EQ(cls("u*ux"), Subclass::S2);
  EXPECT_EQ(cls("u^2*ux"), Subclass::S4);
  EXPECT_EQ(cls("0"), Subclass::S1);
  EXPECT_EQ(cls("u^2"), Subclass::Outside);
  EXPECT_EQ(cls("ux^2"), Subclass::Outside);
  EXPECT_EQ(cls("u*ux + ux^2"), Subclass::S3);
  EXPECT_EQ(cls("u^2*ux^2"), Subclass::S3);
}

TEST(Classify, SubclassNamesRoundTrip) {
  for (Subclass s : {Subclass::S1, Subclass::S2, Subclass::S3, Subclass::S4, Subclass::Outside})
    EXPECT_EQ(subclass_from_string(to_string(s)), s);
  EXPECT_FALSE(subclass_from_string("S5").has_value());
}

TEST(Classify, ShiftInvariance) {
  for (const CorpusEntry& e : builtin_corpus()) {
    const Subclass base = classify(e.equation());
    for (std::string_view shift : {" + 7", " - 3/2", " + 2*u - 5*ux", " + (1/3)*ux"}) {
      EquationSpec shifted = EquationSpec::from_text("(" + e.q_text + ")" + std::string(shift), e.params);
      EXPECT_EQ(classify(shifted), base) << e.id << shift;
    }
  }
}

TEST(Classify, PartitionTruthTable) {
  const Expr zero = num(0);
  const Expr one = num(1);
  for (int mask = 0; mask < 8; ++mask) {
    SecondPartials p{(mask & 1) ? one : zero, (mask & 2) ? one : zero, (mask & 4) ? one : zero};
    const bool uu = !(mask & 1), uv = !(mask & 2), vv = !(mask & 4);
    int matches = 0;
    matches += uu && uv && vv;
    matches += uu && vv && !uv;
    matches += !vv && !uv;
    matches += !uu && !uv && vv;
    const Subclass s = classify(p);
    EXPECT_LE(matches, 1);
    EXPECT_EQ(s == Subclass::Outside, matches == 0) << mask;
  }
}

TEST(Classify, ParametersMustBeBound) {
  EXPECT_THROW(cls("C*u*ux"), Error);
  try {
    (void)cls("C*u*ux");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundParameter);
  }
  EXPECT_EQ(classify(EquationSpec::from_text("C*u*ux", {}, true)), Subclass::S2);
  EXPECT_EQ(classify(EquationSpec::from_text("C*u*ux", {{Symbol::C, Rational(2)}})), Subclass::S2);
  EXPECT_EQ(classify(EquationSpec::from_text("C*u*ux", {{Symbol::C, Rational(0)}})), Subclass::S1);
}

TEST(Classify, RejectsHigherJetSymbols) {
  for (std::string_view q : {"w*u", "u_t", "v_t + u*ux"}) {
    try {
      (void)cls(q);
      FAIL() << q;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidEquation) << q;
    }
  }
}

TEST(ExtractAffine, Examples) {
  auto check = [](std::string_view q, std::array<Rational, 4> abcd) {
    AffineCoeffs k = extract_affine(EquationSpec::from_text(q));
    EXPECT_EQ(simplify(k.a), Expr::constant(abcd[0])) << q;
    EXPECT_EQ(simplify(k.b), Expr::constant(abcd[1])) << q;
    EXPECT_EQ(simplify(k.c), Expr::constant(abcd[2])) << q;
    EXPECT_EQ(simplify(k.d), Expr::constant(abcd[3])) << q;
  };
  check("3*u + 2*ux + 5*u*ux + 7", {3, 2, 5, 7});
  check("u*ux", {0, 0, 1, 0});
  check("u + u*ux", {1, 0, 1, 0});
}

TEST(ExtractAffine, RoundTripOnS2Corpus) {
  int seen = 0;
  for (const CorpusEntry& e : builtin_corpus()) {
    if (e.expected_subclass != Subclass::S2) continue;
    const EquationSpec eq = e.equation();
    AffineCoeffs k = extract_affine(eq);
    const Expr u = sym(Symbol::u), v = sym(Symbol::v);
    EXPECT_TRUE(is_zero(eq.effective_q() - (k.a * u + k.b * v + k.c * u * v + k.d))) << e.id;
    ++seen;
  }
  EXPECT_GE(seen, 2);
}

TEST(ExtractAffine, SymbolicParameters) {
  AffineCoeffs k = extract_affine(EquationSpec::from_text("A*u + B*ux + C*u*ux + D", {}, true));
  EXPECT_EQ(print_expr(simplify(k.a)), "A");
  EXPECT_EQ(print_expr(simplify(k.b)), "B");
  EXPECT_EQ(print_expr(simplify(k.c)), "C");
  EXPECT_EQ(print_expr(simplify(k.d)), "D");
}

TEST(ExtractAffine, RejectsOtherSubclasses) {
  for (std::string_view q : {"0", "u^2*ux", "u*ux + ux^2"}) {
    try {
      (void)extract_affine(EquationSpec::from_text(q));
      FAIL() << q;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotS2);
    }
  }
}
