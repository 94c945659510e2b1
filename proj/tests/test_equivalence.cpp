#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "helpers.hpp"
#include "kdveq/corpus.hpp"
#include "kdveq/equivalence.hpp"
#include "kdveq/errors.hpp"
#include "kdveq/random.hpp"

using namespace kdveq;

namespace {

EquationSpec eq(std::string_view q) { return EquationSpec::from_text(q); }

SampleConfig config(std::uint64_t seed = 1) {
  SampleConfig cfg;
  cfg.seed = seed;
  return cfg;
}

// Rank from finite-difference Jacobians of the invariant values, maximized
// over the same number of independently drawn points.
int brute_force_rank(const EquationSpec& e, std::size_t points, std::uint64_t seed) {
  const InvariantSet set = invariants_for(e);
  if (set.items.empty()) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  int best = 0;
  for (std::size_t n = 0; n < points; ++n) {
    std::array<double, 5> x{dist(rng), dist(rng), dist(rng), dist(rng), dist(rng)};
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(set.items.size()), 5);
    for (int j = 0; j < 5; ++j) {
      auto xp = x, xm = x;
      const double h = 1e-5;
      xp[j] += h;
      xm[j] -= h;
      const auto fp = eval_invariants(set, JetPoint::from_array(xp));
      const auto fm = eval_invariants(set, JetPoint::from_array(xm));
      for (std::size_t i = 0; i < fp.size(); ++i)
        jac(static_cast<Eigen::Index>(i), j) = (fp[i] - fm[i]) / (2 * h);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    lu.setThreshold(1e-6);
    best = std::max(best, static_cast<int>(lu.rank()));
  }
  return best;
}

}  // namespace

TEST(Random, SubstreamsAreStableAndDistinct) {
  EXPECT_EQ(substream_seed(7, {1, 2}), substream_seed(7, {1, 2}));
  EXPECT_NE(substream_seed(7, {1, 2}), substream_seed(7, {2, 1}));
  EXPECT_NE(substream_seed(7, {1}), substream_seed(8, {1}));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double x = unit_interval(mix64(i));
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Jacobian, KdvRows) {
  const Eigen::MatrixXd j = invariant_jacobian(invariants_for(eq("u*ux")), {1, 1, 1, 0, 0});
  ASSERT_EQ(j.rows(), 3);
  const double i1[5] = {0, -2.0 / 3.0, 1, 0, 0};
  for (int c = 0; c < 5; ++c) {
    EXPECT_NEAR(j(0, c), i1[c], 1e-12);
    EXPECT_EQ(j(2, c), 0.0);
  }
}

TEST(Jacobian, ForcedKdvThirdRow) {
  const Eigen::MatrixXd j = invariant_jacobian(invariants_for(eq("u + u*ux")), {1, 1, 1, 0, 0});
  const double i3[5] = {0, -1, 0, 0, 0};
  for (int c = 0; c < 5; ++c) EXPECT_NEAR(j(2, c), i3[c], 1e-12);
}

TEST(Rank, Examples) {
  EXPECT_EQ(rank_signature(eq("u*ux"), config()), 2);
  EXPECT_EQ(rank_signature(eq("u + u*ux"), config()), 3);
  EXPECT_EQ(rank_signature(eq("0"), config()), 0);
}

TEST(Rank, AgreesWithBruteForceOracle) {
  for (const CorpusEntry& e : builtin_corpus()) {
    if (e.expected_subclass == Subclass::Outside) continue;
    EXPECT_EQ(rank_signature(e.equation(), config(3)), brute_force_rank(e.equation(), 200, 99)) << e.id;
  }
}

TEST(Rank, NeverExceedsBounds) {
  for (const CorpusEntry& e : builtin_corpus()) {
    if (e.expected_subclass == Subclass::Outside) continue;
    const int r = rank_signature(e.equation(), config());
    const auto n = static_cast<int>(invariants_for(e.equation()).items.size());
    EXPECT_LE(r, std::min(n, 5)) << e.id;
    EXPECT_GE(r, 0);
  }
}

TEST(NumericalRank, Thresholding) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 0, 0, 0, 1e-3, 0, 0, 0, 1e-12;
  EXPECT_EQ(numerical_rank(m, 1e-8), 2);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(2, 5), 1e-8), 0);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd(0, 5), 1e-8), 0);
}

TEST(Sampling, Examples) {
  const auto s1 = sample_classifying(eq("0"), config());
  EXPECT_EQ(s1.size(), 200u);
  for (const auto& t : s1) EXPECT_TRUE(t.empty());

  const auto kdv = sample_classifying(eq("u*ux"), config(7));
  EXPECT_EQ(kdv, sample_classifying(eq("u*ux"), config(7)));
  EXPECT_NE(kdv, sample_classifying(eq("u*ux"), config(8)));
  for (const auto& t : kdv) {
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[2], 0.0);
  }

  const auto mkdv = sample_classifying(eq("u^2*ux"), config(7));
  for (const auto& t : mkdv) {
    ASSERT_EQ(t.size(), 9u);
    EXPECT_EQ(t[6], 0.0);
  }
}

TEST(Sampling, PointsStayInBoxAndIgnoreThreadCount) {
  const InvariantMap map(invariants_for(eq("u^2*ux")));
  SampleConfig one = config(5);
  SampleConfig many = config(5);
  many.threads = 4;
  const auto a = sample_jet_points(map, one);
  const auto b = sample_jet_points(map, many);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].as_array(), b[i].as_array());
    for (double x : a[i].as_array()) {
      EXPECT_GE(x, 0.5);
      EXPECT_LE(x, 2.0);
    }
  }
}

TEST(Sampling, RejectsSingularBoxes) {
  SampleConfig cfg = config();
  cfg.box[1] = {0.0, 0.0};
  try {
    (void)sample_classifying(eq("u*ux"), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientSamples);
  }
  // Sampling of S1 never evaluates anything, so nothing is rejected.
  EXPECT_EQ(sample_classifying(eq("0"), cfg).size(), cfg.samples);
}

TEST(Overlap, SelfOverlapIsExact) {
  const auto pts = sample_classifying(eq("u*ux"), config(2));
  EXPECT_LE(overlap_residual(pts, eq("u*ux"), config(2)), 1e-9);
}

TEST(Overlap, ScalingOracle) {
  const auto pts = sample_classifying(eq("u*ux"), config(7));
  EXPECT_LE(overlap_residual(pts, eq("2*u*ux"), config(7)), 1e-6);
  const auto back = sample_classifying(eq("2*u*ux"), config(7));
  EXPECT_LE(overlap_residual(back, eq("u*ux"), config(7)), 1e-6);
}

TEST(Overlap, ForcedKdvDoesNotFitKdv) {
  SampleConfig cfg = config(4);
  cfg.samples = 40;
  const auto pts = sample_classifying(eq("u + u*ux"), cfg);
  for (const auto& t : pts) ASSERT_GT(std::abs(t[2]), 0.1);
  EXPECT_GT(overlap_residual(pts, eq("u*ux"), cfg), 0.1);
}

TEST(Overlap, ArityMismatch) {
  const auto pts = sample_classifying(eq("u*ux"), config());
  try {
    (void)overlap_residual(pts, eq("u^2*ux"), config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
}

TEST(Decide, Examples) {
  auto v = decide_equivalence(eq("0"), eq("u"), config());
  EXPECT_EQ(v.verdict, Verdict::Equivalent);
  EXPECT_EQ(v.reason, VerdictReason::BothS1);
  EXPECT_FALSE(v.numerically_supported());

  v = decide_equivalence(eq("u*ux"), eq("u^2*ux"), config());
  EXPECT_EQ(v.verdict, Verdict::Inequivalent);
  EXPECT_EQ(v.reason, VerdictReason::SubclassMismatch);
  EXPECT_EQ(v.subclass_a, Subclass::S2);
  EXPECT_EQ(v.subclass_b, Subclass::S4);

  v = decide_equivalence(eq("u*ux"), eq("2*u*ux"), config(7));
  EXPECT_EQ(v.verdict, Verdict::Equivalent);
  EXPECT_EQ(v.reason, VerdictReason::OverlapPassed);
  ASSERT_TRUE(v.residual_ab && v.residual_ba);
  EXPECT_LE(*v.residual_ab, 1e-6);
  EXPECT_LE(*v.residual_ba, 1e-6);
  EXPECT_TRUE(v.numerically_supported());

  v = decide_equivalence(eq("u*ux"), eq("u + u*ux"), config());
  EXPECT_EQ(v.verdict, Verdict::Inequivalent);
  EXPECT_EQ(v.reason, VerdictReason::RankMismatch);
  EXPECT_EQ(v.rank_a, 2);
  EXPECT_EQ(v.rank_b, 3);
}

TEST(Decide, OutsideIsAnError) {
  try {
    (void)decide_equivalence(eq("u*ux"), eq("u^2"), config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutsideSubclass);
  }
}

TEST(Decide, ReflexiveOnCorpus) {
  for (const CorpusEntry& e : builtin_corpus()) {
    if (e.expected_subclass == Subclass::Outside) continue;
    const auto v = decide_equivalence(e.equation(), e.equation(), config());
    EXPECT_EQ(v.verdict, Verdict::Equivalent) << e.id << " " << to_string(v.reason);
  }
}

TEST(Decide, SymmetricOnCorpus) {
  const auto& corpus = builtin_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].expected_subclass == Subclass::Outside) continue;
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      if (corpus[j].expected_subclass == Subclass::Outside) continue;
      const auto ab = decide_equivalence(corpus[i].equation(), corpus[j].equation(), config());
      const auto ba = decide_equivalence(corpus[j].equation(), corpus[i].equation(), config());
      EXPECT_EQ(ab.verdict, ba.verdict) << corpus[i].id << " vs " << corpus[j].id;
    }
  }
}

TEST(Decide, ScalingFamilyNeverRejectedSymbolically) {
  // u -> lambda u maps Q(u, ux) to lambda Q(u/lambda, ux/lambda).
  for (const CorpusEntry& e : builtin_corpus()) {
    if (e.expected_subclass != Subclass::S2) continue;
    for (const char* lambda : {"1/2", "2"}) {
      const std::string scaled = "(" + std::string(lambda) + ")*(" + e.q_text + ")";
      Expr q = parse_expr(scaled);
      q = substitute(q, Symbol::u, sym(Symbol::u) / parse_expr(lambda));
      q = substitute(q, Symbol::v, sym(Symbol::v) / parse_expr(lambda));
      const EquationSpec b{q, e.params, false};
      const auto v = decide_equivalence(e.equation(), b, config(11));
      EXPECT_NE(v.reason, VerdictReason::SubclassMismatch) << e.id << " " << lambda;
      EXPECT_NE(v.reason, VerdictReason::RankMismatch) << e.id << " " << lambda;
      EXPECT_EQ(v.verdict, Verdict::Equivalent) << e.id << " " << lambda;
    }
  }
}

TEST(Decide, DeterministicAcrossThreadCounts) {
  SampleConfig a = config(7);
  SampleConfig b = config(7);
  b.threads = 4;
  SampleConfig c = config(7);
  c.threads = 0;
  const auto va = decide_equivalence(eq("u*ux"), eq("2*u*ux"), a);
  for (const SampleConfig& other : {b, c}) {
    const auto vb = decide_equivalence(eq("u*ux"), eq("2*u*ux"), other);
    EXPECT_EQ(va.residual_ab, vb.residual_ab);
    EXPECT_EQ(va.residual_ba, vb.residual_ba);
    EXPECT_EQ(va.samples_used, vb.samples_used);
  }
}
