#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kdveq/invariants.hpp"

namespace kdveq {

struct Interval {
  double lo = 0.5;
  double hi = 2.0;
};

struct SampleConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  /// Sampling box in JetPoint order; optimizer starts are drawn from it too.
  std::array<Interval, 5> box{};
  double rank_tol = 1e-8;
  double overlap_tol = 1e-6;
  std::size_t starts = 16;
  std::size_t max_iterations = 200;
  /// Worker threads; 0 means hardware concurrency. Results never depend on it.
  unsigned threads = 1;
};

/// Rejection filtering must leave at least this many accepted points.
inline constexpr std::size_t kMinAcceptedSamples = 10;

enum class Verdict { Equivalent, Inequivalent, Inconclusive };
enum class VerdictReason { SubclassMismatch, BothS1, RankMismatch, OverlapPassed, OverlapFailed };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(VerdictReason r) noexcept;

struct EquivalenceVerdict {
  Verdict verdict = Verdict::Inconclusive;
  VerdictReason reason = VerdictReason::OverlapFailed;
  Subclass subclass_a = Subclass::S1;
  Subclass subclass_b = Subclass::S1;
  int rank_a = 0;
  int rank_b = 0;
  std::optional<double> residual_ab;
  std::optional<double> residual_ba;
  std::size_t samples_used = 0;

  /// Subclass and rank verdicts rest on symbolic zero tests; overlap
  /// verdicts are numerical evidence only.
  [[nodiscard]] bool numerically_supported() const noexcept {
    return reason == VerdictReason::OverlapPassed || reason == VerdictReason::OverlapFailed;
  }
};

/// Entry (i, j) is d(item i)/d(jet coordinate j) at p.
Eigen::MatrixXd invariant_jacobian(const InvariantSet& set, const JetPoint& p);

/// Numerical rank: singular values above rank_tol times the largest one.
int numerical_rank(const Eigen::MatrixXd& m, double rank_tol);

/// Accepted jet points drawn uniformly from cfg.box, one substream per
/// candidate index; singular candidates are skipped, up to 10x oversampling.
/// Throws Error(InsufficientSamples) below kMinAcceptedSamples.
std::vector<JetPoint> sample_jet_points(const InvariantMap& map, const SampleConfig& cfg);

/// Maximum Jacobian rank over the accepted sample points (0 for S1).
int rank_signature(const EquationSpec& eq, const SampleConfig& cfg);
int rank_signature(const InvariantMap& map, const SampleConfig& cfg);

using InvariantTuple = std::vector<double>;

std::vector<InvariantTuple> sample_classifying(const EquationSpec& eq, const SampleConfig& cfg);
std::vector<InvariantTuple> sample_classifying(const InvariantMap& map, const SampleConfig& cfg);

/// Result of minimizing |F(p) - y| for one target tuple.
struct LocalFit {
  JetPoint point;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Multi-start damped Gauss-Newton with backtracking line search. Starts come
/// from cfg.box via substreams of (seed, tuple_index, start).
LocalFit fit_point(const InvariantMap& target, const InvariantTuple& y, std::size_t tuple_index,
                   const SampleConfig& cfg);

/// Maximum over tuples of the smallest residual found. Throws
/// Error(ArityMismatch) if a tuple's length differs from the target's
/// invariant count.
double overlap_residual(const std::vector<InvariantTuple>& points, const EquationSpec& target,
                        const SampleConfig& cfg);
double overlap_residual(const std::vector<InvariantTuple>& points, const InvariantMap& target,
                        const SampleConfig& cfg);

/// Subclass -> both S1 -> rank signature -> bidirectional overlap.
/// Throws Error(OutsideSubclass), Error(UnboundParameter),
/// Error(InsufficientSamples).
EquivalenceVerdict decide_equivalence(const EquationSpec& a, const EquationSpec& b,
                                      const SampleConfig& cfg);

}  // namespace kdveq
