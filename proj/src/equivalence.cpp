#include "kdveq/equivalence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "kdveq/errors.hpp"
#include "kdveq/random.hpp"

namespace kdveq {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Equivalent: return "Equivalent";
    case Verdict::Inequivalent: return "Inequivalent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(VerdictReason r) noexcept {
  switch (r) {
    case VerdictReason::SubclassMismatch: return "SubclassMismatch";
    case VerdictReason::BothS1: return "BothS1";
    case VerdictReason::RankMismatch: return "RankMismatch";
    case VerdictReason::OverlapPassed: return "OverlapPassed";
    case VerdictReason::OverlapFailed: return "OverlapFailed";
  }
  return "OverlapFailed";
}

namespace {

// Substream domains.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kStartStream = 2;

/// Runs body(i) for i in [0, n). Each index is handled exactly once; the
/// first exception is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

JetPoint draw_point(std::uint64_t stream_seed, const std::array<Interval, 5>& box) {
  std::mt19937_64 gen(stream_seed);
  std::array<double, 5> x{};
  for (std::size_t j = 0; j < 5; ++j) x[j] = box[j].lo + (box[j].hi - box[j].lo) * unit_interval(gen());
  return JetPoint::from_array(x);
}

bool is_singular_kind(ErrorKind k) {
  return k == ErrorKind::SingularPoint || k == ErrorKind::DivisionByZero || k == ErrorKind::Domain;
}

/// 0.5 |F(p) - y|^2, or +inf where F is not defined.
double objective(const InvariantMap& map, const JetPoint& p, const Eigen::VectorXd& y,
                 Eigen::VectorXd* residual = nullptr) {
  try {
    Eigen::VectorXd r = map.values(p) - y;
    if (!r.allFinite()) return std::numeric_limits<double>::infinity();
    if (residual) *residual = r;
    return 0.5 * r.squaredNorm();
  } catch (const Error& e) {
    if (is_singular_kind(e.kind())) return std::numeric_limits<double>::infinity();
    throw;
  }
}

JetPoint shifted(const JetPoint& p, const Eigen::Matrix<double, 5, 1>& step, double t) {
  auto x = p.as_array();
  for (std::size_t j = 0; j < 5; ++j) x[j] += t * step[static_cast<Eigen::Index>(j)];
  return JetPoint::from_array(x);
}

/// Damped Gauss-Newton descent from one start; returns the final point.
LocalFit descend(const InvariantMap& map, const Eigen::VectorXd& y, JetPoint p,
                 std::size_t max_iterations) {
  constexpr double kConverged = 1e-28;  // 0.5 |r|^2, i.e. |r| ~ 1.4e-14
  constexpr double kArmijo = 1e-4;
  LocalFit fit{p, std::numeric_limits<double>::infinity(), 0};
  Eigen::VectorXd r;
  double f = objective(map, p, y, &r);
  if (!std::isfinite(f)) return fit;
  double damping = 1e-3;
  std::size_t it = 0;
  for (; it < max_iterations && f > kConverged; ++it) {
    Eigen::MatrixXd jac;
    try {
      jac = map.jacobian(p);
    } catch (const Error& e) {
      if (!is_singular_kind(e.kind())) throw;
      break;
    }
    if (!jac.allFinite()) break;
    const Eigen::Matrix<double, 5, 5> normal = jac.transpose() * jac;
    const Eigen::Matrix<double, 5, 1> gradient = jac.transpose() * r;
    if (gradient.norm() == 0.0) break;
    bool improved = false;
    while (!improved && damping < 1e12) {
      const double diag_scale = std::max(normal.diagonal().maxCoeff(), 1e-12);
      Eigen::Matrix<double, 5, 5> lhs = normal;
      lhs.diagonal().array() += damping * diag_scale;
      Eigen::Matrix<double, 5, 1> step = lhs.ldlt().solve(-gradient);
      double slope = gradient.dot(step);
      if (!step.allFinite() || slope >= 0.0) {
        damping *= 10.0;
        continue;
      }
      double t = 1.0;
      for (int k = 0; k < 40; ++k, t *= 0.5) {
        JetPoint trial = shifted(p, step, t);
        Eigen::VectorXd trial_r;
        double trial_f = objective(map, trial, y, &trial_r);
        if (trial_f <= f + kArmijo * t * slope) {
          p = trial;
          r = std::move(trial_r);
          f = trial_f;
          improved = true;
          break;
        }
      }
      damping = improved ? (t == 1.0 ? std::max(damping / 3.0, 1e-12) : damping) : damping * 10.0;
    }
    if (!improved) break;
  }
  fit.point = p;
  fit.residual = std::sqrt(2.0 * f);
  fit.iterations = it;
  return fit;
}

}  // namespace

Eigen::MatrixXd invariant_jacobian(const InvariantSet& set, const JetPoint& p) {
  return InvariantMap(set).jacobian(p);
}

int numerical_rank(const Eigen::MatrixXd& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol * sv[0]) ++rank;
  return rank;
}

std::vector<JetPoint> sample_jet_points(const InvariantMap& map, const SampleConfig& cfg) {
  if (cfg.samples == 0) throw Error(ErrorKind::InsufficientSamples, "samples must be at least 1");
  const std::size_t budget = 10 * cfg.samples;
  std::vector<JetPoint> accepted;
  accepted.reserve(cfg.samples);
  // Candidates are screened in blocks; acceptance follows index order.
  for (std::size_t start = 0; start < budget && accepted.size() < cfg.samples;) {
    const std::size_t block = std::min(budget - start, cfg.samples - accepted.size());
    std::vector<JetPoint> candidates(block);
    std::vector<char> ok(block, 0);
    parallel_for(block, cfg.threads, [&](std::size_t k) {
      const std::uint64_t index = start + k;
      candidates[k] = draw_point(substream_seed(cfg.seed, {kSampleStream, index}), cfg.box);
      try {
        Eigen::VectorXd v = map.values(candidates[k]);
        Eigen::MatrixXd j = map.jacobian(candidates[k]);
        ok[k] = v.allFinite() && j.allFinite();
      } catch (const Error& e) {
        if (!is_singular_kind(e.kind())) throw;
      }
    });
    for (std::size_t k = 0; k < block && accepted.size() < cfg.samples; ++k)
      if (ok[k]) accepted.push_back(candidates[k]);
    start += block;
  }
  if (accepted.size() < std::min(kMinAcceptedSamples, cfg.samples))
    throw Error(ErrorKind::InsufficientSamples,
                "only " + std::to_string(accepted.size()) + " nonsingular sample points in the box");
  return accepted;
}

namespace {

int max_rank(const InvariantMap& map, const std::vector<JetPoint>& points,
             const SampleConfig& cfg) {
  if (map.size() == 0 || points.empty()) return 0;
  std::vector<int> ranks(points.size(), 0);
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    ranks[i] = numerical_rank(map.jacobian(points[i]), cfg.rank_tol);
  });
  return *std::max_element(ranks.begin(), ranks.end());
}

std::vector<InvariantTuple> values_at(const InvariantMap& map, const std::vector<JetPoint>& points,
                                      const SampleConfig& cfg) {
  std::vector<InvariantTuple> out(points.size());
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    Eigen::VectorXd v = map.values(points[i]);
    out[i].assign(v.data(), v.data() + v.size());
  });
  return out;
}

}  // namespace

int rank_signature(const InvariantMap& map, const SampleConfig& cfg) {
  if (map.size() == 0) return 0;
  return max_rank(map, sample_jet_points(map, cfg), cfg);
}

int rank_signature(const EquationSpec& eq, const SampleConfig& cfg) {
  return rank_signature(InvariantMap(invariants_for(eq)), cfg);
}

std::vector<InvariantTuple> sample_classifying(const InvariantMap& map, const SampleConfig& cfg) {
  if (map.size() == 0) return std::vector<InvariantTuple>(cfg.samples);
  return values_at(map, sample_jet_points(map, cfg), cfg);
}

std::vector<InvariantTuple> sample_classifying(const EquationSpec& eq, const SampleConfig& cfg) {
  return sample_classifying(InvariantMap(invariants_for(eq)), cfg);
}

LocalFit fit_point(const InvariantMap& target, const InvariantTuple& y, std::size_t tuple_index,
                   const SampleConfig& cfg) {
  if (y.size() != target.size())
    throw Error(ErrorKind::ArityMismatch, "tuple has " + std::to_string(y.size()) +
                                              " components, target has " +
                                              std::to_string(target.size()) + " invariants");
  const Eigen::VectorXd goal = Eigen::Map<const Eigen::VectorXd>(
      y.data(), static_cast<Eigen::Index>(y.size()));
  LocalFit best{{}, std::numeric_limits<double>::infinity(), 0};
  if (target.size() == 0) {
    best.residual = 0.0;
    return best;
  }
  for (std::size_t s = 0; s < std::max<std::size_t>(cfg.starts, 1); ++s) {
    JetPoint start = draw_point(
        substream_seed(cfg.seed, {kStartStream, static_cast<std::uint64_t>(tuple_index), s}),
        cfg.box);
    LocalFit fit = descend(target, goal, start, cfg.max_iterations);
    if (fit.residual < best.residual) best = fit;
    if (best.residual <= cfg.overlap_tol * 1e-3) break;
  }
  return best;
}

double overlap_residual(const std::vector<InvariantTuple>& points, const InvariantMap& target,
                        const SampleConfig& cfg) {
  for (const InvariantTuple& y : points)
    if (y.size() != target.size())
      throw Error(ErrorKind::ArityMismatch, "tuple has " + std::to_string(y.size()) +
                                                " components, target has " +
                                                std::to_string(target.size()) + " invariants");
  std::vector<double> residuals(points.size(), 0.0);
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    residuals[i] = fit_point(target, points[i], i, cfg).residual;
  });
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::isnan(r) ? std::numeric_limits<double>::infinity() : r);
  return worst;
}

double overlap_residual(const std::vector<InvariantTuple>& points, const EquationSpec& target,
                        const SampleConfig& cfg) {
  return overlap_residual(points, InvariantMap(invariants_for(target)), cfg);
}

EquivalenceVerdict decide_equivalence(const EquationSpec& a, const EquationSpec& b,
                                      const SampleConfig& cfg) {
  EquivalenceVerdict out;
  const InvariantSet set_a = invariants_for(a);
  const InvariantSet set_b = invariants_for(b);
  out.subclass_a = set_a.subclass;
  out.subclass_b = set_b.subclass;
  const InvariantMap map_a(set_a);
  const InvariantMap map_b(set_b);
  const std::vector<JetPoint> jets_a = sample_jet_points(map_a, cfg);
  const std::vector<JetPoint> jets_b = sample_jet_points(map_b, cfg);
  out.samples_used = std::min(jets_a.size(), jets_b.size());
  out.rank_a = max_rank(map_a, jets_a, cfg);
  out.rank_b = max_rank(map_b, jets_b, cfg);

  if (out.subclass_a != out.subclass_b) {
    out.verdict = Verdict::Inequivalent;
    out.reason = VerdictReason::SubclassMismatch;
    return out;
  }
  if (out.subclass_a == Subclass::S1) {
    out.verdict = Verdict::Equivalent;
    out.reason = VerdictReason::BothS1;
    return out;
  }
  if (out.rank_a != out.rank_b) {
    out.verdict = Verdict::Inequivalent;
    out.reason = VerdictReason::RankMismatch;
    return out;
  }
  const std::vector<InvariantTuple> points_a = values_at(map_a, jets_a, cfg);
  const std::vector<InvariantTuple> points_b = values_at(map_b, jets_b, cfg);
  out.residual_ab = overlap_residual(points_a, map_b, cfg);
  out.residual_ba = overlap_residual(points_b, map_a, cfg);
  if (*out.residual_ab <= cfg.overlap_tol && *out.residual_ba <= cfg.overlap_tol) {
    out.verdict = Verdict::Equivalent;
    out.reason = VerdictReason::OverlapPassed;
  } else if (*out.residual_ab > 100.0 * cfg.overlap_tol ||
             *out.residual_ba > 100.0 * cfg.overlap_tol) {
    out.verdict = Verdict::Inequivalent;
    out.reason = VerdictReason::OverlapFailed;
  } else {
    out.verdict = Verdict::Inconclusive;
    out.reason = VerdictReason::OverlapFailed;
  }
  return out;
}

}  // namespace kdveq
