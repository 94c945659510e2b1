#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kdveq/classify.hpp"

namespace kdveq {

/// First-order jet coordinates of the system u_x = v, v_x = w,
/// w_x = u_t + Q(u, v).
struct JetPoint {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double u_t = 0.0;
  double v_t = 0.0;

  [[nodiscard]] std::array<double, 5> as_array() const { return {u, v, w, u_t, v_t}; }
  static JetPoint from_array(std::span<const double, 5> x) {
    return {x[0], x[1], x[2], x[3], x[4]};
  }
};

/// Denominators smaller than this in magnitude make a point singular.
inline constexpr double kSingularThreshold = 1e-6;

struct NamedInvariant {
  std::string name;
  Expr value;
};

/// S1: empty. S2: I1..I3. S3: L1..L11. S4: M1..M9.
struct InvariantSet {
  Subclass subclass = Subclass::S1;
  std::vector<NamedInvariant> items;
};

struct InvariantOptions {
  /// Swap in the alternate readings of the typographically doubtful formulas
  /// (see alternate_readings()).
  bool use_alternates = false;
};

struct AlternateReading {
  std::string name;
  std::string printed;
  std::string alternate;
};

/// Inert table of alternate readings; consulted only with use_alternates.
std::span<const AlternateReading> alternate_readings();

/// Throws Error(OutsideSubclass) for equations outside S1..S4.
InvariantSet invariants_for(const EquationSpec& eq, InvariantOptions options = {});

/// Compiled values and jet-coordinate Jacobian of an invariant set. Safe to
/// share between threads.
class InvariantMap {
 public:
  /// Throws Error(UnboundParameter) if any invariant mentions A..D.
  explicit InvariantMap(const InvariantSet& set);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const InvariantSet& set() const noexcept { return set_; }

  /// Throws Error(SingularPoint) naming the offending denominator.
  [[nodiscard]] Eigen::VectorXd values(const JetPoint& p) const;
  /// Rows: invariants. Columns: u, v, w, u_t, v_t.
  [[nodiscard]] Eigen::MatrixXd jacobian(const JetPoint& p) const;
  /// Symbolic partial of item i with respect to jet coordinate j.
  [[nodiscard]] const Expr& partial(std::size_t i, std::size_t j) const {
    return partials_[i * 5 + j];
  }

 private:
  InvariantSet set_;
  std::vector<CompiledExpr> values_;
  std::vector<Expr> partials_;
  std::vector<CompiledExpr> compiled_partials_;
};

/// Values in declaration order.
std::vector<double> eval_invariants(const InvariantSet& set, const JetPoint& p);

}  // namespace kdveq
