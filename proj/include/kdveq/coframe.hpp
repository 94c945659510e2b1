#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kdveq/rational.hpp"

namespace kdveq {

/// coef * form_i ^ form_j with i < j.
struct Wedge2 {
  Rational coef;
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Wedge2&, const Wedge2&) = default;
};

/// coef * form_i ^ form_j ^ form_k with i < j < k.
struct Wedge3 {
  Rational coef;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  friend bool operator==(const Wedge3&, const Wedge3&) = default;
};

/// Canonical 2-form: sorted by (i, j), coefficients merged, zeros dropped.
using TwoForm = std::vector<Wedge2>;
/// Canonical 3-form, same conventions. Empty means identically zero.
using ThreeForm = std::vector<Wedge3>;
using ThreeFormResidual = ThreeForm;

/// Sorts the indices with the permutation sign; nullopt if two coincide.
std::optional<Wedge2> canonical_wedge(const Rational& coef, std::size_t a, std::size_t b);
std::optional<Wedge3> canonical_wedge(const Rational& coef, std::size_t a, std::size_t b,
                                      std::size_t c);

TwoForm canonicalize(std::vector<Wedge2> terms);
ThreeForm canonicalize(std::vector<Wedge3> terms);
ThreeForm add(const ThreeForm& a, const ThreeForm& b);

/// Constant-coefficient structure equations d(form_i) = sum c form_j ^ form_k.
/// Forms with no rule are undetermined: their differentials are unknown.
class CoframeModel {
 public:
  CoframeModel() = default;
  explicit CoframeModel(std::string name) : name_(std::move(name)) {}

  /// Declares a form (idempotent) and returns its index.
  std::size_t declare(std::string_view form);
  /// Sets d(form) = rule; the rule is canonicalized. Throws
  /// Error(UnknownForm) for undeclared indices.
  void set_rule(std::string_view form, TwoForm rule);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<std::string>& forms() const noexcept { return forms_; }
  [[nodiscard]] std::optional<std::size_t> find(std::string_view form) const;
  /// Throws Error(UnknownForm).
  [[nodiscard]] std::size_t index(std::string_view form) const;
  [[nodiscard]] bool has_rule(std::size_t i) const { return rules_.contains(i); }
  [[nodiscard]] const TwoForm& rule(std::size_t i) const;
  /// Ruled forms in declaration order.
  [[nodiscard]] std::vector<std::size_t> ruled() const;
  [[nodiscard]] std::vector<std::size_t> undetermined() const;

  /// Plain-text loader. One rule per line:
  ///   d NAME = c * NAME ^ NAME +- c * NAME ^ NAME ...     (or  d NAME = 0)
  /// `c` is an optional rational ("3", "-1/2"); `#` starts a comment. An
  /// optional `forms: a b c` line fixes the form order, otherwise forms are
  /// ordered by first appearance. Throws Error(ModelFormat) with a line number.
  static CoframeModel parse(std::string_view text, std::string name = "custom");
  [[nodiscard]] std::string to_text() const;

 private:
  std::string name_;
  std::vector<std::string> forms_;
  std::map<std::size_t, TwoForm> rules_;
};

/// d(sum c a^b) = sum c (da^b - a^db) with rules substituted. Throws
/// Error(UndeterminedResidual) if a differential of an undetermined form
/// survives after cancellation.
ThreeForm exterior_derivative(const CoframeModel& model, const TwoForm& omega);

/// d(d form). Throws Error(UnknownForm) if the form is unknown or has no
/// rule, Error(UndeterminedResidual) as above.
ThreeFormResidual d_squared(const CoframeModel& model, std::string_view form);

struct FormCheck {
  std::string form;
  std::optional<ThreeFormResidual> residual;  // absent when `error` is set
  std::string error;
};

struct ModelReport {
  std::string model;
  std::vector<FormCheck> checks;  // one per ruled form, declaration order

  [[nodiscard]] const FormCheck* find(std::string_view form) const;
  [[nodiscard]] std::size_t checked_count() const;
  /// At least one form checked and every checked residual empty.
  [[nodiscard]] bool consistent() const;
};

/// d_squared for every ruled form; errors are recorded per form.
ModelReport check_model(const CoframeModel& model);

/// "so3", "abelian", "s1-structure", "s1-prolonged", "s1-prolonged-altsign".
std::vector<std::string> builtin_model_names();
/// Plain-text source of a built-in model; nullopt if unknown.
std::optional<std::string> builtin_model_text(std::string_view name);
/// Throws Error(UnknownForm) for unknown names.
CoframeModel builtin_model(std::string_view name);

/// Compares the two printed signs of the sigma1_3 ^ (eta4 - 3 eta5) term in
/// d sigma1_3 by checking d^2 of the prolonged system under each sign.
struct SignAdjudication {
  bool minus_consistent = false;
  bool plus_consistent = false;
  ThreeFormResidual plus_theta3_residual;
  std::string summary;
};

SignAdjudication adjudicate_sigma13_sign();

std::string format_three_form(const CoframeModel& model, const ThreeForm& form);

}  // namespace kdveq
