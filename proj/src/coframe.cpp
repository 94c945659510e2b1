#include "kdveq/coframe.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kdveq/errors.hpp"

namespace kdveq {

std::optional<Wedge2> canonical_wedge(const Rational& coef, std::size_t a, std::size_t b) {
  if (a == b || coef == 0) return std::nullopt;
  if (a < b) return Wedge2{coef, a, b};
  return Wedge2{Rational(-coef), b, a};
}

std::optional<Wedge3> canonical_wedge(const Rational& coef, std::size_t a, std::size_t b,
                                      std::size_t c) {
  if (a == b || b == c || a == c || coef == 0) return std::nullopt;
  std::array<std::size_t, 3> idx{a, b, c};
  bool odd = false;
  // Bubble sort tracks the permutation parity.
  for (int pass = 0; pass < 2; ++pass)
    for (int k = 0; k < 2 - pass; ++k)
      if (idx[k] > idx[k + 1]) {
        std::swap(idx[k], idx[k + 1]);
        odd = !odd;
      }
  return Wedge3{odd ? Rational(-coef) : coef, idx[0], idx[1], idx[2]};
}

TwoForm canonicalize(std::vector<Wedge2> terms) {
  TwoForm sorted;
  for (const Wedge2& t : terms)
    if (auto c = canonical_wedge(t.coef, t.i, t.j)) sorted.push_back(*c);
  std::sort(sorted.begin(), sorted.end(), [](const Wedge2& x, const Wedge2& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  TwoForm out;
  for (const Wedge2& t : sorted) {
    if (!out.empty() && out.back().i == t.i && out.back().j == t.j) {
      out.back().coef += t.coef;
      if (out.back().coef == 0) out.pop_back();
    } else {
      out.push_back(t);
    }
  }
  return out;
}

ThreeForm canonicalize(std::vector<Wedge3> terms) {
  ThreeForm sorted;
  for (const Wedge3& t : terms)
    if (auto c = canonical_wedge(t.coef, t.i, t.j, t.k)) sorted.push_back(*c);
  std::sort(sorted.begin(), sorted.end(), [](const Wedge3& x, const Wedge3& y) {
    return std::tie(x.i, x.j, x.k) < std::tie(y.i, y.j, y.k);
  });
  ThreeForm out;
  for (const Wedge3& t : sorted) {
    if (!out.empty() && out.back().i == t.i && out.back().j == t.j && out.back().k == t.k) {
      out.back().coef += t.coef;
      if (out.back().coef == 0) out.pop_back();
    } else {
      out.push_back(t);
    }
  }
  return out;
}

ThreeForm add(const ThreeForm& a, const ThreeForm& b) {
  std::vector<Wedge3> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return canonicalize(std::move(all));
}

// ---------------------------------------------------------------------------

std::size_t CoframeModel::declare(std::string_view form) {
  if (auto i = find(form)) return *i;
  forms_.emplace_back(form);
  return forms_.size() - 1;
}

void CoframeModel::set_rule(std::string_view form, TwoForm rule) {
  const std::size_t i = index(form);
  for (const Wedge2& t : rule)
    if (t.i >= forms_.size() || t.j >= forms_.size())
      throw Error(ErrorKind::UnknownForm, "rule for '" + std::string(form) + "' uses an undeclared form");
  rules_[i] = canonicalize(std::move(rule));
}

std::optional<std::size_t> CoframeModel::find(std::string_view form) const {
  auto it = std::find(forms_.begin(), forms_.end(), form);
  if (it == forms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - forms_.begin());
}

std::size_t CoframeModel::index(std::string_view form) const {
  if (auto i = find(form)) return *i;
  throw Error(ErrorKind::UnknownForm, "unknown form '" + std::string(form) + "'");
}

const TwoForm& CoframeModel::rule(std::size_t i) const {
  auto it = rules_.find(i);
  if (it == rules_.end())
    throw Error(ErrorKind::UnknownForm, "form '" + forms_.at(i) + "' has no structure equation");
  return it->second;
}

std::vector<std::size_t> CoframeModel::ruled() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < forms_.size(); ++i)
    if (has_rule(i)) out.push_back(i);
  return out;
}

std::vector<std::size_t> CoframeModel::undetermined() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < forms_.size(); ++i)
    if (!has_rule(i)) out.push_back(i);
  return out;
}

namespace {

struct LineLexer {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ModelFormat, "line " + std::to_string(line) + ": " + what);
  }
  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool at_end() {
    skip_space();
    return pos >= text.size();
  }
  char peek() {
    skip_space();
    return pos < text.size() ? text[pos] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  std::string name() {
    skip_space();
    std::size_t start = pos;
    if (pos < text.size() && (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
    }
    if (start == pos) fail("expected a form name");
    return std::string(text.substr(start, pos - start));
  }
  Rational number() {
    skip_space();
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
      ++pos;
    try {
      return parse_rational(text.substr(start, pos - start));
    } catch (const Error&) {
      fail("malformed coefficient '" + std::string(text.substr(start, pos - start)) + "'");
    }
  }
};

}  // namespace

CoframeModel CoframeModel::parse(std::string_view text, std::string name) {
  CoframeModel model(std::move(name));
  struct PendingRule {
    std::string form;
    std::vector<std::tuple<Rational, std::string, std::string>> terms;
  };
  std::vector<PendingRule> pending;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    LineLexer lex{line, 0, line_no};
    if (lex.at_end()) continue;
    if (line.substr(lex.pos).starts_with("forms:")) {
      lex.pos += 6;
      while (!lex.at_end()) model.declare(lex.name());
      continue;
    }
    if (lex.name() != "d") lex.fail("expected 'd NAME = ...' or 'forms: ...'");
    PendingRule rule{lex.name(), {}};
    model.declare(rule.form);
    for (const auto& r : pending)
      if (r.form == rule.form) lex.fail("duplicate rule for '" + rule.form + "'");
    lex.expect('=');
    if (lex.peek() == '0') {
      lex.number();
      if (!lex.at_end()) lex.fail("trailing input after 0");
      pending.push_back(std::move(rule));
      continue;
    }
    bool first = true;
    while (!lex.at_end()) {
      Rational sign(1);
      char c = lex.peek();
      if (c == '+' || c == '-') {
        ++lex.pos;
        if (c == '-') sign = -1;
      } else if (!first) {
        lex.fail("expected '+' or '-'");
      }
      first = false;
      Rational coef(1);
      if (std::isdigit(static_cast<unsigned char>(lex.peek()))) {
        coef = lex.number();
        lex.expect('*');
      }
      std::string a = lex.name();
      lex.expect('^');
      std::string b = lex.name();
      rule.terms.emplace_back(sign * coef, a, b);
    }
    if (first) lex.fail("empty right-hand side");
    pending.push_back(std::move(rule));
  }
  for (const auto& r : pending)
    for (const auto& [c, a, b] : r.terms) {
      model.declare(a);
      model.declare(b);
    }
  for (const auto& r : pending) {
    TwoForm terms;
    for (const auto& [c, a, b] : r.terms) terms.push_back({c, model.index(a), model.index(b)});
    model.set_rule(r.form, std::move(terms));
  }
  return model;
}

std::string CoframeModel::to_text() const {
  std::ostringstream os;
  os << "forms:";
  for (const auto& f : forms_) os << ' ' << f;
  os << '\n';
  for (std::size_t i : ruled()) {
    os << "d " << forms_[i] << " =";
    const TwoForm& r = rules_.at(i);
    if (r.empty()) os << " 0";
    bool first = true;
    for (const Wedge2& t : r) {
      Rational c = t.coef;
      if (c < 0) {
        os << " -";
        c = -c;
      } else if (!first) {
        os << " +";
      }
      os << ' ';
      if (c != 1) os << to_string(c) << " * ";
      os << forms_[t.i] << " ^ " << forms_[t.j];
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

ThreeForm exterior_derivative(const CoframeModel& model, const TwoForm& omega) {
  std::vector<Wedge3> terms;
  // d(X) ^ Y for undetermined X, keyed by (X, Y).
  std::map<std::pair<std::size_t, std::size_t>, Rational> unknown;
  for (const Wedge2& t : omega) {
    // d(a ^ b) = da ^ b - a ^ db
    if (model.has_rule(t.i)) {
      for (const Wedge2& r : model.rule(t.i)) terms.push_back({t.coef * r.coef, r.i, r.j, t.j});
    } else {
      unknown[{t.i, t.j}] += t.coef;
    }
    if (model.has_rule(t.j)) {
      for (const Wedge2& r : model.rule(t.j)) terms.push_back({-t.coef * r.coef, t.i, r.i, r.j});
    } else {
      // a ^ dB = dB ^ a for a 1-form a and 2-form dB.
      unknown[{t.j, t.i}] -= t.coef;
    }
  }
  std::ostringstream leftovers;
  bool any = false;
  for (const auto& [key, c] : unknown) {
    if (c == 0) continue;
    leftovers << (any ? ", " : "") << to_string(c) << "*d(" << model.forms()[key.first] << ")^"
              << model.forms()[key.second];
    any = true;
  }
  if (any)
    throw Error(ErrorKind::UndeterminedResidual,
                "differentials of undetermined forms survive: " + leftovers.str());
  return canonicalize(std::move(terms));
}

ThreeFormResidual d_squared(const CoframeModel& model, std::string_view form) {
  const std::size_t i = model.index(form);
  return exterior_derivative(model, model.rule(i));
}

const FormCheck* ModelReport::find(std::string_view form) const {
  for (const FormCheck& c : checks)
    if (c.form == form) return &c;
  return nullptr;
}

std::size_t ModelReport::checked_count() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const FormCheck& c) { return c.residual.has_value(); }));
}

bool ModelReport::consistent() const {
  if (checked_count() == 0) return false;
  return std::all_of(checks.begin(), checks.end(), [](const FormCheck& c) {
    return !c.residual || c.residual->empty();
  });
}

ModelReport check_model(const CoframeModel& model) {
  ModelReport report{model.name(), {}};
  for (std::size_t i : model.ruled()) {
    FormCheck check{model.forms()[i], std::nullopt, {}};
    try {
      check.residual = d_squared(model, model.forms()[i]);
    } catch (const Error& e) {
      check.error = e.what();
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kSo3 = R"(forms: w1 w2 w3
d w1 = -w2 ^ w3
d w2 = -w3 ^ w1
d w3 = -w1 ^ w2
)";

constexpr std::string_view kAbelian = R"(forms: w1 w2 w3
d w1 = 0
d w2 = 0
d w3 = 0
)";

constexpr std::string_view kLiftedForms =
    "forms: theta1 theta2 theta3 xi1 xi2 sigma1_1 sigma1_2 sigma1_3 eta1 eta2 eta3 eta4 eta5";

constexpr std::string_view kLiftedRules = R"(
d theta1 = -theta1 ^ eta4 - 2 * theta1 ^ eta5 - theta2 ^ xi2 + xi1 ^ sigma1_1
d theta2 = -theta2 ^ eta4 - theta2 ^ eta5 - theta3 ^ xi2 + xi1 ^ sigma1_2
d theta3 = -theta3 ^ eta4 + xi1 ^ sigma1_3 + xi2 ^ sigma1_1
d xi1 = -3 * xi1 ^ eta5
d xi2 = -xi2 ^ eta5
d sigma1_1 = -xi1 ^ eta3 + xi2 ^ sigma1_2 - sigma1_1 ^ eta4 + sigma1_1 ^ eta5
d sigma1_2 = -xi1 ^ eta1 + xi2 ^ sigma1_3 - sigma1_2 ^ eta4 + 2 * sigma1_2 ^ eta5
)";

// sigma1_3 ^ (eta4 - 3 eta5) with a leading '+' or '-'.
std::string sigma13_rule(bool plus) {
  return plus ? "d sigma1_3 = -xi1 ^ eta2 - xi2 ^ eta3 + sigma1_3 ^ eta4 - 3 * sigma1_3 ^ eta5\n"
              : "d sigma1_3 = -xi1 ^ eta2 - xi2 ^ eta3 - sigma1_3 ^ eta4 + 3 * sigma1_3 ^ eta5\n";
}

constexpr std::string_view kProlongation = R"(d eta1 = -beta1 ^ xi1 + xi2 ^ eta2 - eta1 ^ eta4 + 5 * eta1 ^ eta5
d eta2 = -beta2 ^ xi1 - beta3 ^ xi2 - eta2 ^ eta4 + 6 * eta2 ^ eta5
d eta3 = -beta3 ^ xi1 + xi2 ^ eta1 - eta3 ^ eta4 + 4 * eta3 ^ eta5
d eta4 = 0
d eta5 = 0
)";

std::string lifted_model_text(bool plus_sign, bool prolonged) {
  std::string text(kLiftedForms);
  if (prolonged) text += " beta1 beta2 beta3";
  text += kLiftedRules;
  text += sigma13_rule(plus_sign);
  if (prolonged) text += kProlongation;
  return text;
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  return {"so3", "abelian", "s1-structure", "s1-prolonged", "s1-prolonged-altsign"};
}

std::optional<std::string> builtin_model_text(std::string_view name) {
  if (name == "so3") return std::string(kSo3);
  if (name == "abelian") return std::string(kAbelian);
  if (name == "s1-structure") return lifted_model_text(true, false);
  if (name == "s1-prolonged") return lifted_model_text(false, true);
  if (name == "s1-prolonged-altsign") return lifted_model_text(true, true);
  return std::nullopt;
}

CoframeModel builtin_model(std::string_view name) {
  auto text = builtin_model_text(name);
  if (!text) throw Error(ErrorKind::UnknownForm, "unknown model '" + std::string(name) + "'");
  return CoframeModel::parse(*text, std::string(name));
}

std::string format_three_form(const CoframeModel& model, const ThreeForm& form) {
  if (form.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Wedge3& t : form) {
    Rational c = t.coef;
    if (c < 0) {
      os << (first ? "-" : " - ");
      c = -c;
    } else if (!first) {
      os << " + ";
    }
    if (c != 1) os << to_string(c) << '*';
    os << model.forms()[t.i] << '^' << model.forms()[t.j] << '^' << model.forms()[t.k];
    first = false;
  }
  return os.str();
}

SignAdjudication adjudicate_sigma13_sign() {
  const CoframeModel minus = builtin_model("s1-prolonged");
  const CoframeModel plus = builtin_model("s1-prolonged-altsign");
  const ModelReport minus_report = check_model(minus);
  const ModelReport plus_report = check_model(plus);
  SignAdjudication out;
  out.minus_consistent = minus_report.consistent();
  out.plus_consistent = plus_report.consistent();
  if (const FormCheck* c = plus_report.find("theta3"); c && c->residual)
    out.plus_theta3_residual = *c->residual;
  std::ostringstream os;
  os << "sign discrepancy in d sigma1_3: s1-structure prints +sigma1_3^(eta4 - 3*eta5), "
        "s1-prolonged prints -sigma1_3^(eta4 - 3*eta5); d^2 = 0 on every theta/xi/sigma form "
     << (out.minus_consistent ? "holds" : "fails") << " with '-' and "
     << (out.plus_consistent ? "holds" : "fails") << " with '+' (d^2 theta3 = "
     << format_three_form(plus, out.plus_theta3_residual) << ")";
  out.summary = os.str();
  return out;
}

}  // namespace kdveq
