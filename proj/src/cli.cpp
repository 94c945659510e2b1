#include "kdveq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kdveq/calculus.hpp"
#include "kdveq/coframe.hpp"
#include "kdveq/diagnostics.hpp"
#include "kdveq/equivalence.hpp"
#include "kdveq/errors.hpp"
#include "kdveq/json_writer.hpp"

namespace kdveq::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string id;
  bool verbose = false;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutsideSubclass:
    case ErrorKind::UnboundParameter:
      return kOutsideOrUnbound;
    default:
      return kUsage;
  }
}

void emit(std::ostream& out, const Common& c, json body) {
  if (!c.id.empty()) body["id"] = c.id;
  out << write_json(body) << '\n';
}

int emit_error(std::ostream& out, std::ostream& err, const Common& c, std::string_view kind,
               const std::string& message, int code) {
  emit(out, c, json{{"error", std::string(kind)}, {"message", message}});
  err << "kdveq: " << message << '\n';
  return code;
}

std::map<Symbol, Rational> parse_params(const std::vector<std::string>& items) {
  std::map<Symbol, Rational> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects NAME=VALUE, got '" + item + "'");
    const Symbol s = parse_symbol(item.substr(0, eq));
    if (!is_parameter(s))
      throw UsageError("'" + item.substr(0, eq) + "' is not a parameter (A, B, C or D)");
    out[s] = parse_rational(item.substr(eq + 1));
  }
  return out;
}

JetPoint parse_at(const std::string& text) {
  std::array<double, 5> x{};
  std::size_t n = 0;
  const char* p = text.data();
  const char* end = p + text.size();
  while (true) {
    while (p < end && *p == ' ') ++p;
    if (n == 5) throw UsageError("--at expects exactly 5 values u,v,w,ut,vt");
    auto [next, ec] = std::from_chars(p, end, x[n]);
    if (ec != std::errc()) throw UsageError("--at: malformed number in '" + text + "'");
    ++n;
    p = next;
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    if (*p != ',') throw UsageError("--at: expected ',' in '" + text + "'");
    ++p;
  }
  if (n != 5) throw UsageError("--at expects exactly 5 values u,v,w,ut,vt");
  return JetPoint::from_array(x);
}

json three_form_json(const CoframeModel& model, const ThreeForm& form) {
  json terms = json::array();
  for (const Wedge3& t : form)
    terms.push_back({{"coef", to_string(t.coef)},
                     {"forms", {model.forms()[t.i], model.forms()[t.j], model.forms()[t.k]}}});
  return terms;
}

struct Settings {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

Settings env_settings() {
  Settings s;
  if (const char* e = std::getenv("KDVEQ_SEED")) s.seed = std::strtoull(e, nullptr, 10);
  if (const char* e = std::getenv("KDVEQ_THREADS"))
    s.threads = static_cast<unsigned>(std::strtoul(e, nullptr, 10));
  return s;
}

int run_batch(const std::string& path, std::ostream& out, std::ostream& err);

// Converts one batch object into the equivalent command line.
std::vector<std::string> batch_argv(const json& line) {
  if (!line.is_object()) throw UsageError("batch line is not a JSON object");
  if (!line.contains("cmd") || !line["cmd"].is_string())
    throw UsageError("batch line lacks a string 'cmd'");
  const std::string cmd = line["cmd"].get<std::string>();
  if (cmd == "batch") throw UsageError("nested batch is not supported");
  std::vector<std::string> argv{cmd};
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return write_json(v);
    throw UsageError("unsupported batch value " + v.dump());
  };
  for (auto it = line.begin(); it != line.end(); ++it) {
    const std::string& key = it.key();
    if (key == "cmd" || key == "expected_subclass" || key == "notes") continue;
    const json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) argv.push_back("--" + key);
    } else if (v.is_array() && key == "at") {
      std::string joined;
      for (const json& x : v) joined += (joined.empty() ? "" : ",") + scalar(x);
      argv.insert(argv.end(), {"--at", joined});
    } else if (v.is_array()) {
      for (const json& x : v) argv.insert(argv.end(), {"--" + key, scalar(x)});
    } else {
      argv.insert(argv.end(), {"--" + key, scalar(v)});
    }
  }
  return argv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classification and equivalence of u_xxx = u_t + Q(u, u_x)", "kdveq"};
  app.require_subcommand(1);
  Common common;
  Settings settings = env_settings();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--id", common.id, "Identifier echoed in the JSON output");
    sub->add_flag("--verbose", common.verbose, "Human summary on stderr");
  };

  std::string q, qa, qb;
  std::vector<std::string> params, params_a, params_b;
  std::string at;
  bool generic = false;

  auto* classify_cmd = app.add_subcommand("classify", "Subclass of Q");
  classify_cmd->add_option("--q", q, "Q(u, ux)")->required();
  classify_cmd->add_option("--param", params, "Parameter binding NAME=VALUE");
  classify_cmd->add_flag("--generic", generic, "Treat unbound parameters as generic");
  add_common(classify_cmd);

  auto* inv_cmd = app.add_subcommand("invariants", "Differential invariants of Q");
  inv_cmd->add_option("--q", q, "Q(u, ux)")->required();
  inv_cmd->add_option("--param", params, "Parameter binding NAME=VALUE");
  inv_cmd->add_option("--at", at, "Jet point u,v,w,ut,vt");
  inv_cmd->add_flag("--generic", generic, "Treat unbound parameters as generic");
  add_common(inv_cmd);

  SampleConfig cfg;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  auto* equiv_cmd = app.add_subcommand("equiv", "Local equivalence of two equations");
  equiv_cmd->add_option("--qa", qa, "First Q")->required();
  equiv_cmd->add_option("--qb", qb, "Second Q")->required();
  equiv_cmd->add_option("--param-a", params_a, "Parameter binding for the first Q");
  equiv_cmd->add_option("--param-b", params_b, "Parameter binding for the second Q");
  equiv_cmd->add_option("--seed", seed, "RNG seed (default: KDVEQ_SEED or 1)");
  equiv_cmd->add_option("--samples", cfg.samples, "Sample count")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--tol", cfg.overlap_tol, "Overlap tolerance")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--threads", threads, "Worker threads, 0 = all cores");
  add_common(equiv_cmd);

  std::string model_name, model_file;
  auto* structure_cmd = app.add_subcommand("structure", "d^2 = 0 check of a structure system");
  auto* model_opt = structure_cmd->add_option("--model", model_name, "Built-in model name");
  auto* file_opt = structure_cmd->add_option("--model-file", model_file, "Model text file");
  model_opt->excludes(file_opt);
  add_common(structure_cmd);

  std::string batch_file;
  auto* batch_cmd = app.add_subcommand("batch", "Run JSON-lines commands");
  batch_cmd->add_option("file", batch_file, "Input file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return emit_error(out, err, common, "usage", e.what(), kUsage);
  }

  if (batch_cmd->parsed()) return run_batch(batch_file, out, err);

  take_diagnostics();
  int code = kOk;
  try {
    if (classify_cmd->parsed()) {
      const EquationSpec eq = EquationSpec::from_text(q, parse_params(params), generic);
      const SecondPartials sp = second_partials(eq);
      const Subclass s = classify(sp);
      emit(out, common,
           {{"subclass", std::string(to_string(s))},
            {"second_partials",
             {{"quu", print_expr(simplify(sp.quu))},
              {"quv", print_expr(simplify(sp.quv))},
              {"qvv", print_expr(simplify(sp.qvv))}}}});
      if (common.verbose) err << q << ": " << to_string(s) << '\n';
      code = s == Subclass::Outside ? kOutsideOrUnbound : kOk;
    } else if (inv_cmd->parsed()) {
      const EquationSpec eq = EquationSpec::from_text(q, parse_params(params), generic);
      std::optional<JetPoint> point;
      if (!at.empty()) point = parse_at(at);
      const InvariantSet set = invariants_for(eq);
      std::vector<double> values;
      if (point) values = eval_invariants(set, *point);
      json items = json::array();
      for (std::size_t i = 0; i < set.items.size(); ++i) {
        json item{{"name", set.items[i].name}, {"symbolic", print_expr(set.items[i].value)}};
        if (point) item["value"] = values[i];
        items.push_back(std::move(item));
      }
      emit(out, common, {{"subclass", std::string(to_string(set.subclass))}, {"invariants", items}});
      if (common.verbose)
        for (const NamedInvariant& it : set.items) err << it.name << " = " << print_expr(it.value) << '\n';
    } else if (equiv_cmd->parsed()) {
      cfg.seed = seed.value_or(settings.seed);
      cfg.threads = threads.value_or(settings.threads);
      const EquationSpec a = EquationSpec::from_text(qa, parse_params(params_a));
      const EquationSpec b = EquationSpec::from_text(qb, parse_params(params_b));
      const EquivalenceVerdict v = decide_equivalence(a, b, cfg);
      json body{{"verdict", std::string(to_string(v.verdict))},
                {"reason", std::string(to_string(v.reason))},
                {"subclass_a", std::string(to_string(v.subclass_a))},
                {"subclass_b", std::string(to_string(v.subclass_b))},
                {"rank_a", v.rank_a},
                {"rank_b", v.rank_b},
                {"residual_ab", v.residual_ab ? json(*v.residual_ab) : json(nullptr)},
                {"residual_ba", v.residual_ba ? json(*v.residual_ba) : json(nullptr)},
                {"samples_used", v.samples_used},
                {"basis", v.numerically_supported() ? "numerical" : "symbolic"},
                {"seed", cfg.seed}};
      emit(out, common, std::move(body));
      if (common.verbose)
        err << to_string(v.verdict) << " (" << to_string(v.reason) << "), ranks " << v.rank_a
            << "/" << v.rank_b << '\n';
    } else if (structure_cmd->parsed()) {
      CoframeModel model;
      if (!model_file.empty()) {
        std::ifstream in(model_file);
        if (!in) throw UsageError("cannot open model file '" + model_file + "'");
        std::stringstream text;
        text << in.rdbuf();
        model = CoframeModel::parse(text.str(), model_file);
      } else if (!model_name.empty()) {
        model = builtin_model(model_name);
      } else {
        throw UsageError("structure needs --model or --model-file");
      }
      const ModelReport report = check_model(model);
      json residuals = json::object();
      json undetermined = json::object();
      for (const FormCheck& c : report.checks) {
        if (c.residual)
          residuals[c.form] = three_form_json(model, *c.residual);
        else
          undetermined[c.form] = c.error;
      }
      json notes = json::array();
      if (model.name().starts_with("s1-")) notes.push_back(adjudicate_sigma13_sign().summary);
      emit(out, common,
           {{"model", model.name()},
            {"residuals", residuals},
            {"undetermined", undetermined},
            {"consistent", report.consistent()},
            {"notes", notes}});
      if (common.verbose)
        for (const FormCheck& c : report.checks)
          err << "d^2 " << c.form << " = "
              << (c.residual ? format_three_form(model, *c.residual) : c.error) << '\n';
    }
  } catch (const UsageError& e) {
    return emit_error(out, err, common, "usage", e.what(), kUsage);
  } catch (const Error& e) {
    return emit_error(out, err, common, to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return emit_error(out, err, common, "internal", e.what(), kUsage);
  }
  const auto diagnostics = take_diagnostics();
  for (const std::string& d : diagnostics) err << "kdveq: diagnostic: " << d << '\n';
  if (!diagnostics.empty()) code = std::max(code, static_cast<int>(kInconsistent));
  return code;
}

int run_batch(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) return emit_error(out, err, {}, "usage", "cannot open batch file '" + path + "'", kUsage);
  int worst = kOk;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    int code = kOk;
    try {
      const json parsed = json::parse(line);
      Common c;
      if (parsed.is_object() && parsed.contains("id") && parsed["id"].is_string())
        c.id = parsed["id"].get<std::string>();
      try {
        code = run(batch_argv(parsed), out, err);
      } catch (const UsageError& e) {
        code = emit_error(out, err, c, "usage", e.what(), kUsage);
      }
    } catch (const json::parse_error& e) {
      code = emit_error(out, err, {}, "usage", std::string("malformed batch line: ") + e.what(), kUsage);
    }
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run(args, out, err);
}

}  // namespace kdveq::cli
