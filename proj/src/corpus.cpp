#include "kdveq/corpus.hpp"

#include <stdexcept>

#include "kdveq/json_writer.hpp"

namespace kdveq {

const std::vector<CorpusEntry>& builtin_corpus() {
  static const std::vector<CorpusEntry> corpus = {
      {"kdv", "u*ux", {}, Subclass::S2, "Korteweg-de Vries"},
      {"mkdv", "u^2*ux", {}, Subclass::S4, "modified KdV"},
      {"gkdv-cubic", "u^3*ux", {}, Subclass::S4, "generalized KdV with h(u) = u^3"},
      {"linear", "0", {}, Subclass::S1, "linear equation u_t = u_xxx"},
      {"affine", "2*u + 3*ux + 5", {}, Subclass::S1, "affine Q"},
      {"kdv-forced", "u + u*ux", {}, Subclass::S2, "KdV with a linear term"},
      {"s3-example", "u*ux + ux^2", {}, Subclass::S3, "Qvv = 2, Quv = 1"},
      {"outside-example", "u^2", {}, Subclass::Outside, "Quv = 0 with Quu != 0"},
      {"kdv-scaled", "2*u*ux", {}, Subclass::S2, "KdV after u -> 2u"},
      {"s2-param",
       "A*u + B*ux + C*u*ux + D",
       {{Symbol::A, Rational(1)}, {Symbol::B, Rational(-2)}, {Symbol::C, Rational(3)},
        {Symbol::D, Rational(1, 2)}},
       Subclass::S2,
       "general S2 form with bound parameters"},
  };
  return corpus;
}

const CorpusEntry& corpus_entry(const std::string& id) {
  for (const CorpusEntry& e : builtin_corpus())
    if (e.id == id) return e;
  throw std::out_of_range("unknown corpus entry '" + id + "'");
}

std::string corpus_jsonl() {
  std::string out;
  for (const CorpusEntry& e : builtin_corpus()) {
    nlohmann::json line = {{"id", e.id},
                           {"cmd", "classify"},
                           {"q", e.q_text},
                           {"expected_subclass", std::string(to_string(e.expected_subclass))},
                           {"notes", e.notes}};
    if (!e.params.empty()) {
      nlohmann::json params = nlohmann::json::array();
      for (const auto& [s, v] : e.params)
        params.push_back(std::string(surface_name(s)) + "=" + to_string(v));
      line["param"] = params;
    }
    out += write_json(line);
    out += '\n';
  }
  return out;
}

}  // namespace kdveq
