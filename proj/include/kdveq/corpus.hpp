#pragma once

#include <map>
#include <string>
#include <vector>

#include "kdveq/classify.hpp"

namespace kdveq {

struct CorpusEntry {
  std::string id;
  std::string q_text;
  std::map<Symbol, Rational> params;
  Subclass expected_subclass = Subclass::S1;
  std::string notes;

  [[nodiscard]] EquationSpec equation() const {
    return EquationSpec::from_text(q_text, params);
  }
};

/// Named reference equations with their expected subclasses.
const std::vector<CorpusEntry>& builtin_corpus();

/// Throws std::out_of_range for unknown ids.
const CorpusEntry& corpus_entry(const std::string& id);

/// The corpus as batch JSON lines ({"id", "cmd": "classify", "q", ...}).
std::string corpus_jsonl();

}  // namespace kdveq
