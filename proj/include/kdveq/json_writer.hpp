#pragma once

#include <string>

#include <json.hpp>

namespace kdveq {

/// Compact JSON with keys sorted and doubles in shortest round-trip form;
/// non-finite doubles become null.
std::string write_json(const nlohmann::json& value);

}  // namespace kdveq
