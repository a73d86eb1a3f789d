#pragma once

#include <json.hpp>

#include <string>

namespace pswfrec {

// Fixed 17 significant digits, so every binary64 value survives
// a write/read cycle unchanged.
std::string format_double(double v);

// Pretty printer that formats floating-point numbers with format_double.
// Arrays of scalars stay on one line. Non-finite numbers become null.
std::string dump_json(const nlohmann::json& j);

} // namespace pswfrec
