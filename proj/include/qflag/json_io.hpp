#ifndef QFLAG_JSON_IO_HPP
#define QFLAG_JSON_IO_HPP

#include <string>

#include "json.hpp"

namespace qflag {

using Json = nlohmann::ordered_json;

/// Serializes with fixed key order (insertion order) and floating-point
/// values printed with 17 significant digits, so identical inputs produce
/// byte-identical output.
std::string dump_deterministic(const Json& j, int indent = 2);

}  // namespace qflag

#endif  // QFLAG_JSON_IO_HPP
