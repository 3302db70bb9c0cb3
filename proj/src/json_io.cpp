#include "qflag/json_io.hpp"

#include <cstdio>

namespace qflag {

namespace {

void dump_value(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * (level + 1), ' ');
  const std::string closing_pad(static_cast<std::size_t>(indent) * level, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(key).dump();
        out += ": ";
        dump_value(value, indent, level + 1, out);
      }
      out += "\n" + closing_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_value(value, indent, level + 1, out);
      }
      out += "\n" + closing_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_deterministic(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  out += "\n";
  return out;
}

}  // namespace qflag
