#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qlstat::cli {

namespace {

std::string cell(const Json& v)
{
  if (v.is_null())
    return {};
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos)
      return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"')
        quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  if (v.is_number_float())
    return format_number(v.get<double>());
  if (v.is_number())
    return v.dump();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0)
        out += ';';
      out += cell(v[i]);
    }
    return out;
  }
  return v.dump();
}

} // namespace

Json number(double v)
{
  if (!std::isfinite(v))
    return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::strtod(buf, nullptr);
}

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_csv(std::ostream& out, const Json& rows, std::vector<std::string> columns)
{
  if (columns.empty()) {
    for (const auto& row : rows) {
      for (const auto& [key, value] : row.items()) {
        if (std::find(columns.begin(), columns.end(), key) == columns.end())
          columns.push_back(key);
      }
    }
  }
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << (j ? "," : "") << columns[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "");
      if (row.contains(columns[j]))
        out << cell(row.at(columns[j]));
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const Json& doc)
{
  out << doc.dump(2) << '\n';
}

} // namespace qlstat::cli
