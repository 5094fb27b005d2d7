#include "csv.hpp"

#include "qlstat/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qlstat::cli {

namespace {

constexpr std::size_t kMaxListedRows = 10;

std::vector<std::string> split_record(std::istream& in, std::string& line, std::size_t& lineno, bool& ok)
{
  std::vector<std::string> fields;
  ok = static_cast<bool>(std::getline(in, line));
  if (!ok)
    return fields;
  ++lineno;
  if (!line.empty() && line.back() == '\r')
    line.pop_back();

  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == line.size()) {
      if (!quoted)
        break;
      // quoted field spans a newline
      std::string next;
      if (!std::getline(in, next))
        throw DataError("unterminated quoted field starting on line " + std::to_string(lineno));
      ++lineno;
      if (!next.empty() && next.back() == '\r')
        next.pop_back();
      field += '\n';
      line = std::move(next);
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out)
{
  const std::string t = trim(text);
  if (t.empty())
    return false;
  const char* first = t.data();
  if (*first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const
{
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name)
      return j;
  }
  std::ostringstream msg;
  msg << "column '" << name << "' not found; available:";
  for (const auto& h : header)
    msg << " '" << h << "'";
  throw DataError(msg.str());
}

CsvTable read_csv(std::istream& in)
{
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool ok = false;
  do {
    table.header = split_record(in, line, lineno, ok);
  } while (ok && line.empty());
  if (!ok)
    throw DataError("input has no header row");
  if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0)
    table.header[0].erase(0, 3);
  for (auto& h : table.header)
    h = trim(h);

  for (;;) {
    const std::size_t start = lineno + 1;
    auto fields = split_record(in, line, lineno, ok);
    if (!ok)
      break;
    if (fields.size() == 1 && trim(fields[0]).empty())
      continue;
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "line " << start << " has " << fields.size() << " fields, header has "
          << table.header.size();
      throw DataError(msg.str());
    }
    table.rows.push_back(std::move(fields));
    table.line.push_back(start);
  }
  return table;
}

std::vector<double> numeric_column(const CsvTable& table, const std::string& name)
{
  const std::size_t j = table.column(name);
  std::vector<double> out(table.rows.size());
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!parse_double(table.rows[i][j], out[i]))
      bad.push_back(table.line[i]);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "column '" << name << "' is not numeric on " << bad.size() << " row(s), lines";
    for (std::size_t k = 0; k < bad.size() && k < kMaxListedRows; ++k)
      msg << ' ' << bad[k];
    if (bad.size() > kMaxListedRows)
      msg << " ...";
    throw DataError(msg.str());
  }
  return out;
}

Dataset to_dataset(const CsvTable& table, const ColumnMapping& mapping)
{
  // resolve every name first so a missing column is reported before parsing
  table.column(mapping.y);
  for (const auto& c : mapping.x)
    table.column(c);
  for (const auto& c : mapping.discrete)
    table.column(c);

  Dataset d;
  d.y = numeric_column(table, mapping.y);
  for (const auto& c : mapping.x)
    d.x.push_back(numeric_column(table, c));
  if (!mapping.discrete.empty()) {
    std::vector<std::size_t> cols;
    for (const auto& c : mapping.discrete)
      cols.push_back(table.column(c));
    d.cell.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k > 0)
          key += '|';
        key += trim(table.rows[i][cols[k]]);
      }
      d.cell[i] = std::move(key);
    }
  }
  d.validate();
  return d;
}

} // namespace qlstat::cli
