#pragma once

//! Output helpers: 10 significant digits, non-finite values as null.

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace qlstat::cli {

//! insertion-ordered, so CSV columns and JSON keys keep a fixed layout
using Json = nlohmann::ordered_json;

Json number(double v);

//! "%.10g"; "inf" / "-inf" / "nan" for non-finite values
std::string format_number(double v);

//! Writes an array of flat JSON objects as CSV. Columns follow `columns`
//! when given, otherwise first-seen key order across the rows; array values
//! are joined with ';', null and missing values are empty cells.
void write_csv(std::ostream& out, const Json& rows, std::vector<std::string> columns = {});

//! Pretty JSON with a trailing newline.
void write_json(std::ostream& out, const Json& doc);

} // namespace qlstat::cli
