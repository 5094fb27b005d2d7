#pragma once

//! Minimal RFC 4180 reader: header row, comma separator, double-quoted
//! fields with "" escapes. Blank lines are skipped.

#include "qlstat/conditional_ci.hpp"

#include <istream>
#include <string>
#include <vector>

namespace qlstat::cli {

struct CsvTable
{
  std::vector<std::string> header;
  //! rows[i][j]: field j of data row i (row i + 2 of the file)
  std::vector<std::vector<std::string>> rows;
  //! 1-based file line of each data row
  std::vector<std::size_t> line;

  //! throws DataError listing the available headers
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

struct ColumnMapping
{
  std::string y;
  std::vector<std::string> x;
  std::vector<std::string> discrete;
};

//! Numeric columns must parse completely as decimals; offending rows are
//! reported by line number in a DataError.
Dataset to_dataset(const CsvTable& table, const ColumnMapping& mapping);

//! One numeric column.
std::vector<double> numeric_column(const CsvTable& table, const std::string& name);

} // namespace qlstat::cli
