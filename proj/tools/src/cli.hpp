#pragma once

//! qlstat command line front end.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 data error,
//! 4 extreme quantile, 5 numerical failure. Every failure writes one JSON
//! line {"error": kind, "exit": code, "message": ...} to the error stream.

#include <iosfwd>
#include <string>
#include <vector>

namespace qlstat::cli {

enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 2,
  exit_data = 3,
  exit_extreme_quantile = 4,
  exit_numerical = 5
};

//! `args` excludes the program name. "-" or no input path reads `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace qlstat::cli
