#pragma once

//! Simulation configurations: the shipped tables and user JSON files.

#include "qlstat/conditional_ci.hpp"
#include "qlstat/dgp.hpp"

#include "format.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qlstat::cli {

struct UnconditionalCase
{
  std::size_t n = 0;
  double p = 0.5;
  Dgp dgp;
};

struct Design
{
  DgpKind noise = DgpKind::normal;
  bool heteroskedastic = false;
  double scale = -1.0;
};

struct SimConfig
{
  std::string name;
  bool conditional = false;
  double alpha = 0.05;
  Side side = Side::two_sided;
  std::size_t reps = 1000;
  //! "lstat" (uncalibrated) and / or "calib"
  std::vector<std::string> methods{ "lstat" };

  std::vector<UnconditionalCase> cases;

  DgpKind dgp = DgpKind::sine_bump;
  std::size_t n = 0;
  double p = 0.5;
  std::vector<double> x0;
  std::vector<double> deviations;
  JointMode joint_mode = JointMode::bonferroni;
  std::vector<Design> designs;
};

//! throws DomainError on a malformed configuration
SimConfig parse_sim_config(const Json& j);

//! Shipped configuration by name ("1", "table1", "calib", "bump", ...).
//! Throws DomainError listing the known names.
SimConfig builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

struct SimRunOptions
{
  std::uint64_t seed = 1;
  unsigned threads = 1;
  //! empty: every method of the config
  std::string rows;
  //! 0: the config's count
  std::size_t reps = 0;
};

//! Runs the configuration; one JSON object per reported row.
Json run_sim_config(const SimConfig& config, const SimRunOptions& options);

} // namespace qlstat::cli
