#pragma once

//! Monte Carlo coverage experiments. Replication r draws from the Philox
//! stream (seed, r), so reports are bit-identical for any worker count.

#include "qlstat/conditional_ci.hpp"
#include "qlstat/dgp.hpp"
#include "qlstat/unconditional_ci.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qlstat {

struct SimulationReport
{
  double cp = 0.0;
  //! upper endpoint below the true quantile
  double too_low = 0.0;
  //! lower endpoint above the true quantile
  double too_high = 0.0;
  double median_length = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double mc_se = 0.0;

  std::size_t covered = 0;
  std::size_t low_count = 0;
  std::size_t high_count = 0;
  //! replications without an interval (extreme quantile in a local sample,
  //! degenerate nuisances); excluded from every rate
  std::size_t failures = 0;
  std::size_t scored() const noexcept { return covered + low_count + high_count; }
};

//! One outcome per replication, aggregated into a report.
struct Tally
{
  enum class Outcome : unsigned char
  {
    covered,
    too_low,
    too_high,
    failed
  };
  std::vector<Outcome> outcome;
  std::vector<double> length;

  explicit Tally(std::size_t replications)
    : outcome(replications, Outcome::failed)
    , length(replications, 0.0)
  {}
  void record(std::size_t rep, const ConfidenceInterval& ci, double truth);
  SimulationReport report(std::uint64_t seed) const;
};

double median(std::vector<double> values);

//! Throws DomainError for a conditional design or fewer than 100 replications.
SimulationReport run_unconditional(const Dgp& dgp,
                                   std::size_t n,
                                   const QuantileRequest& request,
                                   std::size_t replications,
                                   std::uint64_t seed,
                                   unsigned threads = 1);

struct ConditionalSimOptions
{
  //! fixed half-width; the plug-in bandwidth is recomputed per replication
  //! when absent
  std::optional<double> h;
  //! multiplies the bandwidth actually used
  double h_multiplier = 1.0;
  bool large_n_adjustment = true;
  //! shifts delta of the null value Q(p; x0) + delta for rejection rates
  std::vector<double> deviations;
  JointMode joint_mode = JointMode::bonferroni;
};

struct PointSimulation
{
  double x0 = 0.0;
  double truth = 0.0;
  SimulationReport report;
  double median_h = 0.0;
  double median_local_n = 0.0;
  //! pointwise rejection rate of Q + delta for each deviation
  std::vector<double> rejection;
};

struct ConditionalSimulation
{
  std::vector<PointSimulation> points;
  std::vector<double> deviations;
  //! joint (all points) rejection rate of Q + delta per deviation, from the
  //! joint intervals at the per-point level of `joint_mode`
  std::vector<double> joint_rejection;
  //! replications where some joint interval failed
  std::size_t joint_failures = 0;
};

ConditionalSimulation run_conditional(const Dgp& dgp,
                                      std::size_t n,
                                      const std::vector<double>& x0_list,
                                      const QuantileRequest& request,
                                      std::size_t replications,
                                      std::uint64_t seed,
                                      const ConditionalSimOptions& options = {},
                                      unsigned threads = 1);

struct CalibrationComparison
{
  SimulationReport uncalibrated;
  SimulationReport calibrated;
  //! replications where the calibrated interval was longer
  std::size_t length_violations = 0;
};

//! Two-sided uncalibrated and calibrated intervals on identical draws.
CalibrationComparison run_calibration_comparison(std::size_t n,
                                                 double p,
                                                 const Dgp& dgp,
                                                 std::size_t replications,
                                                 std::uint64_t seed,
                                                 double alpha = 0.05,
                                                 unsigned threads = 1);

} // namespace qlstat
