#pragma once

//! Conditional quantile inference by windowing: keep the responses whose
//! covariates lie in the L-infinity ball of radius h around x0 (and in the
//! same discrete cell), then run the unconditional interval on them.

#include "qlstat/bandwidth.hpp"
#include "qlstat/unconditional_ci.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace qlstat {

//! Column-major data: x[j][i] is continuous covariate j of row i.
//! `cell` is empty, or holds one discrete-covariate key per row.
struct Dataset
{
  std::vector<double> y;
  std::vector<std::vector<double>> x;
  std::vector<std::string> cell;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dims() const noexcept { return x.size(); }
  //! throws DataError on ragged columns or non-finite values
  void validate() const;
};

struct LocalWindow
{
  std::vector<double> x0;
  double h = 0.0;
  std::optional<std::string> cell;

  //! throws DomainError unless h > 0 and x0 has `dims` finite components
  void validate(std::size_t dims) const;
  bool contains(const Dataset& data, std::size_t row) const;
};

struct LocalSample
{
  SortedSample y_values;
  std::size_t n_local = 0;
  LocalWindow window;
  //! contributing rows ordered like y_values (ties by original index)
  std::vector<std::size_t> rows;
};

//! Throws EmptyWindowError when no row falls in the window.
LocalSample extract_local_sample(const Dataset& data, const LocalWindow& window);

struct ConditionalOptions
{
  //! user bandwidth; the plug-in rule (d = 1 only) is used when absent
  std::optional<double> h;
  bool large_n_adjustment = true;
  SupportBounds bounds;
};

struct EvaluationPoint
{
  std::vector<double> x0;
  std::optional<std::string> cell;
};

struct ConditionalResult
{
  ConfidenceInterval ci;
  std::optional<BandwidthReport> bandwidth;
  LocalWindow window;
  std::size_t local_n = 0;
};

//! Plug-in bandwidth at a point, from every row of the point's cell.
BandwidthReport conditional_bandwidth(const Dataset& data,
                                      const EvaluationPoint& point,
                                      const QuantileRequest& request,
                                      bool large_n_adjustment = true);

//! ExtremeQuantileError from the local interval is rethrown with N_n attached.
ConditionalResult conditional_interval(const Dataset& data,
                                       const EvaluationPoint& point,
                                       const QuantileRequest& request,
                                       const ConditionalOptions& options = {});

enum class JointMode
{
  bonferroni,         //!< alpha / m per point
  independent_windows //!< 1 - (1 - alpha)^{1/m} per point; windows must be disjoint
};

JointMode parse_joint_mode(std::string_view text);
std::string_view to_string(JointMode mode);

double pointwise_alpha(double alpha, std::size_t m, JointMode mode);

//! true when the windows share no point (different cells, or some
//! coordinate separates the centres by more than h_a + h_b)
bool windows_disjoint(const LocalWindow& a, const LocalWindow& b);

struct JointResult
{
  std::vector<ConditionalResult> points;
  double pointwise_alpha = 0.0;
  JointMode mode = JointMode::bonferroni;
};

//! Points are evaluated concurrently; the result does not depend on the
//! thread count. Throws ModeViolationError for overlapping windows under
//! independent_windows.
JointResult joint_intervals(const Dataset& data,
                            const std::vector<EvaluationPoint>& points,
                            const QuantileRequest& request,
                            JointMode mode,
                            const ConditionalOptions& options = {},
                            unsigned threads = 1);

} // namespace qlstat
