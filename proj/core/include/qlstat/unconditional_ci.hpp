#pragma once

//! Confidence intervals for an unconditional quantile built from
//! interpolated order statistics.
//!
//! For a sample of size n, the index u^h(alpha) solves
//!   P( beta((n+1)u, (n+1)(1-u)) < p ) = alpha
//! and u^l(alpha) solves the mirrored equation
//!   P( beta((n+1)u, (n+1)(1-u)) > p ) = alpha.
//! The lower one-sided interval is (-inf, L(u^h)), the upper one-sided
//! interval is (L(u^l), inf) and the two-sided interval joins both with
//! per-tail levels t*alpha (low) and (1-t)*alpha (high). L is the
//! two-point L-statistic of fractional_order.hpp.
//!
//! The calibrated variants add the analytic n^{-1} coverage term
//!   eps (1 - eps) z phi(z) / (p (1 - p) n),  z = z_{1 - tail level},
//! to each tail level, with eps taken from the uncalibrated index, and
//! re-solve once.

#include "qlstat/fractional_order.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace qlstat {

enum class Side
{
  lower,    //!< (-inf, upper endpoint]
  upper,    //!< [lower endpoint, inf)
  two_sided
};

enum class Tail
{
  low,
  high
};

std::string_view to_string(Side side);
//! parses "lower", "upper", "two_sided" / "two-sided"; throws DomainError
Side parse_side(std::string_view text);

struct QuantileRequest
{
  double p = 0.5;
  double alpha = 0.05;
  Side side = Side::two_sided;
  bool calibrated = false;
  //! share of alpha spent on the low tail of a two-sided interval
  double tail_split = 0.5;

  //! throws DomainError on p, alpha or tail_split outside (0, 1)
  void validate() const;
  bool needs_low() const noexcept { return side != Side::lower; }
  bool needs_high() const noexcept { return side != Side::upper; }
  //! nominal level of the low / high tail
  double low_level() const noexcept;
  double high_level() const noexcept;
};

struct EndpointIndices
{
  std::optional<double> u_low;
  std::optional<double> u_high;
  double eps_low = 0.0;
  double eps_high = 0.0;
  //! tail levels actually solved for (calibrated when requested)
  double alpha_effective_low = 0.0;
  double alpha_effective_high = 0.0;
  //! ideal-beta equation residuals at the returned indices
  double residual_low = 0.0;
  double residual_high = 0.0;
};

struct ConfidenceInterval
{
  double lower = 0.0;
  double upper = 0.0;
  EndpointIndices indices;
  QuantileRequest request;
  std::size_t n = 0;
  //! a support bound replaced a missing order statistic
  bool conservative = false;

  double length() const noexcept { return upper - lower; }
  bool contains(double value) const noexcept
  {
    return lower <= value && value <= upper;
  }
};

//! u^h: I_p((n+1)u, (n+1)(1-u)) = alpha.
//! Throws ExtremeQuantileError if no root can be bracketed in (0, 1) and
//! NumericalError if the residual exceeds 1e-10.
double solve_u_high(std::size_t n, double p, double alpha);

//! u^l: 1 - I_p((n+1)u, (n+1)(1-u)) = alpha.
double solve_u_low(std::size_t n, double p, double alpha);

//! Two-term normal expansion of u^l / u^h; only used as a warm start.
double endpoint_approx(std::size_t n, double p, double alpha, Tail tail);

//! Tail level with the analytic n^{-1} coverage term added.
//! Requires 0 < alpha < 0.5; throws CalibrationOverflowError when the
//! result reaches 1.
double calibrate_alpha(double alpha, double p, std::size_t n, double epsilon);

//! Indices for a sample of size n. Depends on the data only through n, so a
//! Monte Carlo loop can reuse one result for every replication.
//! Does not check evaluability; see apply_indices.
EndpointIndices endpoint_indices(std::size_t n, const QuantileRequest& request);

//! Evaluate the interval endpoints for already-solved indices. Missing
//! order statistics are replaced by support bounds when given, otherwise
//! ExtremeQuantileError names the failing tail.
ConfidenceInterval apply_indices(const SortedSample& sample,
                                 const QuantileRequest& request,
                                 const EndpointIndices& indices,
                                 const SupportBounds& bounds = {});

ConfidenceInterval confidence_interval(const SortedSample& sample,
                                       const QuantileRequest& request,
                                       const SupportBounds& bounds = {});

//! Smallest sample size for which every endpoint of the request is
//! computable without support bounds.
std::size_t minimal_sample_size(const QuantileRequest& request);

//! Limit probability of excluding Q(p) + kappa n^{-1/2}, where f_at_q is
//! the density at the true quantile.
double asymptotic_power(double kappa,
                        double p,
                        double alpha,
                        double f_at_q,
                        Side side);

} // namespace qlstat
