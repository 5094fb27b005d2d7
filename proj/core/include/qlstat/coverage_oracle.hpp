#pragma once

//! Exact finite-sample coverage of order-statistic confidence limits.
//!
//! With a continuous F, F(X_{n:k}) is distributed as the uniform order
//! statistic U_{n:k} ~ beta(k, n+1-k), so the coverage of a limit built from
//! a single order statistic is an incomplete beta value. The interpolated
//! limit (1-eps) U_{n:k} + eps U_{n:k+1} is handled by integrating the joint
//! density of two consecutive uniform order statistics; this is the exact
//! coverage when F is uniform.

#include "qlstat/unconditional_ci.hpp"

#include <cstddef>
#include <string_view>

namespace qlstat {

enum class CoverageMethod
{
  closed_form_integer,
  quadrature_interpolated
};

std::string_view to_string(CoverageMethod method);

struct ExactCoverage
{
  double cp = 0.0;
  CoverageMethod method = CoverageMethod::closed_form_integer;
  double abs_error_bound = 0.0;
};

//! Coverage of a one-sided limit at order statistic k.
//! side == lower: the interval (-inf, X_{n:k}], coverage P(U_{n:k} > p).
//! side == upper: the interval [X_{n:k}, inf), coverage P(U_{n:k} < p).
ExactCoverage exact_cp_integer(std::size_t n, std::size_t k, double p, Side side);

//! Coverage of a one-sided limit at the interpolated index u (eps > 0).
//! Throws NumericalError when the quadrature bound exceeds 1e-8.
ExactCoverage exact_cp_interpolated(std::size_t n, double u, double p, Side side);

//! P((1-eps) U_{n:k} + eps U_{n:k+1} < p) at the index u, dispatching to the
//! closed form when eps = 0.
ExactCoverage prob_limit_below(std::size_t n, double u, double p);

//! Coverage of the interval a request produces on a uniform sample of size n.
//! Two-sided coverage is 1 - P(low limit > p) - P(high limit < p).
ExactCoverage exact_interval_coverage(std::size_t n, const QuantileRequest& request);

} // namespace qlstat
