#pragma once

//! Pilot estimates of the quantities entering the plug-in bandwidth:
//! the covariate density and its slope at x0, and the first two
//! x-derivatives of the conditional CDF F_{Y|X}(xi_p; x) at x0.

#include <array>
#include <cstddef>
#include <span>

namespace qlstat {

//! sample standard deviation (n - 1 denominator)
double sample_sd(std::span<const double> x);

//! Gaussian kernel density estimate at x0 with bandwidth h.
double gaussian_kde(std::span<const double> x, double x0, double h);

//! Derivative in x0 of gaussian_kde at the same bandwidth.
double gaussian_kde_derivative(std::span<const double> x, double x0, double h);

struct DensityEstimate
{
  double value = 0.0;
  double derivative = 0.0;
  //! normal-reference pilots: 1.06 s n^{-1/5} (value), 1.06 s n^{-1/7} (slope)
  double value_bandwidth = 0.0;
  double derivative_bandwidth = 0.0;
  //! sample standard deviation of the covariate
  double scale = 0.0;
  std::size_t n = 0;
};

//! Needs at least 10 observations; throws DegenerateError on constant data.
DensityEstimate kde_with_derivative(std::span<const double> x, double x0);

//! Least-squares cubic in (x - x0) over the points with |x - x0| <= h.
struct PolynomialFit
{
  //! coefficients of 1, (x-x0), (x-x0)^2, (x-x0)^3 in the original units
  std::array<double, 4> coefficients{};
  double max_abs_residual = 0.0;
  std::size_t n_used = 0;
};

//! Throws InsufficientDataError below 8 points in the window and
//! CollinearDesignError when the design is rank deficient.
PolynomialFit local_cubic_fit(std::span<const double> x,
                              std::span<const double> response,
                              double x0,
                              double h);

struct CdfDerivativeEstimate
{
  double d1 = 0.0; //!< dF_{Y|X}(xi_p; x)/dx at x0
  double d2 = 0.0; //!< d^2F_{Y|X}(xi_p; x)/dx^2 at x0
  double pilot_xi_p = 0.0;
  double pilot_bandwidth = 0.0;
  std::size_t local_n = 0;
  //! kernel estimate of f_{Y|X}(xi_p; x0) from the pilot window
  double conditional_density = 0.0;
  double conditional_density_bandwidth = 0.0;
};

//! Local cubic regression of 1{Y <= xi_p} on X with uniform weights on
//! |X - x0| <= 0.75 s_X n^{-1/7}; xi_p is the L-statistic p-quantile of the
//! Y values inside that window.
CdfDerivativeEstimate local_cubic_cdf_derivs(std::span<const double> x,
                                             std::span<const double> y,
                                             double x0,
                                             double p);

} // namespace qlstat
