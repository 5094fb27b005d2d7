#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qlstat::quadrature {

struct Options
{
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

struct Result
{
  double value = 0.0;
  //! estimated absolute error
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

//! Globally adaptive 15-point Gauss-Kronrod integration over [a, b].
//! The interval is first split at the given interior breakpoints; the
//! subinterval with the largest error estimate is then bisected until
//! the total error meets max(abs_tol, rel_tol * |value|).
Result integrate(const std::function<double(double)>& f,
                 double a,
                 double b,
                 const Options& options = {},
                 std::span<const double> breakpoints = {});

//! Iterated integral  int_a^b  int_{lo(x)}^{hi(x)} f(x, y) dy dx.
//! The reported error adds the outer estimate to the largest inner
//! estimate times (b - a).
Result integrate_iterated(const std::function<double(double, double)>& f,
                          double a,
                          double b,
                          const std::function<double(double)>& lo,
                          const std::function<double(double)>& hi,
                          const Options& outer = {},
                          const Options& inner = {},
                          std::span<const double> outer_breakpoints = {});

} // namespace qlstat::quadrature
