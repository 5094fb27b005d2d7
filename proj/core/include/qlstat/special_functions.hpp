#pragma once

//! Special functions behind every beta and normal computation in the library.
//!
//! All routines are pure and thread-safe. Densities and normalising
//! constants are evaluated in log space so that shape parameters of order
//! 1e6 (sample sizes in the simulation harness) neither overflow nor lose
//! the leading digits to cancellation.

#include "qlstat/error.hpp"

namespace qlstat {

//! A value in [0, 1]. Construction validates.
class Probability
{
public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

private:
  double value_ = 0.0;
};

//! Shape pair of a beta distribution, both strictly positive.
struct BetaParams
{
  double a;
  double b;

  //! throws DomainError unless a > 0 and b > 0 (and both finite)
  void validate() const;

  //! beta((n+1)u, (n+1)(1-u)), the law of the ideal fractional order
  //! statistic of a uniform sample at index u
  static BetaParams fractional(double n, double u);
};

namespace special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

//! ln Gamma(x) for x > 0
double log_gamma(double x);

//! Stirling remainder: ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)]
double log_gamma_correction(double x);

//! ln B(a, b)
double log_beta(double a, double b);

//! Regularized incomplete beta I_x(a, b).
//! Uses the continued fraction with the usual switch to I_{1-x}(b, a)
//! above x = (a + 1) / (a + b + 2).
double reg_inc_beta(double x, const BetaParams& params);

//! x solving I_x(a, b) = q for 0 < q < 1.
//! Newton iteration on I_x - q, safeguarded by bisection.
//! Throws NumericalError if the residual exceeds 1e-10.
double inv_reg_inc_beta(double q, const BetaParams& params);

//! beta density at 0 < x < 1
double beta_pdf(double x, const BetaParams& params);

//! log of the beta density
double beta_log_pdf(double x, const BetaParams& params);

//! standard normal density
double normal_pdf(double z);
//! standard normal CDF
double normal_cdf(double z);
//! standard normal quantile for 0 < q < 1
double normal_quantile(double q);

} // namespace special
} // namespace qlstat
