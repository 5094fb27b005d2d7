#pragma once

//! Coverage-error-optimal plug-in bandwidths for the windowed conditional
//! quantile interval with a scalar covariate.
//!
//! With bracket = f_X F^{(0,2)} + 2 f_X' F^{(0,1)}:
//!   bias          B_h   = -h^2 bracket / (6 f_X f_{Y|X})
//!   one-sided     h_+-  = n^{-3/7} (z_{1-a} / (3 sqrt(p(1-p) f_X) |bracket|))^{2/7}
//!                 h_++  = (2/5)^{2/7} h_+-           (~0.770 h_+-)
//!   two-sided     h     = n^{-1/3} ((sgn(B)(1-2p) + sqrt((1-2p)^2 + 4)) / (2 |bracket|))^{1/3}
//! A lower one-sided interval uses h_+- when B < 0 and h_++ otherwise; an
//! upper one-sided interval the reverse. Every rule is multiplied by
//! max(1, n/1000)^{5/60}, which leaves n <= 1000 untouched.

#include "qlstat/nuisance.hpp"
#include "qlstat/unconditional_ci.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace qlstat {

struct Nuisances
{
  double f_x = 0.0;       //!< covariate density at x0
  double f_x_prime = 0.0; //!< its derivative
  double cdf_d1 = 0.0;    //!< F^{(0,1)}_{Y|X}(xi_p; x0)
  double cdf_d2 = 0.0;    //!< F^{(0,2)}_{Y|X}(xi_p; x0)
  double cond_density = 0.0; //!< f_{Y|X}(xi_p; x0)
  double x_scale = 0.0;   //!< covariate standard deviation (fallback rule)

  static Nuisances from(const DensityEstimate& density,
                        const CdfDerivativeEstimate& cdf);

  double bracket() const noexcept { return f_x * cdf_d2 + 2.0 * f_x_prime * cdf_d1; }
};

struct BandwidthReport
{
  double h = 0.0;
  Side side = Side::two_sided;
  int bias_sign = 0;
  Nuisances nuisances;
  std::optional<DensityEstimate> density;
  std::optional<CdfDerivativeEstimate> cdf;
  double large_n_coefficient = 1.0;
  std::size_t n = 0;
  //! bandwidth before the large-n coefficient
  double base_h = 0.0;
  //! "h_plus_minus", "h_plus_plus", "two_sided" or "flat_bias_fallback"
  std::string rule;
  //! the bias bracket vanished; h fell back to s_X times the rate
  bool flat_bias = false;
};

//! magnitude of the h_++ / h_+- ratio, [(2d/(2b+d))^2]^{1/(2b+3d)} at d=1, b=2
inline constexpr double kPlusPlusRatio = 0.7696669794067008;
double plus_plus_ratio();

double large_n_coefficient(std::size_t n);

//! leading bias term; throws DegenerateError unless f_X > 0 and f_{Y|X} > 0
double bias_leading_term(double h, const Nuisances& nuisances);

//! sign of the leading bias (-1, 0, +1)
int bias_sign(const Nuisances& nuisances);

//! h_+- before the large-n coefficient, for a given critical value z
double h_plus_minus(std::size_t n, double z, double p, double f_x, double bracket);

BandwidthReport plugin_one_sided(std::size_t n,
                                 double p,
                                 double alpha,
                                 const Nuisances& nuisances,
                                 Side ci_side,
                                 bool apply_large_n = true);

BandwidthReport plugin_two_sided(std::size_t n,
                                 double p,
                                 const Nuisances& nuisances,
                                 bool apply_large_n = true);

//! Estimate the nuisances from (x, y) at x0 and apply the rule for the
//! request's side.
BandwidthReport plugin_bandwidth(std::span<const double> x,
                                 std::span<const double> y,
                                 double x0,
                                 const QuantileRequest& request,
                                 bool apply_large_n = true);

} // namespace qlstat
