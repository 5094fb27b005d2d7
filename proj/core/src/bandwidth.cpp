#include "qlstat/bandwidth.hpp"

#include "qlstat/error.hpp"
#include "qlstat/special_functions.hpp"

#include <cmath>
#include <sstream>

namespace qlstat {

namespace {

void check_p(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("p must lie in (0, 1)");
}

BandwidthReport fallback(std::size_t n,
                         const Nuisances& nuisances,
                         double rate,
                         bool apply_large_n)
{
  if (!(nuisances.x_scale > 0.0))
    throw DegenerateError(
      "bias bracket vanished and no covariate scale is available");
  BandwidthReport rep;
  rep.n = n;
  rep.nuisances = nuisances;
  rep.flat_bias = true;
  rep.rule = "flat_bias_fallback";
  rep.base_h = nuisances.x_scale * std::pow(static_cast<double>(n), rate);
  rep.large_n_coefficient = apply_large_n ? large_n_coefficient(n) : 1.0;
  rep.h = rep.base_h * rep.large_n_coefficient;
  return rep;
}

bool flat(double bracket)
{
  return bracket == 0.0 || !std::isfinite(bracket);
}

} // namespace

Nuisances Nuisances::from(const DensityEstimate& density,
                          const CdfDerivativeEstimate& cdf)
{
  Nuisances out;
  out.f_x = density.value;
  out.f_x_prime = density.derivative;
  out.cdf_d1 = cdf.d1;
  out.cdf_d2 = cdf.d2;
  out.cond_density = cdf.conditional_density;
  out.x_scale = density.scale;
  return out;
}

double plus_plus_ratio()
{
  constexpr double d = 1.0;
  constexpr double b = 2.0;
  return std::pow(std::pow(2.0 * d / (2.0 * b + d), 2.0), 1.0 / (2.0 * b + 3.0 * d));
}

double large_n_coefficient(std::size_t n)
{
  return std::pow(std::max(1.0, static_cast<double>(n) / 1000.0), 5.0 / 60.0);
}

double bias_leading_term(double h, const Nuisances& nuisances)
{
  if (!(nuisances.f_x > 0.0) || !(nuisances.cond_density > 0.0))
    throw DegenerateError("bias needs positive density estimates");
  return -h * h * nuisances.bracket() /
         (6.0 * nuisances.f_x * nuisances.cond_density);
}

int bias_sign(const Nuisances& nuisances)
{
  const double b = bias_leading_term(1.0, nuisances);
  return (b > 0.0) - (b < 0.0);
}

double h_plus_minus(std::size_t n, double z, double p, double f_x, double bracket)
{
  check_p(p);
  if (!(f_x > 0.0))
    throw DegenerateError("covariate density estimate must be positive");
  const double ratio =
    z / (3.0 * std::sqrt(p * (1.0 - p) * f_x) * std::fabs(bracket));
  return std::pow(static_cast<double>(n), -3.0 / 7.0) * std::pow(ratio, 2.0 / 7.0);
}

BandwidthReport plugin_one_sided(std::size_t n,
                                 double p,
                                 double alpha,
                                 const Nuisances& nuisances,
                                 Side ci_side,
                                 bool apply_large_n)
{
  check_p(p);
  if (ci_side == Side::two_sided)
    throw DomainError("plugin_one_sided needs a one-sided interval");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw DomainError("one-sided plug-in needs 0 < alpha < 0.5");
  if (n == 0)
    throw DomainError("sample size must be positive");

  BandwidthReport rep;
  if (flat(nuisances.bracket())) {
    rep = fallback(n, nuisances, -3.0 / 7.0, apply_large_n);
    rep.side = ci_side;
    return rep;
  }
  rep.n = n;
  rep.side = ci_side;
  rep.nuisances = nuisances;
  rep.bias_sign = bias_sign(nuisances);

  const double z = special::normal_quantile(1.0 - alpha);
  const double hpm = h_plus_minus(n, z, p, nuisances.f_x, nuisances.bracket());
  const bool negative_bias = rep.bias_sign < 0;
  const bool use_pm = ci_side == Side::lower ? negative_bias : !negative_bias;
  rep.rule = use_pm ? "h_plus_minus" : "h_plus_plus";
  rep.base_h = use_pm ? hpm : plus_plus_ratio() * hpm;
  rep.large_n_coefficient = apply_large_n ? large_n_coefficient(n) : 1.0;
  rep.h = rep.base_h * rep.large_n_coefficient;
  return rep;
}

BandwidthReport plugin_two_sided(std::size_t n,
                                 double p,
                                 const Nuisances& nuisances,
                                 bool apply_large_n)
{
  check_p(p);
  if (n == 0)
    throw DomainError("sample size must be positive");
  const double bracket = nuisances.bracket();
  BandwidthReport rep;
  if (flat(bracket)) {
    rep = fallback(n, nuisances, -1.0 / 3.0, apply_large_n);
    rep.side = Side::two_sided;
    return rep;
  }
  rep.n = n;
  rep.side = Side::two_sided;
  rep.nuisances = nuisances;
  rep.bias_sign = bias_sign(nuisances);

  const double sgn = rep.bias_sign < 0 ? -1.0 : 1.0; // sgn(0) := +1
  const double skew = 1.0 - 2.0 * p;
  const double numer = sgn * skew + std::sqrt(skew * skew + 4.0);
  rep.rule = "two_sided";
  // cbrt rather than pow(., -1/3): exact on perfect cubes such as n = 1000
  rep.base_h = std::cbrt(numer / (2.0 * std::fabs(bracket))) /
               std::cbrt(static_cast<double>(n));
  rep.large_n_coefficient = apply_large_n ? large_n_coefficient(n) : 1.0;
  rep.h = rep.base_h * rep.large_n_coefficient;
  return rep;
}

BandwidthReport plugin_bandwidth(std::span<const double> x,
                                 std::span<const double> y,
                                 double x0,
                                 const QuantileRequest& request,
                                 bool apply_large_n)
{
  request.validate();
  const DensityEstimate density = kde_with_derivative(x, x0);
  const CdfDerivativeEstimate cdf = local_cubic_cdf_derivs(x, y, x0, request.p);
  const Nuisances nuisances = Nuisances::from(density, cdf);

  BandwidthReport rep =
    request.side == Side::two_sided
      ? plugin_two_sided(x.size(), request.p, nuisances, apply_large_n)
      : plugin_one_sided(x.size(), request.p, request.alpha, nuisances,
                         request.side, apply_large_n);
  rep.density = density;
  rep.cdf = cdf;
  return rep;
}

} // namespace qlstat
