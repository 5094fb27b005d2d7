#include "qlstat/coverage_oracle.hpp"

#include "qlstat/error.hpp"
#include "qlstat/quadrature.hpp"
#include "qlstat/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace qlstat {

namespace {

constexpr double kOracleBound = 1e-8;

void check_p(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("p must lie in (0, 1)");
}

// P(U_{n:k} < p)
double order_stat_below(std::size_t n, std::size_t k, double p)
{
  return special::reg_inc_beta(
    p, { static_cast<double>(k), static_cast<double>(n + 1 - k) });
}

// P(U_{n:k} > p), evaluated without cancellation
double order_stat_above(std::size_t n, std::size_t k, double p)
{
  return special::reg_inc_beta(
    1.0 - p, { static_cast<double>(n + 1 - k), static_cast<double>(k) });
}

// P((1-eps) U_{n:k} + eps U_{n:k+1} < p) by iterated Gauss-Kronrod over the
// joint density  n! / ((k-1)! (n-k-1)!) s^{k-1} (1-t)^{n-k-1},  0 < s < t < 1.
quadrature::Result interpolated_below(std::size_t n,
                                      std::size_t k,
                                      double eps,
                                      double p)
{
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double log_norm = special::log_gamma(dn + 1.0) -
                          special::log_gamma(dk) - special::log_gamma(dn - dk);
  const double s_power = dk - 1.0;
  const double t_power = dn - dk - 1.0;

  auto density = [=](double s, double t) {
    double log_f = log_norm;
    if (s_power > 0.0)
      log_f += s_power * std::log(s);
    if (t_power > 0.0)
      log_f += t_power * std::log1p(-t);
    return std::exp(log_f);
  };
  auto t_lo = [](double s) { return s; };
  auto t_hi = [=](double s) {
    return std::min(1.0, (p - (1.0 - eps) * s) / eps);
  };

  std::vector<double> breaks;
  breaks.push_back(std::clamp(dk / (dn + 1.0), 0.0, p));
  if (p > eps)
    breaks.push_back((p - eps) / (1.0 - eps));
  // a few extra cuts around the bulk of U_{n:k}
  const double sd = std::sqrt(dk * (dn + 1.0 - dk)) / ((dn + 1.0) * std::sqrt(dn + 2.0));
  for (double m : { -4.0, -2.0, -1.0, 1.0, 2.0, 4.0 })
    breaks.push_back(dk / (dn + 1.0) + m * sd);

  quadrature::Options outer;
  outer.abs_tol = 1e-10;
  outer.rel_tol = 1e-12;
  quadrature::Options inner;
  inner.abs_tol = 1e-12;
  inner.rel_tol = 1e-13;
  return quadrature::integrate_iterated(density, 0.0, p, t_lo, t_hi, outer,
                                        inner, breaks);
}

} // namespace

std::string_view to_string(CoverageMethod method)
{
  return method == CoverageMethod::closed_form_integer
           ? "closed_form_integer"
           : "quadrature_interpolated";
}

ExactCoverage exact_cp_integer(std::size_t n, std::size_t k, double p, Side side)
{
  check_p(p);
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << "order statistic index must satisfy 1 <= k <= n, got k=" << k
        << ", n=" << n;
    throw DomainError(msg.str());
  }
  if (side == Side::two_sided)
    throw DomainError("a single order statistic gives a one-sided limit");
  ExactCoverage out;
  out.method = CoverageMethod::closed_form_integer;
  out.cp = side == Side::lower ? order_stat_above(n, k, p)
                               : order_stat_below(n, k, p);
  return out;
}

ExactCoverage prob_limit_below(std::size_t n, double u, double p)
{
  check_p(p);
  const FractionalIndex idx = decompose(u, n);
  ExactCoverage out;
  if (idx.epsilon == 0.0) {
    out.method = CoverageMethod::closed_form_integer;
    out.cp = order_stat_below(n, idx.k, p);
    return out;
  }
  const quadrature::Result r = interpolated_below(n, idx.k, idx.epsilon, p);
  out.method = CoverageMethod::quadrature_interpolated;
  out.cp = std::clamp(r.value, 0.0, 1.0);
  out.abs_error_bound = r.abs_error;
  if (!(r.abs_error <= kOracleBound))
    throw NumericalError("coverage quadrature missed its error bound",
                         r.abs_error);
  return out;
}

ExactCoverage exact_cp_interpolated(std::size_t n, double u, double p, Side side)
{
  if (side == Side::two_sided)
    throw DomainError("a single interpolated limit gives a one-sided interval");
  const FractionalIndex idx = decompose(u, n);
  if (idx.epsilon == 0.0)
    throw DomainError("interpolated coverage needs a fractional index (eps > 0)");
  ExactCoverage below = prob_limit_below(n, u, p);
  if (side == Side::lower)
    below.cp = 1.0 - below.cp;
  return below;
}

ExactCoverage exact_interval_coverage(std::size_t n, const QuantileRequest& request)
{
  const EndpointIndices idx = endpoint_indices(n, request);
  ExactCoverage out;
  out.method = CoverageMethod::closed_form_integer;
  double miss = 0.0;
  if (idx.u_low) {
    const ExactCoverage below = prob_limit_below(n, *idx.u_low, request.p);
    miss += 1.0 - below.cp;
    out.abs_error_bound += below.abs_error_bound;
    if (below.method == CoverageMethod::quadrature_interpolated)
      out.method = below.method;
  }
  if (idx.u_high) {
    const ExactCoverage below = prob_limit_below(n, *idx.u_high, request.p);
    miss += below.cp;
    out.abs_error_bound += below.abs_error_bound;
    if (below.method == CoverageMethod::quadrature_interpolated)
      out.method = below.method;
  }
  out.cp = std::clamp(1.0 - miss, 0.0, 1.0);
  return out;
}

} // namespace qlstat
