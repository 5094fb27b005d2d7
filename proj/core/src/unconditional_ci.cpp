#include "qlstat/unconditional_ci.hpp"

#include "qlstat/error.hpp"
#include "qlstat/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qlstat {

namespace {

constexpr double kIndexFloor = 1e-12;
constexpr double kFiniteDiffStep = 1e-6;
constexpr double kResidualTolerance = 1e-10;

void check_open_unit(double v, const char* name)
{
  if (!(v > 0.0 && v < 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in (0, 1), got " << v;
    throw DomainError(msg.str());
  }
}

// Defining equation of the endpoint index, oriented to be increasing in u.
//   high tail: alpha - I_p((n+1)u, (n+1)(1-u))
//   low tail:  I_{1-p}((n+1)(1-u), (n+1)u) - alpha   (= P(beta > p) - alpha)
class IndexEquation
{
public:
  IndexEquation(std::size_t n, double p, double alpha, Tail tail)
    : m_(static_cast<double>(n) + 1.0)
    , p_(p)
    , alpha_(alpha)
    , tail_(tail)
  {}

  double operator()(double u) const
  {
    if (tail_ == Tail::high)
      return alpha_ - special::reg_inc_beta(p_, { m_ * u, m_ * (1.0 - u) });
    return special::reg_inc_beta(1.0 - p_, { m_ * (1.0 - u), m_ * u }) -
           alpha_;
  }

private:
  double m_;
  double p_;
  double alpha_;
  Tail tail_;
};

double solve_index(std::size_t n, double p, double alpha, Tail tail)
{
  check_open_unit(p, "p");
  check_open_unit(alpha, "alpha");
  if (n == 0)
    throw DomainError("sample size must be positive");

  const IndexEquation f(n, p, alpha, tail);
  double lo = kIndexFloor;
  double hi = 1.0 - kIndexFloor;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo > 0.0 || f_hi < 0.0) {
    std::ostringstream msg;
    msg << "no " << (tail == Tail::high ? "upper" : "lower")
        << " endpoint index for n=" << n << ", p=" << p
        << ", alpha=" << alpha;
    throw ExtremeQuantileError(msg.str(), tail == Tail::high ? "high" : "low");
  }

  double x = std::clamp(endpoint_approx(n, p, alpha, tail), lo, hi);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0)
      break;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    if (std::fabs(fx) <= 1e-15 || hi - lo <= 4.0 * eps * x)
      break;

    const double step = std::min({ kFiniteDiffStep, 0.5 * x, 0.5 * (1.0 - x) });
    const double slope = (f(x + step) - f(x - step)) / (2.0 * step);
    double next = slope > 0.0 ? x - fx / slope
                              : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 2.0 * eps * x) {
      x = next;
      break;
    }
    x = next;
  }

  const double residual = std::fabs(f(x));
  if (residual > kResidualTolerance)
    throw NumericalError("endpoint index solver did not converge", residual);
  return x;
}

double residual_of(std::size_t n, double p, double alpha, Tail tail, double u)
{
  return std::fabs(IndexEquation(n, p, alpha, tail)(u));
}

} // namespace

std::string_view to_string(Side side)
{
  switch (side) {
    case Side::lower:
      return "lower";
    case Side::upper:
      return "upper";
    case Side::two_sided:
      return "two_sided";
  }
  return "two_sided";
}

Side parse_side(std::string_view text)
{
  if (text == "lower")
    return Side::lower;
  if (text == "upper")
    return Side::upper;
  if (text == "two_sided" || text == "two-sided" || text == "two")
    return Side::two_sided;
  throw DomainError("side must be one of lower, upper, two_sided; got '" +
                    std::string(text) + "'");
}

void QuantileRequest::validate() const
{
  check_open_unit(p, "p");
  check_open_unit(alpha, "alpha");
  check_open_unit(tail_split, "tail split");
}

double QuantileRequest::low_level() const noexcept
{
  return side == Side::two_sided ? tail_split * alpha : alpha;
}

double QuantileRequest::high_level() const noexcept
{
  return side == Side::two_sided ? (1.0 - tail_split) * alpha : alpha;
}

double solve_u_high(std::size_t n, double p, double alpha)
{
  return solve_index(n, p, alpha, Tail::high);
}

double solve_u_low(std::size_t n, double p, double alpha)
{
  return solve_index(n, p, alpha, Tail::low);
}

double endpoint_approx(std::size_t n, double p, double alpha, Tail tail)
{
  check_open_unit(p, "p");
  check_open_unit(alpha, "alpha");
  const double dn = static_cast<double>(n);
  const double z = special::normal_quantile(1.0 - alpha);
  const double spread = z * std::sqrt(p * (1.0 - p) / dn);
  const double drift = (2.0 * p - 1.0) * (z * z + 2.0) / (6.0 * dn);
  return (tail == Tail::high ? p + spread : p - spread) - drift;
}

double calibrate_alpha(double alpha, double p, std::size_t n, double epsilon)
{
  if (!(alpha > 0.0 && alpha < 0.5)) {
    std::ostringstream msg;
    msg << "calibration needs a tail level in (0, 0.5), got " << alpha;
    throw DomainError(msg.str());
  }
  check_open_unit(p, "p");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw DomainError("interpolation weight must lie in [0, 1]");
  if (n == 0)
    throw DomainError("sample size must be positive");

  const double z = special::normal_quantile(1.0 - alpha);
  const double term = epsilon * (1.0 - epsilon) * z * special::normal_pdf(z) /
                      (p * (1.0 - p) * static_cast<double>(n));
  const double calibrated = alpha + term;
  if (!(calibrated < 1.0))
    throw CalibrationOverflowError(calibrated);
  return calibrated;
}

EndpointIndices endpoint_indices(std::size_t n, const QuantileRequest& request)
{
  request.validate();
  EndpointIndices out;

  auto solve_tail = [&](Tail tail, double level, double& u, double& eps,
                        double& level_used, double& residual) {
    u = solve_index(n, request.p, level, tail);
    eps = split_index(u, n).epsilon;
    level_used = level;
    if (request.calibrated) {
      level_used = calibrate_alpha(level, request.p, n, eps);
      u = solve_index(n, request.p, level_used, tail);
      eps = split_index(u, n).epsilon;
    }
    residual = residual_of(n, request.p, level_used, tail, u);
  };

  if (request.needs_low()) {
    double u = 0.0;
    solve_tail(Tail::low, request.low_level(), u, out.eps_low,
               out.alpha_effective_low, out.residual_low);
    out.u_low = u;
  }
  if (request.needs_high()) {
    double u = 0.0;
    solve_tail(Tail::high, request.high_level(), u, out.eps_high,
               out.alpha_effective_high, out.residual_high);
    out.u_high = u;
  }
  return out;
}

std::size_t minimal_sample_size(const QuantileRequest& request)
{
  request.validate();
  auto ok = [&](std::size_t n) {
    try {
      const EndpointIndices idx = endpoint_indices(n, request);
      if (idx.u_low && !split_index(*idx.u_low, n).evaluable())
        return false;
      if (idx.u_high && !split_index(*idx.u_high, n).evaluable())
        return false;
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  std::size_t good = 1;
  std::size_t bad = 0;
  while (!ok(good)) {
    bad = good;
    if (good > (std::size_t{ 1 } << 30))
      throw ExtremeQuantileError("no computable sample size for this request");
    good *= 2;
  }
  while (good - bad > 1) {
    const std::size_t mid = bad + (good - bad) / 2;
    if (ok(mid))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

ConfidenceInterval apply_indices(const SortedSample& sample,
                                 const QuantileRequest& request,
                                 const EndpointIndices& indices,
                                 const SupportBounds& bounds)
{
  const std::size_t n = sample.size();
  ConfidenceInterval ci;
  ci.request = request;
  ci.indices = indices;
  ci.n = n;
  ci.lower = -std::numeric_limits<double>::infinity();
  ci.upper = std::numeric_limits<double>::infinity();

  auto endpoint = [&](double u, const char* tail) {
    const FractionalIndex idx = split_index(u, n);
    bool used = false;
    if (!idx.evaluable()) {
      const bool bounded = idx.below_sample()
                             ? (bounds.lower.has_value() && idx.k == 0)
                             : (bounds.upper.has_value() && idx.k == n);
      if (!bounded) {
        std::ostringstream msg;
        msg << tail << " endpoint index u=" << u << " needs order statistic "
            << (idx.below_sample() ? std::size_t{ 0 } : n + 1)
            << " of a sample of size " << n;
        std::optional<std::size_t> need;
        try {
          need = minimal_sample_size(request);
        } catch (const Error&) {
        }
        throw ExtremeQuantileError(msg.str(), tail, need);
      }
    }
    const double value = l_statistic(sample, idx, bounds, &used);
    ci.conservative = ci.conservative || used;
    return value;
  };

  if (indices.u_low)
    ci.lower = endpoint(*indices.u_low, "low");
  if (indices.u_high)
    ci.upper = endpoint(*indices.u_high, "high");
  return ci;
}

ConfidenceInterval confidence_interval(const SortedSample& sample,
                                       const QuantileRequest& request,
                                       const SupportBounds& bounds)
{
  return apply_indices(sample, request,
                       endpoint_indices(sample.size(), request), bounds);
}

double asymptotic_power(double kappa,
                        double p,
                        double alpha,
                        double f_at_q,
                        Side side)
{
  check_open_unit(p, "p");
  check_open_unit(alpha, "alpha");
  if (!(f_at_q > 0.0))
    throw DomainError("density at the quantile must be positive");
  const double s = kappa * f_at_q / std::sqrt(p * (1.0 - p));
  switch (side) {
    case Side::lower:
      return special::normal_cdf(special::normal_quantile(alpha) + s);
    case Side::upper:
      return special::normal_cdf(special::normal_quantile(alpha) - s);
    case Side::two_sided: {
      const double z = special::normal_quantile(0.5 * alpha);
      return special::normal_cdf(z + s) + special::normal_cdf(z - s);
    }
  }
  return 0.0;
}

} // namespace qlstat
