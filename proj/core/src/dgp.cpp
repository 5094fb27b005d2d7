#include "qlstat/dgp.hpp"

#include "qlstat/error.hpp"
#include "qlstat/special_functions.hpp"

#include <cmath>
#include <string>

namespace qlstat {

namespace {

constexpr double kPi = special::kPi;

// bisection to double resolution on a continuous increasing cdf
template <class Cdf>
double invert_cdf(Cdf cdf, double p, double lo, double hi)
{
  while (cdf(lo) > p)
    lo = lo < 0.0 ? 2.0 * lo : lo - 1.0;
  while (cdf(hi) < p)
    hi = hi > 0.0 ? 2.0 * hi : hi + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void check_p(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("p must lie in (0, 1)");
}

const double kRqssShift = std::pow(2.0, -7.0 / 5.0);

} // namespace

namespace dist {

double t3_cdf(double t)
{
  const double r3 = std::sqrt(3.0);
  return 0.5 + (t / (r3 * (1.0 + t * t / 3.0)) + std::atan(t / r3)) / kPi;
}

double t3_quantile(double p)
{
  check_p(p);
  return invert_cdf(t3_cdf, p, -10.0, 10.0);
}

double chi2_3_cdf(double x)
{
  if (x <= 0.0)
    return 0.0;
  return std::erf(std::sqrt(0.5 * x)) -
         std::sqrt(2.0 * x / kPi) * std::exp(-0.5 * x);
}

double chi2_3_quantile(double p)
{
  check_p(p);
  return invert_cdf(chi2_3_cdf, p, 0.0, 10.0);
}

} // namespace dist

DgpKind parse_dgp_kind(std::string_view text)
{
  static constexpr std::pair<std::string_view, DgpKind> table[] = {
    { "normal", DgpKind::normal },
    { "cauchy", DgpKind::cauchy },
    { "uniform", DgpKind::uniform },
    { "exponential", DgpKind::exponential },
    { "lognormal", DgpKind::lognormal },
    { "t3", DgpKind::t3 },
    { "chi2_3_centered", DgpKind::chi2_3_centered },
    { "sine_bump", DgpKind::sine_bump },
    { "rqss_curve", DgpKind::rqss_curve },
  };
  for (const auto& [name, kind] : table) {
    if (name == text)
      return kind;
  }
  throw DomainError("unknown distribution '" + std::string(text) + "'");
}

std::string_view to_string(DgpKind kind)
{
  switch (kind) {
    case DgpKind::normal: return "normal";
    case DgpKind::cauchy: return "cauchy";
    case DgpKind::uniform: return "uniform";
    case DgpKind::exponential: return "exponential";
    case DgpKind::lognormal: return "lognormal";
    case DgpKind::t3: return "t3";
    case DgpKind::chi2_3_centered: return "chi2_3_centered";
    case DgpKind::sine_bump: return "sine_bump";
    case DgpKind::rqss_curve: return "rqss_curve";
  }
  return "normal";
}

Marginal Marginal::make(DgpKind kind, double center_p)
{
  Marginal m;
  m.kind = kind;
  m.center_p = center_p;
  if (kind == DgpKind::chi2_3_centered)
    m.offset = dist::chi2_3_quantile(center_p);
  return m;
}

double Marginal::draw(Philox4x32& rng) const
{
  switch (kind) {
    case DgpKind::normal:
      return rng.normal();
    case DgpKind::cauchy:
      return std::tan(kPi * (rng.uniform() - 0.5));
    case DgpKind::uniform:
      return rng.uniform();
    case DgpKind::exponential:
      return -std::log(rng.uniform());
    case DgpKind::lognormal:
      return std::exp(rng.normal());
    case DgpKind::t3: {
      const double z = rng.normal();
      double chi = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double g = rng.normal();
        chi += g * g;
      }
      return z / std::sqrt(chi / 3.0);
    }
    case DgpKind::chi2_3_centered: {
      double chi = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double g = rng.normal();
        chi += g * g;
      }
      return chi - offset;
    }
    default:
      throw DomainError("not a univariate distribution");
  }
}

double Marginal::quantile(double p) const
{
  check_p(p);
  switch (kind) {
    case DgpKind::normal:
      return special::normal_quantile(p);
    case DgpKind::cauchy:
      return std::tan(kPi * (p - 0.5));
    case DgpKind::uniform:
      return p;
    case DgpKind::exponential:
      return -std::log1p(-p);
    case DgpKind::lognormal:
      return std::exp(special::normal_quantile(p));
    case DgpKind::t3:
      return dist::t3_quantile(p);
    case DgpKind::chi2_3_centered:
      return dist::chi2_3_quantile(p) - offset;
    default:
      throw DomainError("not a univariate distribution");
  }
}

double Marginal::cdf(double y) const
{
  switch (kind) {
    case DgpKind::normal:
      return special::normal_cdf(y);
    case DgpKind::cauchy:
      return 0.5 + std::atan(y) / kPi;
    case DgpKind::uniform:
      return y <= 0.0 ? 0.0 : (y >= 1.0 ? 1.0 : y);
    case DgpKind::exponential:
      return y <= 0.0 ? 0.0 : -std::expm1(-y);
    case DgpKind::lognormal:
      return y <= 0.0 ? 0.0 : special::normal_cdf(std::log(y));
    case DgpKind::t3:
      return dist::t3_cdf(y);
    case DgpKind::chi2_3_centered:
      return dist::chi2_3_cdf(y + offset);
    default:
      throw DomainError("not a univariate distribution");
  }
}

double Marginal::density(double y) const
{
  switch (kind) {
    case DgpKind::normal:
      return special::normal_pdf(y);
    case DgpKind::cauchy:
      return 1.0 / (kPi * (1.0 + y * y));
    case DgpKind::uniform:
      return (y >= 0.0 && y <= 1.0) ? 1.0 : 0.0;
    case DgpKind::exponential:
      return y < 0.0 ? 0.0 : std::exp(-y);
    case DgpKind::lognormal:
      return y <= 0.0 ? 0.0 : special::normal_pdf(std::log(y)) / y;
    case DgpKind::t3: {
      const double q = 1.0 + y * y / 3.0;
      return 2.0 / (kPi * std::sqrt(3.0) * q * q);
    }
    case DgpKind::chi2_3_centered: {
      const double x = y + offset;
      return x <= 0.0 ? 0.0 : std::sqrt(x / (2.0 * kPi)) * std::exp(-0.5 * x);
    }
    default:
      throw DomainError("not a univariate distribution");
  }
}

bool Dgp::conditional() const noexcept
{
  return kind == DgpKind::sine_bump || kind == DgpKind::rqss_curve;
}

void Dgp::validate() const
{
  if (conditional() &&
      (noise == DgpKind::sine_bump || noise == DgpKind::rqss_curve))
    throw DomainError("noise must be a univariate distribution");
  if (!(center_p > 0.0 && center_p < 1.0))
    throw DomainError("centring quantile must lie in (0, 1)");
  if (std::isnan(scale))
    throw DomainError("noise scale is not a number");
}

Marginal Dgp::marginal() const
{
  if (conditional())
    throw DomainError("conditional design has no single marginal law");
  return Marginal::make(kind, center_p);
}

Marginal Dgp::noise_marginal() const
{
  return Marginal::make(noise, center_p);
}

double Dgp::draw(Philox4x32& rng) const
{
  return marginal().draw(rng);
}

double Dgp::noise_scale(double x) const
{
  double s = scale;
  if (s < 0.0)
    s = kind == DgpKind::sine_bump ? 0.5 : 0.2;
  return heteroskedastic ? s * (1.0 + x) : s;
}

double Dgp::curve(double x) const
{
  switch (kind) {
    case DgpKind::sine_bump:
      return 2.5 + std::sin(2.0 * x) + 2.0 * std::exp(-16.0 * x * x);
    case DgpKind::rqss_curve:
      return std::sqrt(x * (1.0 - x)) *
             std::sin(2.0 * kPi * (1.0 + kRqssShift) / (x + kRqssShift));
    default:
      throw DomainError("unconditional design has no regression curve");
  }
}

std::pair<double, double> Dgp::draw_xy(Philox4x32& rng) const
{
  return draw_xy(rng, noise_marginal());
}

std::pair<double, double> Dgp::draw_xy(Philox4x32& rng, const Marginal& noise) const
{
  double x = 0.0;
  if (kind == DgpKind::sine_bump)
    x = rng.normal();
  else if (kind == DgpKind::rqss_curve)
    x = rng.uniform();
  else
    throw DomainError("unconditional design has no covariate");
  const double s = noise_scale(x);
  const double u = noise.draw(rng);
  return { x, curve(x) + s * u };
}

double Dgp::quantile(double p) const
{
  return marginal().quantile(p);
}

double Dgp::conditional_quantile(double x, double p) const
{
  const double s = noise_scale(x);
  return curve(x) + (s == 0.0 ? 0.0 : s * noise_marginal().quantile(p));
}

} // namespace qlstat
