#include "qlstat/nuisance.hpp"

#include "qlstat/error.hpp"
#include "qlstat/fractional_order.hpp"
#include "qlstat/special_functions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace qlstat {

namespace {

constexpr std::size_t kMinDensityPoints = 10;
constexpr std::size_t kMinCubicPoints = 8;
constexpr double kNormalReference = 1.06;
constexpr double kPilotWindowScale = 0.75;

void check_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError("bandwidth must be positive and finite");
}

} // namespace

double sample_sd(std::span<const double> x)
{
  if (x.size() < 2)
    return 0.0;
  double mean = 0.0;
  for (double v : x)
    mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x)
    ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double gaussian_kde(std::span<const double> x, double x0, double h)
{
  check_bandwidth(h);
  if (x.empty())
    throw DataError("kernel density estimate of an empty sample");
  double sum = 0.0;
  for (double xi : x)
    sum += special::normal_pdf((x0 - xi) / h);
  return sum / (static_cast<double>(x.size()) * h);
}

double gaussian_kde_derivative(std::span<const double> x, double x0, double h)
{
  check_bandwidth(h);
  if (x.empty())
    throw DataError("kernel density estimate of an empty sample");
  // d/dx0 phi((x0 - xi)/h) / h = -t phi(t) / h^2
  double sum = 0.0;
  for (double xi : x) {
    const double t = (x0 - xi) / h;
    sum -= t * special::normal_pdf(t);
  }
  return sum / (static_cast<double>(x.size()) * h * h);
}

DensityEstimate kde_with_derivative(std::span<const double> x, double x0)
{
  if (x.size() < kMinDensityPoints) {
    std::ostringstream msg;
    msg << "density estimation needs at least " << kMinDensityPoints
        << " observations, got " << x.size();
    throw InsufficientDataError(msg.str());
  }
  const double s = sample_sd(x);
  if (!(s > 0.0))
    throw DegenerateError("covariate has zero variance");
  const double n = static_cast<double>(x.size());

  DensityEstimate est;
  est.n = x.size();
  est.scale = s;
  est.value_bandwidth = kNormalReference * s * std::pow(n, -1.0 / 5.0);
  est.derivative_bandwidth = kNormalReference * s * std::pow(n, -1.0 / 7.0);
  est.value = gaussian_kde(x, x0, est.value_bandwidth);
  est.derivative = gaussian_kde_derivative(x, x0, est.derivative_bandwidth);
  return est;
}

PolynomialFit local_cubic_fit(std::span<const double> x,
                              std::span<const double> response,
                              double x0,
                              double h)
{
  check_bandwidth(h);
  if (x.size() != response.size())
    throw DataError("covariate and response lengths differ");

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::fabs(x[i] - x0) <= h)
      rows.push_back(i);
  }
  if (rows.size() < kMinCubicPoints) {
    std::ostringstream msg;
    msg << "local cubic fit needs at least " << kMinCubicPoints
        << " points within " << h << " of " << x0 << ", found " << rows.size();
    throw InsufficientDataError(msg.str());
  }

  // design in t = (x - x0) / h keeps the normal equations well scaled
  Eigen::MatrixXd design(rows.size(), 4);
  Eigen::VectorXd target(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double t = (x[rows[r]] - x0) / h;
    design(r, 0) = 1.0;
    design(r, 1) = t;
    design(r, 2) = t * t;
    design(r, 3) = t * t * t;
    target(r) = response[rows[r]];
  }
  const Eigen::Matrix4d gram = design.transpose() * design;
  const Eigen::Vector4d rhs = design.transpose() * target;
  const Eigen::LDLT<Eigen::Matrix4d> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12))
    throw CollinearDesignError("local cubic design is rank deficient");
  const Eigen::Vector4d beta = ldlt.solve(rhs);

  PolynomialFit fit;
  fit.n_used = rows.size();
  double scale = 1.0;
  for (int j = 0; j < 4; ++j) {
    fit.coefficients[j] = beta(j) / scale;
    scale *= h;
  }
  fit.max_abs_residual = (design * beta - target).cwiseAbs().maxCoeff();
  return fit;
}

CdfDerivativeEstimate local_cubic_cdf_derivs(std::span<const double> x,
                                             std::span<const double> y,
                                             double x0,
                                             double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("p must lie in (0, 1)");
  if (x.size() != y.size())
    throw DataError("covariate and response lengths differ");
  const double s = sample_sd(x);
  if (!(s > 0.0))
    throw DegenerateError("covariate has zero variance");

  CdfDerivativeEstimate est;
  est.pilot_bandwidth = kPilotWindowScale * s *
                        std::pow(static_cast<double>(x.size()), -1.0 / 7.0);

  std::vector<double> local;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::fabs(x[i] - x0) <= est.pilot_bandwidth)
      local.push_back(y[i]);
  }
  if (local.size() < kMinCubicPoints) {
    std::ostringstream msg;
    msg << "pilot window around " << x0 << " holds " << local.size()
        << " points; need " << kMinCubicPoints;
    throw InsufficientDataError(msg.str());
  }
  est.local_n = local.size();

  const SortedSample sorted(local);
  FractionalIndex idx = split_index(p, sorted.size());
  // clamp to the sample for a pilot value at extreme p
  if (idx.below_sample()) {
    idx.k = 1;
    idx.epsilon = 0.0;
  } else if (idx.above_sample()) {
    idx.k = sorted.size();
    idx.epsilon = 0.0;
  }
  est.pilot_xi_p = l_statistic(sorted, idx);

  std::vector<double> indicator(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    indicator[i] = y[i] <= est.pilot_xi_p ? 1.0 : 0.0;
  const PolynomialFit fit =
    local_cubic_fit(x, indicator, x0, est.pilot_bandwidth);
  est.d1 = fit.coefficients[1];
  est.d2 = 2.0 * fit.coefficients[2];

  const double sy = sample_sd(local);
  if (!(sy > 0.0))
    throw DegenerateError("responses in the pilot window are constant");
  est.conditional_density_bandwidth =
    kNormalReference * sy * std::pow(static_cast<double>(local.size()), -0.2);
  est.conditional_density =
    gaussian_kde(local, est.pilot_xi_p, est.conditional_density_bandwidth);
  return est;
}

} // namespace qlstat
