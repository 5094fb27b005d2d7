#include "qlstat/fractional_order.hpp"

#include "qlstat/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlstat {

namespace {

constexpr double kSnapTolerance = 1e-12;

void check_u(double u)
{
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream msg;
    msg << "quantile index must lie in (0, 1), got " << u;
    throw DomainError(msg.str());
  }
}

// weighted interpolation that never leaves [lo, hi]
double interpolate(double lo, double hi, double eps)
{
  if (eps == 0.0 || lo == hi)
    return lo;
  return std::clamp(lo + eps * (hi - lo), std::min(lo, hi), std::max(lo, hi));
}

} // namespace

FractionalIndex split_index(double u, std::size_t n)
{
  check_u(u);
  const double pos = u * (static_cast<double>(n) + 1.0);
  const double nearest = std::round(pos);
  const double snapped =
    std::fabs(pos - nearest) <= kSnapTolerance * std::max(1.0, pos) ? nearest
                                                                     : pos;
  const double k = std::floor(snapped);
  FractionalIndex idx;
  idx.u = u;
  idx.n = n;
  idx.k = static_cast<std::size_t>(k);
  idx.epsilon = snapped - k;
  return idx;
}

std::size_t minimal_evaluable_n(double u)
{
  check_u(u);
  // need u(n+1) >= 1 and u(n+1) <= n
  std::size_t n = static_cast<std::size_t>(
    std::max(std::ceil(1.0 / u - 1.0), std::ceil(u / (1.0 - u))));
  n = std::max<std::size_t>(n, 1);
  // guard against rounding in the closed forms above
  while (n > 1 && split_index(u, n - 1).evaluable())
    --n;
  while (!split_index(u, n).evaluable())
    ++n;
  return n;
}

FractionalIndex decompose(double u, std::size_t n)
{
  FractionalIndex idx = split_index(u, n);
  if (!idx.evaluable()) {
    std::ostringstream msg;
    msg << "index u=" << u << " needs order statistic "
        << (idx.below_sample() ? "0" : std::to_string(n + 1))
        << " of a sample of size " << n;
    throw ExtremeQuantileError(msg.str(), idx.below_sample() ? "low" : "high",
                               minimal_evaluable_n(u));
  }
  return idx;
}

SortedSample::SortedSample(std::vector<double> values)
  : values_(std::move(values))
{
  if (values_.empty())
    throw DataError("sample is empty");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw DataError("sample contains a non-finite value");
  }
  std::sort(values_.begin(), values_.end());
}

SortedSample SortedSample::from_sorted(std::vector<double> values)
{
  SortedSample s;
  s.values_ = std::move(values);
  return s;
}

double l_statistic(const SortedSample& sample, const FractionalIndex& idx)
{
  if (idx.n != sample.size()) {
    throw DomainError("fractional index was built for a different sample size");
  }
  if (!idx.evaluable()) {
    throw ExtremeQuantileError("L-statistic index outside the sample",
                               idx.below_sample() ? "low" : "high",
                               minimal_evaluable_n(idx.u));
  }
  const double lo = sample.order_stat(idx.k);
  if (idx.epsilon == 0.0)
    return lo;
  return interpolate(lo, sample.order_stat(idx.k + 1), idx.epsilon);
}

double l_statistic(const SortedSample& sample,
                   const FractionalIndex& idx,
                   const SupportBounds& bounds,
                   bool* used_bound)
{
  if (used_bound)
    *used_bound = false;
  if (idx.evaluable())
    return l_statistic(sample, idx);

  const std::size_t n = sample.size();
  if (idx.below_sample() && bounds.lower && idx.k == 0 && n >= 1) {
    if (used_bound)
      *used_bound = true;
    return interpolate(*bounds.lower, sample.order_stat(1), idx.epsilon);
  }
  if (idx.above_sample() && bounds.upper && idx.k == n) {
    if (used_bound)
      *used_bound = true;
    return interpolate(sample.order_stat(n), *bounds.upper, idx.epsilon);
  }
  return l_statistic(sample, idx); // throws
}

double l_statistic(const SortedSample& sample, double u)
{
  return l_statistic(sample, decompose(u, sample.size()));
}

} // namespace qlstat
