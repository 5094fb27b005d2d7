#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qlstat {

//! Position u in (0,1) of a sample of size n split into the integer order
//! u(n+1) = k + epsilon with k = floor(u(n+1)), 0 <= epsilon < 1.
struct FractionalIndex
{
  double u = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  double epsilon = 0.0;

  //! true when X_{n:k} and (if epsilon > 0) X_{n:k+1} both exist
  bool evaluable() const noexcept
  {
    return k >= 1 && (k < n || (k == n && epsilon == 0.0));
  }
  //! needs the (nonexistent) zeroth order statistic
  bool below_sample() const noexcept { return k < 1; }
  //! needs the (nonexistent) (n+1)th order statistic
  bool above_sample() const noexcept
  {
    return k > n || (k == n && epsilon > 0.0);
  }
};

//! Split u(n+1) into k and epsilon without validating evaluability.
//! u(n+1) within 1e-12 of an integer snaps to that integer.
FractionalIndex split_index(double u, std::size_t n);

//! As split_index, but throws ExtremeQuantileError (carrying the smallest
//! evaluable n) when the index falls outside the sample.
FractionalIndex decompose(double u, std::size_t n);

//! Smallest sample size n at which u(n+1) is evaluable.
std::size_t minimal_evaluable_n(double u);

//! Ascending sample. Ties are allowed.
class SortedSample
{
public:
  SortedSample() = default;
  //! sorts the values; throws DataError on an empty or non-finite sample
  explicit SortedSample(std::vector<double> values);

  //! wraps values the caller guarantees are already ascending
  static SortedSample from_sorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  //! X_{n:k}, 1-based
  double order_stat(std::size_t k) const { return values_.at(k - 1); }

private:
  std::vector<double> values_;
};

//! Known support bounds used in place of X_{n:0} and X_{n:n+1}.
struct SupportBounds
{
  std::optional<double> lower;
  std::optional<double> upper;
};

//! (1 - eps) X_{n:k} + eps X_{n:k+1}; exactly X_{n:k} when eps = 0.
double l_statistic(const SortedSample& sample, const FractionalIndex& idx);

//! As l_statistic, substituting known support bounds for the missing
//! zeroth / (n+1)th order statistic. Sets *used_bound when a bound entered.
double l_statistic(const SortedSample& sample,
                   const FractionalIndex& idx,
                   const SupportBounds& bounds,
                   bool* used_bound = nullptr);

//! Convenience: l_statistic at decompose(u, sample.size()).
double l_statistic(const SortedSample& sample, double u);

} // namespace qlstat
