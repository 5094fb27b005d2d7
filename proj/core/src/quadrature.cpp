#include "qlstat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace qlstat::quadrature {

namespace {

// Kronrod abscissae (positive half, descending) and weights; the Gauss
// 7-point rule uses every second node.
constexpr std::array<double, 8> kNodes = {
  0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
  0.207784955007898467600689403773245, 0.000000000000000000000000000000000
};
constexpr std::array<double, 8> kKronrodWeights = {
  0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
  0.204432940075298892414161999234649, 0.209482141084727828012999174891714
};
constexpr std::array<double, 4> kGaussWeights = {
  0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
  0.381830050505118944950369775488975, 0.417959183673469387755102040816327
};

struct Segment
{
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1)
      gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return Segment{ a, b, kronrod, std::fabs(kronrod - gauss) };
}

} // namespace

Result integrate(const std::function<double(double)>& f,
                 double a,
                 double b,
                 const Options& options,
                 std::span<const double> breakpoints)
{
  Result result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  const double sign = b < a ? -1.0 : 1.0;
  if (b < a)
    std::swap(a, b);

  std::vector<double> cuts{ a };
  for (double bp : breakpoints) {
    if (bp > a && bp < b)
      cuts.push_back(bp);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = gauss_kronrod(f, cuts[i], cuts[i + 1]);
    result.evaluations += 15;
    total += s.value;
    error += s.error;
    heap.push(s);
  }

  while (error > std::max(options.abs_tol, options.rel_tol * std::fabs(total)) &&
         heap.size() < options.max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      break; // interval exhausted at double resolution
    heap.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // re-sum to shed the drift of the incremental updates
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = sign * total;
  result.abs_error = error;
  result.converged =
    error <= std::max(options.abs_tol, options.rel_tol * std::fabs(total));
  return result;
}

Result integrate_iterated(const std::function<double(double, double)>& f,
                          double a,
                          double b,
                          const std::function<double(double)>& lo,
                          const std::function<double(double)>& hi,
                          const Options& outer,
                          const Options& inner,
                          std::span<const double> outer_breakpoints)
{
  double worst_inner = 0.0;
  bool inner_ok = true;
  std::size_t evaluations = 0;
  auto slice = [&](double x) {
    const double y0 = lo(x);
    const double y1 = hi(x);
    if (!(y1 > y0))
      return 0.0;
    const Result r = integrate([&](double y) { return f(x, y); }, y0, y1, inner);
    worst_inner = std::max(worst_inner, r.abs_error);
    inner_ok = inner_ok && r.converged;
    evaluations += r.evaluations;
    return r.value;
  };
  Result r = integrate(slice, a, b, outer, outer_breakpoints);
  r.abs_error += worst_inner * std::fabs(b - a);
  r.evaluations = evaluations;
  r.converged = r.converged && inner_ok;
  return r;
}

} // namespace qlstat::quadrature
