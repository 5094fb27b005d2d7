#include "qlstat/conditional_ci.hpp"

#include "qlstat/error.hpp"
#include "qlstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qlstat {

namespace {

bool same_cell(const Dataset& data, std::size_t row, const std::optional<std::string>& cell)
{
  if (!cell)
    return true;
  return !data.cell.empty() && data.cell[row] == *cell;
}

void check_cell_usage(const Dataset& data, const std::optional<std::string>& cell)
{
  if (cell && data.cell.empty())
    throw DomainError("a cell was requested but the data has no discrete columns");
}

} // namespace

void Dataset::validate() const
{
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j].size() != y.size()) {
      std::ostringstream msg;
      msg << "covariate column " << j << " has " << x[j].size()
          << " rows; the response has " << y.size();
      throw DataError(msg.str());
    }
  }
  if (!cell.empty() && cell.size() != y.size())
    throw DataError("discrete cell keys do not match the number of rows");
  for (std::size_t i = 0; i < y.size(); ++i) {
    bool ok = std::isfinite(y[i]);
    for (const auto& col : x)
      ok = ok && std::isfinite(col[i]);
    if (!ok) {
      std::ostringstream msg;
      msg << "row " << i + 1 << " holds a non-finite value";
      throw DataError(msg.str());
    }
  }
}

void LocalWindow::validate(std::size_t dims) const
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError("window half-width h must be positive and finite");
  if (x0.size() != dims) {
    std::ostringstream msg;
    msg << "evaluation point has " << x0.size() << " components; data has "
        << dims << " continuous covariates";
    throw DomainError(msg.str());
  }
  if (dims == 0)
    throw DomainError("windowing needs at least one continuous covariate");
  for (double v : x0) {
    if (!std::isfinite(v))
      throw DomainError("evaluation point must be finite");
  }
}

bool LocalWindow::contains(const Dataset& data, std::size_t row) const
{
  if (!same_cell(data, row, cell))
    return false;
  for (std::size_t j = 0; j < x0.size(); ++j) {
    if (!(std::fabs(data.x[j][row] - x0[j]) <= h))
      return false;
  }
  return true;
}

LocalSample extract_local_sample(const Dataset& data, const LocalWindow& window)
{
  window.validate(data.dims());
  check_cell_usage(data, window.cell);

  LocalSample out;
  out.window = window;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (window.contains(data, i))
      out.rows.push_back(i);
  }
  if (out.rows.empty()) {
    std::ostringstream msg;
    msg << "no observation within h=" << window.h << " of the evaluation point";
    if (window.cell)
      msg << " in cell '" << *window.cell << "'";
    throw EmptyWindowError(msg.str());
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [&](std::size_t a, std::size_t b) { return data.y[a] < data.y[b]; });
  std::vector<double> values;
  values.reserve(out.rows.size());
  for (std::size_t r : out.rows)
    values.push_back(data.y[r]);
  out.y_values = SortedSample::from_sorted(std::move(values));
  out.n_local = out.rows.size();
  return out;
}

BandwidthReport conditional_bandwidth(const Dataset& data,
                                      const EvaluationPoint& point,
                                      const QuantileRequest& request,
                                      bool large_n_adjustment)
{
  if (data.dims() != 1) {
    std::ostringstream msg;
    msg << "the plug-in bandwidth is only available for one continuous "
           "covariate (data has "
        << data.dims() << "); pass h explicitly";
    throw DomainError(msg.str());
  }
  if (point.x0.size() != 1)
    throw DomainError("evaluation point must have one component");
  check_cell_usage(data, point.cell);

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (same_cell(data, i, point.cell)) {
      xs.push_back(data.x[0][i]);
      ys.push_back(data.y[i]);
    }
  }
  return plugin_bandwidth(xs, ys, point.x0[0], request, large_n_adjustment);
}

ConditionalResult conditional_interval(const Dataset& data,
                                       const EvaluationPoint& point,
                                       const QuantileRequest& request,
                                       const ConditionalOptions& options)
{
  request.validate();
  ConditionalResult out;
  if (options.h) {
    out.window = { point.x0, *options.h, point.cell };
  } else {
    out.bandwidth =
      conditional_bandwidth(data, point, request, options.large_n_adjustment);
    out.window = { point.x0, out.bandwidth->h, point.cell };
  }

  const LocalSample local = extract_local_sample(data, out.window);
  out.local_n = local.n_local;
  try {
    out.ci = confidence_interval(local.y_values, request, options.bounds);
  } catch (const ExtremeQuantileError& e) {
    std::ostringstream msg;
    msg << e.what() << " (local sample size N_n=" << local.n_local << ")";
    throw ExtremeQuantileError(msg.str(), e.tail(), e.minimal_n(), local.n_local);
  }
  return out;
}

JointMode parse_joint_mode(std::string_view text)
{
  if (text == "bonferroni")
    return JointMode::bonferroni;
  if (text == "independent_windows" || text == "independent-windows" ||
      text == "independent")
    return JointMode::independent_windows;
  throw DomainError("joint mode must be bonferroni or independent_windows; got '" +
                    std::string(text) + "'");
}

std::string_view to_string(JointMode mode)
{
  return mode == JointMode::bonferroni ? "bonferroni" : "independent_windows";
}

double pointwise_alpha(double alpha, std::size_t m, JointMode mode)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must lie in (0, 1)");
  if (m == 0)
    throw DomainError("joint intervals need at least one point");
  if (m == 1)
    return alpha;
  const double dm = static_cast<double>(m);
  if (mode == JointMode::bonferroni)
    return alpha / dm;
  return -std::expm1(std::log1p(-alpha) / dm);
}

bool windows_disjoint(const LocalWindow& a, const LocalWindow& b)
{
  if (a.cell != b.cell)
    return true;
  for (std::size_t j = 0; j < std::min(a.x0.size(), b.x0.size()); ++j) {
    if (std::fabs(a.x0[j] - b.x0[j]) > a.h + b.h)
      return true;
  }
  return false;
}

JointResult joint_intervals(const Dataset& data,
                            const std::vector<EvaluationPoint>& points,
                            const QuantileRequest& request,
                            JointMode mode,
                            const ConditionalOptions& options,
                            unsigned threads)
{
  request.validate();
  JointResult out;
  out.mode = mode;
  out.pointwise_alpha = pointwise_alpha(request.alpha, points.size(), mode);
  QuantileRequest pointwise = request;
  pointwise.alpha = out.pointwise_alpha;

  std::vector<ConditionalOptions> per_point(points.size(), options);
  std::vector<std::optional<BandwidthReport>> reports(points.size());
  if (!options.h) {
    parallel_for(points.size(), threads, [&](std::size_t i) {
      reports[i] = conditional_bandwidth(data, points[i], pointwise,
                                         options.large_n_adjustment);
      per_point[i].h = reports[i]->h;
    });
  }

  if (mode == JointMode::independent_windows) {
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        const LocalWindow wa{ points[a].x0, *per_point[a].h, points[a].cell };
        const LocalWindow wb{ points[b].x0, *per_point[b].h, points[b].cell };
        if (!windows_disjoint(wa, wb)) {
          std::ostringstream msg;
          msg << "windows of evaluation points " << a + 1 << " and " << b + 1
              << " overlap; independent_windows needs disjoint windows";
          throw ModeViolationError(msg.str());
        }
      }
    }
  }

  out.points.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    out.points[i] = conditional_interval(data, points[i], pointwise, per_point[i]);
    out.points[i].bandwidth = reports[i];
  });
  return out;
}

} // namespace qlstat
