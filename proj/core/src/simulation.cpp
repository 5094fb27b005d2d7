#include "qlstat/simulation.hpp"

#include "qlstat/error.hpp"
#include "qlstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlstat {

namespace {

constexpr std::size_t kMinReplications = 100;

void check_replications(std::size_t replications)
{
  if (replications < kMinReplications) {
    std::ostringstream msg;
    msg << "at least " << kMinReplications << " replications are required, got "
        << replications;
    throw DomainError(msg.str());
  }
}

SortedSample draw_sample(const Marginal& law, std::size_t n, Philox4x32& rng)
{
  std::vector<double> values(n);
  for (double& v : values)
    v = law.draw(rng);
  return SortedSample(std::move(values));
}

} // namespace

double median(std::vector<double> values)
{
  if (values.empty())
    return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1)
    return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  if (std::isinf(lower) && lower == upper)
    return lower;
  return 0.5 * (lower + upper);
}

void Tally::record(std::size_t rep, const ConfidenceInterval& ci, double truth)
{
  if (ci.upper < truth)
    outcome[rep] = Outcome::too_low;
  else if (ci.lower > truth)
    outcome[rep] = Outcome::too_high;
  else
    outcome[rep] = Outcome::covered;
  length[rep] = ci.length();
}

SimulationReport Tally::report(std::uint64_t seed) const
{
  SimulationReport rep;
  rep.seed = seed;
  rep.replications = outcome.size();
  std::vector<double> lengths;
  lengths.reserve(outcome.size());
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::covered: ++rep.covered; break;
      case Outcome::too_low: ++rep.low_count; break;
      case Outcome::too_high: ++rep.high_count; break;
      case Outcome::failed: ++rep.failures; continue;
    }
    lengths.push_back(length[i]);
  }
  const double scored = static_cast<double>(rep.scored());
  if (scored > 0.0) {
    rep.cp = static_cast<double>(rep.covered) / scored;
    rep.too_low = static_cast<double>(rep.low_count) / scored;
    rep.too_high = static_cast<double>(rep.high_count) / scored;
    rep.mc_se = std::sqrt(rep.cp * (1.0 - rep.cp) / scored);
  }
  rep.median_length = median(std::move(lengths));
  return rep;
}

SimulationReport run_unconditional(const Dgp& dgp,
                                   std::size_t n,
                                   const QuantileRequest& request,
                                   std::size_t replications,
                                   std::uint64_t seed,
                                   unsigned threads)
{
  dgp.validate();
  if (dgp.conditional())
    throw DomainError("run_unconditional needs an unconditional distribution");
  check_replications(replications);
  request.validate();
  if (n == 0)
    throw DomainError("sample size must be positive");

  Dgp centred = dgp;
  if (dgp.kind == DgpKind::chi2_3_centered)
    centred.center_p = request.p;
  const Marginal law = centred.marginal();
  const double truth = law.quantile(request.p);
  const EndpointIndices indices = endpoint_indices(n, request);
  // evaluability depends on n only: fail once, up front
  {
    std::vector<double> probe(n);
    for (std::size_t i = 0; i < n; ++i)
      probe[i] = static_cast<double>(i);
    apply_indices(SortedSample::from_sorted(std::move(probe)), request, indices);
  }

  Tally tally(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Philox4x32 rng(seed, r);
    const SortedSample sample = draw_sample(law, n, rng);
    tally.record(r, apply_indices(sample, request, indices), truth);
  });
  return tally.report(seed);
}

ConditionalSimulation run_conditional(const Dgp& dgp,
                                      std::size_t n,
                                      const std::vector<double>& x0_list,
                                      const QuantileRequest& request,
                                      std::size_t replications,
                                      std::uint64_t seed,
                                      const ConditionalSimOptions& options,
                                      unsigned threads)
{
  dgp.validate();
  if (!dgp.conditional())
    throw DomainError("run_conditional needs a conditional design");
  check_replications(replications);
  request.validate();
  if (x0_list.empty())
    throw DomainError("at least one evaluation point is required");
  if (!(options.h_multiplier > 0.0))
    throw DomainError("bandwidth multiplier must be positive");

  Dgp centred = dgp;
  if (dgp.noise == DgpKind::chi2_3_centered)
    centred.center_p = request.p;
  const Marginal noise = centred.noise_marginal();

  const std::size_t m = x0_list.size();
  const std::size_t nd = options.deviations.size();
  std::vector<double> truth(m);
  for (std::size_t j = 0; j < m; ++j)
    truth[j] = centred.conditional_quantile(x0_list[j], request.p);

  QuantileRequest joint_request = request;
  joint_request.alpha = pointwise_alpha(request.alpha, m, options.joint_mode);

  std::vector<Tally> tallies(m, Tally(replications));
  std::vector<std::vector<double>> used_h(m, std::vector<double>(replications, 0.0));
  std::vector<std::vector<double>> used_n(m, std::vector<double>(replications, 0.0));
  // per (point, deviation, replication): 1 reject, 0 keep, -1 failed
  std::vector<signed char> point_reject(m * nd * replications, -1);
  std::vector<signed char> joint_reject(nd * replications, -1);

  auto excludes = [](const ConfidenceInterval& ci, double value) {
    return !ci.contains(value);
  };

  parallel_for(replications, threads, [&](std::size_t r) {
    Philox4x32 rng(seed, r);
    Dataset data;
    data.y.resize(n);
    data.x.assign(1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto [x, y] = centred.draw_xy(rng, noise);
      data.x[0][i] = x;
      data.y[i] = y;
    }

    auto window_for = [&](double x0, const QuantileRequest& req) {
      ConditionalOptions opt;
      opt.large_n_adjustment = options.large_n_adjustment;
      double h = 0.0;
      if (options.h)
        h = *options.h;
      else
        h = conditional_bandwidth(data, { { x0 }, std::nullopt }, req,
                                  options.large_n_adjustment)
              .h;
      opt.h = h * options.h_multiplier;
      return opt;
    };

    for (std::size_t j = 0; j < m; ++j) {
      try {
        const ConditionalOptions opt = window_for(x0_list[j], request);
        const ConditionalResult res =
          conditional_interval(data, { { x0_list[j] }, std::nullopt }, request, opt);
        tallies[j].record(r, res.ci, truth[j]);
        used_h[j][r] = *opt.h;
        used_n[j][r] = static_cast<double>(res.local_n);
        for (std::size_t d = 0; d < nd; ++d)
          point_reject[(j * nd + d) * replications + r] =
            excludes(res.ci, truth[j] + options.deviations[d]) ? 1 : 0;
      } catch (const DataError&) {
      } catch (const ExtremeQuantileError&) {
      }
    }

    if (nd == 0)
      return;
    std::vector<ConfidenceInterval> joint(m);
    try {
      for (std::size_t j = 0; j < m; ++j) {
        const ConditionalOptions opt = window_for(x0_list[j], joint_request);
        joint[j] = conditional_interval(data, { { x0_list[j] }, std::nullopt },
                                        joint_request, opt)
                     .ci;
      }
    } catch (const DataError&) {
      return;
    } catch (const ExtremeQuantileError&) {
      return;
    }
    for (std::size_t d = 0; d < nd; ++d) {
      bool reject = false;
      for (std::size_t j = 0; j < m; ++j)
        reject = reject || excludes(joint[j], truth[j] + options.deviations[d]);
      joint_reject[d * replications + r] = reject ? 1 : 0;
    }
  });

  auto rate = [&](const signed char* flags) {
    std::size_t hits = 0;
    std::size_t valid = 0;
    for (std::size_t r = 0; r < replications; ++r) {
      if (flags[r] >= 0) {
        ++valid;
        hits += static_cast<std::size_t>(flags[r]);
      }
    }
    return valid == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(hits) / static_cast<double>(valid);
  };

  ConditionalSimulation out;
  out.deviations = options.deviations;
  for (std::size_t j = 0; j < m; ++j) {
    PointSimulation ps;
    ps.x0 = x0_list[j];
    ps.truth = truth[j];
    ps.report = tallies[j].report(seed);
    std::vector<double> hs;
    std::vector<double> ns;
    for (std::size_t r = 0; r < replications; ++r) {
      if (tallies[j].outcome[r] != Tally::Outcome::failed) {
        hs.push_back(used_h[j][r]);
        ns.push_back(used_n[j][r]);
      }
    }
    ps.median_h = median(std::move(hs));
    ps.median_local_n = median(std::move(ns));
    for (std::size_t d = 0; d < nd; ++d)
      ps.rejection.push_back(rate(&point_reject[(j * nd + d) * replications]));
    out.points.push_back(std::move(ps));
  }
  for (std::size_t d = 0; d < nd; ++d)
    out.joint_rejection.push_back(rate(&joint_reject[d * replications]));
  if (nd > 0) {
    for (std::size_t r = 0; r < replications; ++r)
      out.joint_failures += joint_reject[r] < 0 ? 1 : 0;
  }
  return out;
}

CalibrationComparison run_calibration_comparison(std::size_t n,
                                                 double p,
                                                 const Dgp& dgp,
                                                 std::size_t replications,
                                                 std::uint64_t seed,
                                                 double alpha,
                                                 unsigned threads)
{
  dgp.validate();
  if (dgp.conditional())
    throw DomainError("calibration comparison needs an unconditional distribution");
  check_replications(replications);

  QuantileRequest plain{ p, alpha, Side::two_sided, false, 0.5 };
  QuantileRequest calib = plain;
  calib.calibrated = true;
  plain.validate();

  Dgp centred = dgp;
  if (dgp.kind == DgpKind::chi2_3_centered)
    centred.center_p = p;
  const Marginal law = centred.marginal();
  const double truth = law.quantile(p);
  const EndpointIndices plain_idx = endpoint_indices(n, plain);
  const EndpointIndices calib_idx = endpoint_indices(n, calib);

  Tally plain_tally(replications);
  Tally calib_tally(replications);
  std::vector<unsigned char> longer(replications, 0);
  parallel_for(replications, threads, [&](std::size_t r) {
    Philox4x32 rng(seed, r);
    const SortedSample sample = draw_sample(law, n, rng);
    const ConfidenceInterval a = apply_indices(sample, plain, plain_idx);
    const ConfidenceInterval b = apply_indices(sample, calib, calib_idx);
    plain_tally.record(r, a, truth);
    calib_tally.record(r, b, truth);
    longer[r] = b.length() > a.length() ? 1 : 0;
  });

  CalibrationComparison out;
  out.uncalibrated = plain_tally.report(seed);
  out.calibrated = calib_tally.report(seed);
  for (unsigned char v : longer)
    out.length_violations += v;
  return out;
}

} // namespace qlstat
