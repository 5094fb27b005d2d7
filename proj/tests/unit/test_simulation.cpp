#include "doctest.h"

#include "qlstat/coverage_oracle.hpp"
#include "qlstat/error.hpp"
#include "qlstat/simulation.hpp"
#include "qlstat/special_functions.hpp"

#include <cmath>
#include <limits>

using namespace qlstat;

namespace {

void check_identical(const SimulationReport& a, const SimulationReport& b)
{
  CHECK(a.covered == b.covered);
  CHECK(a.low_count == b.low_count);
  CHECK(a.high_count == b.high_count);
  CHECK(a.failures == b.failures);
  CHECK(a.median_length == b.median_length);
}

} // namespace

TEST_CASE("median")
{
  CHECK(median({ 3.0, 1.0, 2.0 }) == 2.0);
  CHECK(median({ 4.0, 1.0, 2.0, 3.0 }) == 2.5);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(median({ 1.0, inf, inf }) == inf);
}

TEST_CASE("tally scoring")
{
  Tally t(4);
  ConfidenceInterval ci;
  ci.lower = 0.0;
  ci.upper = 1.0;
  t.record(0, ci, 0.5);
  t.record(1, ci, 1.0);
  t.record(2, ci, 2.0);
  t.record(3, ci, -1.0);
  const SimulationReport r = t.report(9);
  CHECK(r.covered == 2);
  CHECK(r.low_count == 1);
  CHECK(r.high_count == 1);
  CHECK(r.cp == 0.5);
  CHECK(r.too_low == 0.25);
  CHECK(r.too_high == 0.25);
  CHECK(r.seed == 9);
  CHECK(r.mc_se == doctest::Approx(std::sqrt(0.25 / 4.0)));
}

TEST_CASE("unconditional runs")
{
  Dgp normal;
  const QuantileRequest req{ 0.5, 0.05, Side::two_sided, false, 0.5 };

  const SimulationReport a = run_unconditional(normal, 25, req, 4000, 7, 1);
  const SimulationReport b = run_unconditional(normal, 25, req, 4000, 7, 4);
  check_identical(a, b);
  CHECK(a.scored() + a.failures == 4000);
  CHECK(a.cp + a.too_low + a.too_high == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::fabs(a.cp - 0.95) <= 4.0 * a.mc_se + 0.01);

  const SimulationReport c = run_unconditional(normal, 25, req, 4000, 8, 1);
  CHECK(c.covered != a.covered);

  CHECK_THROWS_AS(run_unconditional(normal, 25, req, 99, 7), DomainError);
  Dgp fl;
  fl.kind = DgpKind::sine_bump;
  CHECK_THROWS_AS(run_unconditional(fl, 25, req, 1000, 7), DomainError);
}

TEST_CASE("near-total alpha gives near-zero coverage")
{
  Dgp normal;
  const QuantileRequest req{ 0.5, 1.0 - 1e-9, Side::two_sided, false, 0.5 };
  const SimulationReport r = run_unconditional(normal, 200, req, 1000, 3);
  CHECK(r.cp <= 0.05);
}

TEST_CASE("integer index: coverage matches the exact binomial level")
{
  // n = 9, p = 0.5: alpha = I_0.5(7, 3) puts u^h at 7/10, so the interval
  // (-inf, X_(7)] is exact
  const double alpha = special::reg_inc_beta(0.5, { 7.0, 3.0 });
  Dgp normal;
  const QuantileRequest req{ 0.5, alpha, Side::lower, false, 0.5 };
  const SimulationReport r = run_unconditional(normal, 9, req, 20000, 5, 2);
  CHECK(std::fabs(r.cp - (1.0 - alpha)) <= 3.0 * r.mc_se);
}

TEST_CASE("calibration comparison on shared draws")
{
  Dgp normal;
  const CalibrationComparison cmp = run_calibration_comparison(10, 0.5, normal, 4000, 11, 0.05, 2);
  CHECK(cmp.length_violations == 0);
  CHECK(cmp.calibrated.cp <= cmp.uncalibrated.cp);
  CHECK(cmp.uncalibrated.replications == 4000);
}

TEST_CASE("conditional runs")
{
  Dgp rq;
  rq.kind = DgpKind::rqss_curve;
  const QuantileRequest req{ 0.5, 0.05, Side::two_sided, false, 0.5 };

  ConditionalSimOptions opt;
  opt.h = 0.05;
  opt.deviations = { 0.0, 0.3 };
  const ConditionalSimulation a = run_conditional(rq, 400, { 0.5, 0.75 }, req, 200, 3, opt, 1);
  const ConditionalSimulation b = run_conditional(rq, 400, { 0.5, 0.75 }, req, 200, 3, opt, 3);
  REQUIRE(a.points.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    check_identical(a.points[j].report, b.points[j].report);
    CHECK(a.points[j].median_h == 0.05);
    CHECK(a.points[j].truth == rq.conditional_quantile(a.points[j].x0, 0.5));
    CHECK(a.points[j].rejection.size() == 2);
    CHECK(a.points[j].rejection[1] >= a.points[j].rejection[0]);
  }
  CHECK(a.joint_rejection == b.joint_rejection);

  // without noise the local sample is the curve over the window
  Dgp zero = rq;
  zero.scale = 0.0;
  ConditionalSimOptions fixed;
  fixed.h = 0.02;
  const ConditionalSimulation z = run_conditional(zero, 2000, { 0.5 }, req, 200, 4, fixed);
  CHECK(z.points[0].report.cp >= 0.9);
}
