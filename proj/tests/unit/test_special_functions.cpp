#include "doctest.h"

#include "qlstat/special_functions.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace qlstat;
using namespace qlstat::special;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// plain bisection on reg_inc_beta, the oracle for the Newton inverse
double bisect_inverse(double q, BetaParams ab)
{
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(mid, ab) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("log_gamma exact and reference values")
{
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == 0.0);
  CHECK(log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("log_gamma against 50-digit reference on [1e-3, 1e8]")
{
  double worst = 0.0;
  for (double lx = -3.0; lx <= 8.0; lx += 0.05) {
    const double x = std::pow(10.0, lx);
    const double ref = static_cast<double>(boost::math::lgamma(Big(x)));
    const double got = log_gamma(x);
    // absolute 1e-12 where double can hold it, a few ulps of |ln Gamma| above
    const double tol = std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(ref));
    worst = std::max(worst, std::fabs(got - ref) / tol);
    CHECK(std::fabs(got - ref) <= tol);
  }
  MESSAGE("worst error / tolerance = " << worst);
}

TEST_CASE("reg_inc_beta boundary and symmetric cases")
{
  CHECK(reg_inc_beta(0.0, { 2.0, 3.0 }) == 0.0);
  CHECK(reg_inc_beta(1.0, { 2.0, 3.0 }) == 1.0);
  for (double a : { 0.3, 1.0, 2.5, 13.0, 400.0, 2.0e5 })
    CHECK(reg_inc_beta(0.5, { a, a }) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS(reg_inc_beta(0.5, { 0.0, 1.0 }), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(-0.1, { 1.0, 1.0 }), DomainError);
}

TEST_CASE("reg_inc_beta against 50-digit reference")
{
  const std::vector<double> shapes{ 0.5, 1.0, 2.4, 7.1, 13.0, 26.0, 99.5, 1000.0, 2.5e4 };
  const std::vector<double> xs{ 1e-6, 0.01, 0.037, 0.2, 0.35, 0.5, 0.65, 0.9, 0.999 };
  for (double a : shapes) {
    for (double b : shapes) {
      for (double x : xs) {
        const double ref = static_cast<double>(boost::math::ibeta(Big(a), Big(b), Big(x)));
        const double got = reg_inc_beta(x, { a, b });
        if (ref < 1e-280)
          continue;
        CHECK_MESSAGE(std::fabs(got - ref) <= 1e-12 * ref + 1e-300,
                      "a=" << a << " b=" << b << " x=" << x << " ref=" << ref << " got=" << got);
      }
    }
  }
}

TEST_CASE("reg_inc_beta at harness-scale shapes")
{
  // n up to 1e6: shapes ((n+1)u, (n+1)(1-u))
  for (double n : { 1.0e4, 1.0e5, 1.0e6 }) {
    for (double u : { 0.037, 0.5, 0.9 }) {
      const BetaParams ab = BetaParams::fractional(n, u);
      const double sd = std::sqrt(u * (1.0 - u) / n);
      for (double dz : { -3.0, -1.0, 0.0, 2.0 }) {
        const double x = u + dz * sd;
        const double ref = boost::math::ibeta(ab.a, ab.b, x);
        CHECK(reg_inc_beta(x, ab) == doctest::Approx(ref).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("reg_inc_beta reflection identity and monotonicity")
{
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> ls(-1.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = ux(gen);
    const double a = std::pow(10.0, ls(gen));
    const double b = std::pow(10.0, ls(gen));
    const double sum = reg_inc_beta(x, { a, b }) + reg_inc_beta(1.0 - x, { b, a });
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
  for (const BetaParams ab : { BetaParams{ 2.4, 7.1 }, BetaParams{ 50.0, 0.7 }, BetaParams{ 0.3, 0.3 } }) {
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double v = reg_inc_beta(i / 1000.0, ab);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("inv_reg_inc_beta")
{
  CHECK(inv_reg_inc_beta(0.5, { 3.0, 3.0 }) == doctest::Approx(0.5).epsilon(1e-12));
  const double q = reg_inc_beta(0.37, { 2.4, 7.1 });
  CHECK(std::fabs(inv_reg_inc_beta(q, { 2.4, 7.1 }) - 0.37) <= 1e-10);

  const double oracle = bisect_inverse(0.1, { 7.8, 4.2 });
  CHECK(std::fabs(inv_reg_inc_beta(0.1, { 7.8, 4.2 }) - oracle) <= 1e-12);
  CHECK(inv_reg_inc_beta(0.1, { 7.8, 4.2 }) ==
        doctest::Approx(boost::math::ibeta_inv(7.8, 4.2, 0.1)).epsilon(1e-12));

  CHECK_THROWS_AS(inv_reg_inc_beta(0.0, { 1.0, 1.0 }), DomainError);
  CHECK_THROWS_AS(inv_reg_inc_beta(1.0, { 1.0, 1.0 }), DomainError);
}

TEST_CASE("inv_reg_inc_beta roundtrip on 1000 triples")
{
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> uq(0.0005, 0.9995);
  std::uniform_real_distribution<double> ls(-0.5, 3.5);
  for (int i = 0; i < 1000; ++i) {
    const double qv = uq(gen);
    const BetaParams ab{ std::pow(10.0, ls(gen)), std::pow(10.0, ls(gen)) };
    const double x = inv_reg_inc_beta(qv, ab);
    CHECK(std::fabs(reg_inc_beta(x, ab) - qv) <= 1e-10);
  }
}

TEST_CASE("beta_pdf")
{
  CHECK(beta_pdf(0.5, { 1.0, 1.0 }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_pdf(0.25, { 2.0, 1.0 }) == doctest::Approx(0.5).epsilon(1e-14));
  const boost::math::beta_distribution<double> ref(7.8, 4.2);
  CHECK(beta_pdf(0.65, { 7.8, 4.2 }) == doctest::Approx(boost::math::pdf(ref, 0.65)).epsilon(1e-12));
  // log-space evaluation survives shapes where Gamma overflows
  const BetaParams big = BetaParams::fractional(5000.0, 0.3);
  CHECK(std::isfinite(beta_pdf(0.3, big)));
  CHECK(beta_log_pdf(0.3, big) == doctest::Approx(std::log(beta_pdf(0.3, big))).epsilon(1e-12));
}

TEST_CASE("fractional beta mean equals u")
{
  for (double n : { 1.0, 10.0, 99.0, 1e6 }) {
    for (double u : { 0.037, 0.3, 0.5, 0.65 }) {
      const BetaParams ab = BetaParams::fractional(n, u);
      CHECK(ab.a / (ab.a + ab.b) == doctest::Approx(u).epsilon(1e-15));
    }
  }
}

TEST_CASE("normal distribution helpers")
{
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(std::fabs(normal_quantile(0.975) - 1.959964) <= 1e-6);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);

  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 10000; ++i) {
    const double q = i / 10000.0;
    const double z = normal_quantile(q);
    CHECK(z > prev);
    prev = z;
    CHECK(std::fabs(normal_cdf(z) - q) <= 1e-12);
    const double ref = -boost::math::erfc_inv(2.0 * q) * std::sqrt(2.0);
    CHECK(z == doctest::Approx(ref).epsilon(1e-13));
  }
  for (double q : { 1e-300, 1e-12, 1e-6, 1.0 - 1e-12 })
    CHECK(std::fabs(normal_cdf(normal_quantile(q)) - q) <= 1e-12 * std::max(q, 1e-3));
  for (double z = -8.0; z <= 8.0; z += 0.01)
    CHECK(std::fabs(normal_cdf(-z) - (1.0 - normal_cdf(z))) <= 1e-14);
}

TEST_CASE("Probability validates")
{
  CHECK(double(Probability(0.3)) == 0.3);
  CHECK_NOTHROW(Probability(0.0));
  CHECK_NOTHROW(Probability(1.0));
  CHECK_THROWS_AS(Probability(1.5), DomainError);
  CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
}
