#include "doctest.h"

#include "qlstat/dgp.hpp"
#include "qlstat/error.hpp"
#include "qlstat/rng.hpp"
#include "qlstat/special_functions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace qlstat;

TEST_CASE("Philox4x32-10 known-answer vectors")
{
  using B = Philox4x32::Block;
  CHECK(Philox4x32(0, 0).block(0) == B{ 0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u });
  CHECK(Philox4x32(~0ull, ~0ull).block(~0ull) == B{ 0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu });
  CHECK(Philox4x32(0x299f31d0a4093822ull, 0x0370734413198a2eull).block(0x85a308d3243f6a88ull) ==
        B{ 0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u });
}

TEST_CASE("streams are reproducible and distinct")
{
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 7);
  Philox4x32 c(42, 8);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    same += x == c.uniform() ? 1 : 0;
  }
  CHECK(same == 0);
}

namespace {

// two-sided KS statistic of n draws against a cdf
template <class Cdf>
double ks_statistic(std::vector<double> v, Cdf cdf)
{
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({ d, f - i / n, (i + 1) / n - f });
  }
  return d;
}

std::vector<double> draws(const Marginal& m, std::size_t n, std::uint64_t seed)
{
  Philox4x32 rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v)
    x = m.draw(rng);
  return v;
}

} // namespace

TEST_CASE("KS self-tests at n = 1e5")
{
  const std::size_t n = 100000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n)); // 1% level
  for (DgpKind k : { DgpKind::normal, DgpKind::cauchy, DgpKind::uniform, DgpKind::exponential,
                     DgpKind::lognormal, DgpKind::t3, DgpKind::chi2_3_centered }) {
    const Marginal m = Marginal::make(k, 0.3);
    const double d = ks_statistic(draws(m, n, 11), [&](double y) { return m.cdf(y); });
    CHECK_MESSAGE(d < critical, to_string(k) << " KS " << d);
  }
}

TEST_CASE("closed-form cdfs and quantiles against references")
{
  const boost::math::students_t t3(3.0);
  const boost::math::chi_squared c3(3.0);
  for (double x : { -5.0, -1.3, 0.0, 0.4, 2.2, 9.0 })
    CHECK(dist::t3_cdf(x) == doctest::Approx(boost::math::cdf(t3, x)).epsilon(1e-14));
  for (double x : { 0.01, 0.5, 2.366, 7.8, 20.0 })
    CHECK(dist::chi2_3_cdf(x) == doctest::Approx(boost::math::cdf(c3, x)).epsilon(1e-13));
  for (double p : { 0.025, 0.2, 0.5, 0.9, 0.999 }) {
    CHECK(dist::t3_quantile(p) == doctest::Approx(boost::math::quantile(t3, p)).epsilon(1e-12));
    CHECK(dist::chi2_3_quantile(p) == doctest::Approx(boost::math::quantile(c3, p)).epsilon(1e-12));
  }
}

TEST_CASE("true quantiles")
{
  Dgp d;
  d.kind = DgpKind::cauchy;
  CHECK(d.quantile(0.75) == doctest::Approx(1.0).epsilon(1e-14));
  d.kind = DgpKind::lognormal;
  CHECK(d.quantile(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  d.kind = DgpKind::exponential;
  CHECK(d.quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  d.kind = DgpKind::chi2_3_centered;
  d.center_p = 0.25;
  CHECK(std::fabs(d.quantile(0.25)) <= 1e-12);
  for (DgpKind k : { DgpKind::normal, DgpKind::cauchy, DgpKind::t3, DgpKind::lognormal }) {
    const Marginal m = Marginal::make(k);
    for (double p : { 0.037, 0.5, 0.8 })
      CHECK(m.cdf(m.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("conditional designs")
{
  Dgp fl;
  fl.kind = DgpKind::sine_bump;
  CHECK(fl.conditional());
  CHECK(fl.conditional_quantile(0.0, 0.5) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(fl.conditional_quantile(0.0, 0.9) == doctest::Approx(4.5 + 0.5 * special::normal_quantile(0.9)).epsilon(1e-14));

  Dgp rq;
  rq.kind = DgpKind::rqss_curve;
  rq.heteroskedastic = true;
  CHECK(rq.noise_scale(0.5) == doctest::Approx(0.3));
  CHECK(rq.conditional_quantile(0.5, 0.5) == doctest::Approx(rq.curve(0.5)).epsilon(1e-15));

  // empirical conditional median near x0 matches the curve
  Philox4x32 rng(12, 0);
  std::vector<double> near;
  while (near.size() < 4000) {
    const auto [x, y] = rq.draw_xy(rng);
    if (std::fabs(x - 0.6) < 0.002)
      near.push_back(y);
  }
  std::nth_element(near.begin(), near.begin() + 2000, near.end());
  CHECK(near[2000] == doctest::Approx(rq.conditional_quantile(0.6, 0.5)).epsilon(0.03).scale(1.0));

  Dgp zero = rq;
  zero.heteroskedastic = false;
  zero.scale = 0.0;
  const auto [x, y] = zero.draw_xy(rng);
  CHECK(y == zero.curve(x));

  CHECK_THROWS_AS(parse_dgp_kind("gamma"), DomainError);
  CHECK(parse_dgp_kind("t3") == DgpKind::t3);
  Dgp bad = fl;
  bad.noise = DgpKind::rqss_curve;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
