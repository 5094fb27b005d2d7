#pragma once

//! Data-generating processes of the coverage simulations, each with its
//! true (conditional) quantile for scoring.
//!
//! Unconditional kinds draw Y iid from F. The conditional kinds draw (X, Y):
//!   sine_bump  Y = 2.5 + sin(2X) + 2 exp(-16 X^2) + s U,  X ~ N(0, 1)
//!   rqss_curve      Y = sqrt(X(1-X)) sin(2 pi (1 + 2^{-7/5}) / (X + 2^{-7/5}))
//!                       + s(X) U,  X ~ U(0, 1)
//! with s = `scale` (0.5 and 0.2 by default) and s(X) = scale (1 + X) when
//! heteroskedastic. The centred chi-square noise is shifted so that its
//! `center_p` quantile is 0.

#include "qlstat/rng.hpp"

#include <string>
#include <string_view>
#include <utility>

namespace qlstat {

enum class DgpKind
{
  normal,
  cauchy,
  uniform,
  exponential,
  lognormal,
  t3,
  chi2_3_centered,
  sine_bump,
  rqss_curve
};

DgpKind parse_dgp_kind(std::string_view text);
std::string_view to_string(DgpKind kind);

//! Distribution of a univariate draw (also the noise U of conditional kinds).
struct Marginal
{
  DgpKind kind = DgpKind::normal;
  //! chi2_3_centered only: the quantile moved to 0
  double center_p = 0.5;
  //! chi2_3_centered only: chi-square quantile at center_p
  double offset = 0.0;

  static Marginal make(DgpKind kind, double center_p = 0.5);

  double draw(Philox4x32& rng) const;
  double quantile(double p) const;
  double cdf(double y) const;
  double density(double y) const;
};

struct Dgp
{
  DgpKind kind = DgpKind::normal;
  //! noise law of the conditional kinds; must be an unconditional kind
  DgpKind noise = DgpKind::normal;
  //! noise multiplier; negative selects the kind's default
  double scale = -1.0;
  bool heteroskedastic = false;
  //! chi2_3_centered centring quantile
  double center_p = 0.5;

  bool conditional() const noexcept;
  //! throws DomainError for impossible combinations
  void validate() const;

  Marginal marginal() const;      //!< law of Y (unconditional kinds)
  Marginal noise_marginal() const;

  double draw(Philox4x32& rng) const;
  std::pair<double, double> draw_xy(Philox4x32& rng) const;
  //! as draw_xy with a prebuilt noise_marginal()
  std::pair<double, double> draw_xy(Philox4x32& rng, const Marginal& noise) const;

  //! F^{-1}(p) for unconditional kinds
  double quantile(double p) const;
  //! Q_{Y|X}(p; x) for conditional kinds
  double conditional_quantile(double x, double p) const;
  double noise_scale(double x) const;
  double curve(double x) const;
};

namespace dist {
double t3_cdf(double t);
double t3_quantile(double p);
double chi2_3_cdf(double x);
double chi2_3_quantile(double p);
} // namespace dist

} // namespace qlstat
