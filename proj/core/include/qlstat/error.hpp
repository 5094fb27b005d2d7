#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qlstat {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
  //! short machine-readable tag, e.g. "domain" or "extreme_quantile"
  virtual const char* kind() const noexcept { return "error"; }
};

//! An argument lies outside the domain of a function (p outside (0,1), x <= 0 ...).
class DomainError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

//! Input data cannot support the requested computation.
class DataError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

//! No observations fell inside a covariate window.
class EmptyWindowError : public DataError
{
public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "empty_window"; }
};

//! A nuisance estimate is degenerate (zero variance, non-positive density, ...).
class DegenerateError : public DataError
{
public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "degenerate"; }
};

//! Too few points inside the pilot window, or a rank-deficient design.
class InsufficientDataError : public DataError
{
public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "insufficient_data"; }
};

//! Local polynomial design matrix is rank deficient.
class CollinearDesignError : public DataError
{
public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "collinear_design"; }
};

//! A root finder, inverse or quadrature failed to reach its tolerance.
class NumericalError : public Error
{
public:
  NumericalError(const std::string& what, double residual)
    : Error(what + " (residual " + std::to_string(residual) + ")")
    , residual_(residual)
  {}
  double residual() const noexcept { return residual_; }
  const char* kind() const noexcept override { return "numerical"; }

private:
  double residual_;
};

//! The requested quantile needs an order statistic below X_{n:1} or above X_{n:n}.
class ExtremeQuantileError : public Error
{
public:
  //! @param tail "low" or "high" when a specific CI endpoint is at fault.
  //! @param minimal_n smallest sample size at which the index becomes evaluable.
  ExtremeQuantileError(const std::string& what,
                       std::string tail = {},
                       std::optional<std::size_t> minimal_n = std::nullopt,
                       std::optional<std::size_t> local_n = std::nullopt)
    : Error(what)
    , tail_(std::move(tail))
    , minimal_n_(minimal_n)
    , local_n_(local_n)
  {}

  const std::string& tail() const noexcept { return tail_; }
  std::optional<std::size_t> minimal_n() const noexcept { return minimal_n_; }
  //! local sample size N_n when raised from the conditional method
  std::optional<std::size_t> local_n() const noexcept { return local_n_; }
  const char* kind() const noexcept override { return "extreme_quantile"; }

private:
  std::string tail_;
  std::optional<std::size_t> minimal_n_;
  std::optional<std::size_t> local_n_;
};

//! Calibrated level reached 1; only happens for degenerate tiny n.
class CalibrationOverflowError : public NumericalError
{
public:
  explicit CalibrationOverflowError(double alpha_tilde)
    : NumericalError("calibrated alpha is not below 1", alpha_tilde)
  {}
  const char* kind() const noexcept override { return "calibration_overflow"; }
};

//! Overlapping windows requested under the independent-windows joint mode.
class ModeViolationError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "mode_violation"; }
};

} // namespace qlstat
