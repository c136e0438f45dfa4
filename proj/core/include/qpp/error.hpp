#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qpp {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed, missing or inconsistent input data.
class InputError : public Error {
public:
  using Error::Error;
};

/// A statistic that is mathematically undefined for the data it was given
/// (zero variance, degenerate normalizer, too few entries). Callers report
/// these as missing values, never as zero.
class UndefinedResult : public Error {
public:
  using Error::Error;
};

/// The (predictor, system, query) grid has holes.
class IncompleteGridError : public Error {
public:
  explicit IncompleteGridError(std::vector<std::string> missing);

  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  std::vector<std::string> missing_;
};

} // namespace qpp
