#include "qpp/error.hpp"

#include <fmt/format.h>

namespace qpp {

namespace {
std::string describe_missing(const std::vector<std::string>& missing) {
  constexpr std::size_t kShown = 20;
  std::string msg = fmt::format("incomplete grid: {} missing cell(s)", missing.size());
  for (std::size_t i = 0; i < missing.size() && i < kShown; ++i) {
    msg += "\n  ";
    msg += missing[i];
  }
  if (missing.size() > kShown) {
    msg += fmt::format("\n  ... and {} more", missing.size() - kShown);
  }
  return msg;
}
} // namespace

IncompleteGridError::IncompleteGridError(std::vector<std::string> missing)
    : Error(describe_missing(missing)), missing_(std::move(missing)) {}

} // namespace qpp
