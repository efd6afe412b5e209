#include "pmedian/error.hpp"

namespace pmedian {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::NotSpd: return "NotSpd";
    case ErrorKind::LeftManifold: return "LeftManifold";
    case ErrorKind::AntipodalPoint: return "AntipodalPoint";
    case ErrorKind::UnavailableCurvature: return "UnavailableCurvature";
    case ErrorKind::CoincidentIterate: return "CoincidentIterate";
    case ErrorKind::NonConvergence: return "NonConvergence";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::optional<int> factor_index) {
  std::string out = to_string(kind);
  if (factor_index) out += " (factor " + std::to_string(*factor_index) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<int> factor_index)
    : std::runtime_error(decorate(kind, message, factor_index)),
      kind_(kind),
      factor_index_(factor_index) {}

Error Error::with_factor(int index) const {
  // Strip the previous decoration so the message is not doubled.
  std::string msg = what();
  const auto pos = msg.find(": ");
  if (pos != std::string::npos) msg = msg.substr(pos + 2);
  return Error(kind_, msg, index);
}

}  // namespace pmedian
