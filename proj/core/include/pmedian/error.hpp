#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pmedian {

enum class ErrorKind {
  InvalidInput,
  ShapeError,
  NotSpd,
  LeftManifold,
  AntipodalPoint,
  UnavailableCurvature,
  CoincidentIterate,
  NonConvergence,
};

const char* to_string(ErrorKind kind) noexcept;

// Library-wide exception. Errors raised inside a product operation carry the
// index of the factor that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<int> factor_index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<int> factor_index() const noexcept { return factor_index_; }

  Error with_factor(int index) const;

 private:
  ErrorKind kind_;
  std::optional<int> factor_index_;
};

}  // namespace pmedian
