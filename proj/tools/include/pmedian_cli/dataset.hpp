#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "pmedian/product.hpp"

namespace pmedian::cli {

/// Malformed dataset record; `line` is 1-based, 0 when not tied to a line.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(int line, const std::string& message)
      : std::runtime_error(message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Reads JSON Lines records {"weight": w, "factors": [{"type": ..., "value": ...}]}.
/// The factor signature is taken from the first record; weights are
/// normalized by their sum. Blank lines are skipped.
WeightedSample read_dataset(std::istream& in);
WeightedSample read_dataset_file(const std::string& path);

nlohmann::json point_to_json(const ProductManifold& pm, const ProductPoint& p, double weight = 1.0);
void write_dataset(std::ostream& out, const WeightedSample& sample);

/// Doubles printed with 17 significant digits so they parse back exactly.
std::string format_double(double v);

}  // namespace pmedian::cli
