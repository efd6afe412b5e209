#pragma once

#include <span>
#include <vector>

#include "pmedian/error.hpp"
#include "pmedian/product.hpp"

namespace pmedian {

struct MeanOptions {
  int max_iters = 1000;
  double sphere_tangent_tol = 1e-10;  // stop when ‖Σ wᵢ log(xᵢ)‖ falls below
  double bw_change_tol = 1e-10;       // stop when ‖Σₖ₊₁ − Σₖ‖_F falls below
};

/// Raised when an iterative factor mean hits its iteration cap.
class MeanNonConvergence : public Error {
 public:
  MeanNonConvergence(const std::string& message, FactorPoint last, int iterations)
      : Error(ErrorKind::NonConvergence, message), last_(std::move(last)), iterations_(iterations) {}

  const FactorPoint& last_iterate() const noexcept { return last_; }
  int iterations() const noexcept { return iterations_; }

 private:
  FactorPoint last_;
  int iterations_;
};

/// Weighted Fréchet mean on a single factor. Closed form on flat factors;
/// iterative on the sphere (tangent averaging) and the Bures–Wasserstein
/// factor (barycenter fixed point).
FactorPoint factor_mean(const Factor& factor, std::span<const FactorPoint> points,
                        std::span<const double> weights, const MeanOptions& options = {});

/// Componentwise Fréchet mean of a weighted product sample.
ProductPoint product_mean(const WeightedSample& sample, const MeanOptions& options = {});

}  // namespace pmedian
