#pragma once

#include <optional>
#include <vector>

#include "pmedian/factor.hpp"

namespace pmedian {

struct ProductPoint {
  std::vector<FactorPoint> components;
};

/// Tangent vector at a product point; components align with the factors.
struct ProductTangent {
  std::vector<FactorTangent> components;

  ProductTangent& operator+=(const ProductTangent& other);
  ProductTangent& operator*=(double s);
  friend ProductTangent operator*(double s, ProductTangent t) { return t *= s; }
  friend ProductTangent operator+(ProductTangent a, const ProductTangent& b) { return a += b; }
};

/// Ordered product of factor manifolds with the ℓ₂ product metric.
class ProductManifold {
 public:
  explicit ProductManifold(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  const Factor& factor(int j) const { return factors_.at(static_cast<size_t>(j)); }
  int size() const noexcept { return static_cast<int>(factors_.size()); }
  std::string describe() const;

  void check_point(const ProductPoint& p) const;

  double dist(const ProductPoint& a, const ProductPoint& b) const;
  /// Per-factor distances; dist() is their ℓ₂ norm.
  std::vector<double> factor_dists(const ProductPoint& a, const ProductPoint& b) const;

  /// Componentwise exponential map. `clamp_events`, when given, is
  /// incremented once per factor whose result was clamped.
  ProductPoint exp(const ProductPoint& p, const ProductTangent& v, int* clamp_events = nullptr) const;
  ProductTangent log(const ProductPoint& p, const ProductPoint& x) const;
  double inner(const ProductPoint& p, const ProductTangent& u, const ProductTangent& v) const;
  double norm(const ProductPoint& p, const ProductTangent& v) const;
  ProductTangent zero_tangent() const;

  struct LogDist {
    ProductTangent log;
    double dist;
  };
  LogDist log_dist(const ProductPoint& p, const ProductPoint& x) const;

  friend bool operator==(const ProductManifold& a, const ProductManifold& b) {
    return a.factors_ == b.factors_;
  }

 private:
  std::vector<Factor> factors_;
};

/// Weighted data on a product manifold. Weights are positive and sum to one.
class WeightedSample {
 public:
  /// Weights must already sum to one within 1e−6; smaller drift is
  /// renormalized away, larger drift throws InvalidInput.
  WeightedSample(ProductManifold manifold, std::vector<ProductPoint> points,
                 std::vector<double> weights);

  /// Normalizes arbitrary positive weights by their sum.
  static WeightedSample from_unnormalized(ProductManifold manifold,
                                          std::vector<ProductPoint> points,
                                          std::vector<double> weights);
  static WeightedSample uniform(ProductManifold manifold, std::vector<ProductPoint> points);

  const ProductManifold& manifold() const noexcept { return manifold_; }
  const std::vector<ProductPoint>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const ProductPoint& point(int i) const { return points_.at(static_cast<size_t>(i)); }
  double weight(int i) const { return weights_.at(static_cast<size_t>(i)); }
  int size() const noexcept { return static_cast<int>(points_.size()); }

 private:
  struct Normalized {};
  WeightedSample(ProductManifold manifold, std::vector<ProductPoint> points,
                 std::vector<double> weights, Normalized);

  ProductManifold manifold_;
  std::vector<ProductPoint> points_;
  std::vector<double> weights_;
};

// --- Curvature and uniqueness diagnostics ---------------------------------

/// Max of the factor curvature bounds. Throws UnavailableCurvature if any
/// factor has none.
double product_curvature_upper(const ProductManifold& pm);

/// Radius of the ball around `center` in which the geometric median is
/// unique: min over factor injectivity radii and π/(4√κ). nullopt means
/// unbounded. Throws UnavailableCurvature.
std::optional<double> uniqueness_radius(const ProductManifold& pm, const ProductPoint& center);

enum class Containment { Inside, Outside, Inconclusive };
const char* to_string(Containment c) noexcept;

struct BallContainmentReport {
  ProductPoint center;
  double max_distance = 0.0;
  std::optional<double> radius;  // nullopt: unbounded, or unknown when inconclusive
  bool radius_available = true;
  Containment verdict = Containment::Inconclusive;
};

BallContainmentReport ball_containment_report(const WeightedSample& sample, const ProductPoint& center);
/// Uses the product Fréchet mean as the center.
BallContainmentReport ball_containment_report(const WeightedSample& sample);

}  // namespace pmedian
