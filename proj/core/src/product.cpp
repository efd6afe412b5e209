#include "pmedian/product.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pmedian/error.hpp"
#include "pmedian/frechet.hpp"

namespace pmedian {

namespace {

template <class Fn>
auto per_factor(int j, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.factor_index()) throw;
    throw e.with_factor(j);
  }
}

void check_arity(const ProductManifold& pm, size_t n, const char* what) {
  if (n != static_cast<size_t>(pm.size())) {
    throw Error(ErrorKind::ShapeError, std::string(what) + " has " + std::to_string(n) +
                                           " components, manifold has " +
                                           std::to_string(pm.size()) + " factors");
  }
}

}  // namespace

ProductTangent& ProductTangent::operator+=(const ProductTangent& other) {
  if (other.components.size() != components.size()) {
    throw Error(ErrorKind::ShapeError, "adding product tangents of different arity");
  }
  for (size_t j = 0; j < components.size(); ++j) components[j] += other.components[j];
  return *this;
}

ProductTangent& ProductTangent::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

ProductManifold::ProductManifold(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorKind::InvalidInput, "product manifold needs at least one factor");
}

std::string ProductManifold::describe() const {
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += " x ";
    out += f.describe();
  }
  return out;
}

void ProductManifold::check_point(const ProductPoint& p) const {
  check_arity(*this, p.components.size(), "point");
  for (int j = 0; j < size(); ++j) {
    per_factor(j, [&] {
      factors_[j].check_point(p.components[j]);
      return 0;
    });
  }
}

std::vector<double> ProductManifold::factor_dists(const ProductPoint& a, const ProductPoint& b) const {
  check_arity(*this, a.components.size(), "point");
  check_arity(*this, b.components.size(), "point");
  std::vector<double> out(factors_.size());
  for (int j = 0; j < size(); ++j) {
    out[j] = per_factor(j, [&] { return factors_[j].dist(a.components[j], b.components[j]); });
  }
  return out;
}

double ProductManifold::dist(const ProductPoint& a, const ProductPoint& b) const {
  const auto parts = factor_dists(a, b);
  if (parts.size() == 1) return parts[0];
  double sum = 0.0;
  for (double d : parts) sum += d * d;
  return std::sqrt(sum);
}

ProductPoint ProductManifold::exp(const ProductPoint& p, const ProductTangent& v, int* clamp_events) const {
  check_arity(*this, p.components.size(), "point");
  check_arity(*this, v.components.size(), "tangent");
  ProductPoint out;
  out.components.reserve(factors_.size());
  for (int j = 0; j < size(); ++j) {
    bool clamped = false;
    out.components.push_back(
        per_factor(j, [&] { return factors_[j].exp(p.components[j], v.components[j], &clamped); }));
    if (clamped && clamp_events) ++*clamp_events;
  }
  return out;
}

ProductManifold::LogDist ProductManifold::log_dist(const ProductPoint& p, const ProductPoint& x) const {
  check_arity(*this, p.components.size(), "point");
  check_arity(*this, x.components.size(), "point");
  LogDist out;
  out.log.components.reserve(factors_.size());
  double sum = 0.0;
  double single = 0.0;
  for (int j = 0; j < size(); ++j) {
    auto ld = per_factor(j, [&] { return factors_[j].log_dist(p.components[j], x.components[j]); });
    sum += ld.dist * ld.dist;
    single = ld.dist;
    out.log.components.push_back(std::move(ld.log));
  }
  out.dist = size() == 1 ? single : std::sqrt(sum);
  return out;
}

ProductTangent ProductManifold::log(const ProductPoint& p, const ProductPoint& x) const {
  return log_dist(p, x).log;
}

double ProductManifold::inner(const ProductPoint& p, const ProductTangent& u, const ProductTangent& v) const {
  check_arity(*this, u.components.size(), "tangent");
  check_arity(*this, v.components.size(), "tangent");
  double sum = 0.0;
  for (int j = 0; j < size(); ++j) {
    sum += per_factor(j, [&] { return factors_[j].inner(p.components[j], u.components[j], v.components[j]); });
  }
  return sum;
}

double ProductManifold::norm(const ProductPoint& p, const ProductTangent& v) const {
  return std::sqrt(std::max(0.0, inner(p, v, v)));
}

ProductTangent ProductManifold::zero_tangent() const {
  ProductTangent t;
  t.components.reserve(factors_.size());
  for (const auto& f : factors_) t.components.push_back(f.zero_tangent());
  return t;
}

// ---------------------------------------------------------------------------
// WeightedSample

namespace {

constexpr double kWeightSumTolerance = 1e-6;

void validate_points(const ProductManifold& pm, const std::vector<ProductPoint>& points,
                     const std::vector<double>& weights) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "sample must contain at least one point");
  if (points.size() != weights.size()) {
    throw Error(ErrorKind::ShapeError, "sample has " + std::to_string(points.size()) + " points but " +
                                           std::to_string(weights.size()) + " weights");
  }
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorKind::InvalidInput, "weight " + std::to_string(i) + " is not a positive finite number");
    }
  }
  for (const auto& p : points) pm.check_point(p);
}

double ordered_sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

}  // namespace

WeightedSample::WeightedSample(ProductManifold manifold, std::vector<ProductPoint> points,
                               std::vector<double> weights, Normalized)
    : manifold_(std::move(manifold)), points_(std::move(points)), weights_(std::move(weights)) {}

WeightedSample::WeightedSample(ProductManifold manifold, std::vector<ProductPoint> points,
                               std::vector<double> weights)
    : manifold_(std::move(manifold)), points_(std::move(points)), weights_(std::move(weights)) {
  validate_points(manifold_, points_, weights_);
  const double total = ordered_sum(weights_);
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorKind::InvalidInput, "weights sum to " + std::to_string(total) + ", expected 1");
  }
  // Already-normalized weights are kept as given.
  if (std::abs(total - 1.0) > 1e-12) {
    for (auto& w : weights_) w /= total;
  }
}

WeightedSample WeightedSample::from_unnormalized(ProductManifold manifold, std::vector<ProductPoint> points,
                                                 std::vector<double> weights) {
  validate_points(manifold, points, weights);
  const double total = ordered_sum(weights);
  for (auto& w : weights) w /= total;
  return WeightedSample(std::move(manifold), std::move(points), std::move(weights), Normalized{});
}

WeightedSample WeightedSample::uniform(ProductManifold manifold, std::vector<ProductPoint> points) {
  std::vector<double> weights(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()));
  validate_points(manifold, points, weights);
  return WeightedSample(std::move(manifold), std::move(points), std::move(weights), Normalized{});
}

// ---------------------------------------------------------------------------
// Diagnostics

double product_curvature_upper(const ProductManifold& pm) {
  double kappa = 0.0;
  for (int j = 0; j < pm.size(); ++j) {
    const auto bound = pm.factor(j).curvature_upper();
    if (!bound) {
      throw Error(ErrorKind::UnavailableCurvature,
                  "no sectional curvature bound configured for " + pm.factor(j).describe(), j);
    }
    kappa = std::max(kappa, *bound);
  }
  return kappa;
}

std::optional<double> uniqueness_radius(const ProductManifold& pm, const ProductPoint& center) {
  const double kappa = product_curvature_upper(pm);
  check_arity(pm, center.components.size(), "center");
  std::optional<double> radius;
  auto tighten = [&](double r) { radius = radius ? std::min(*radius, r) : r; };
  for (int j = 0; j < pm.size(); ++j) {
    if (const auto inj = pm.factor(j).injectivity_radius(center.components[j])) tighten(*inj);
  }
  if (kappa > 0.0) tighten(std::numbers::pi / (4.0 * std::sqrt(kappa)));
  return radius;
}

const char* to_string(Containment c) noexcept {
  switch (c) {
    case Containment::Inside: return "inside";
    case Containment::Outside: return "outside";
    case Containment::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

BallContainmentReport ball_containment_report(const WeightedSample& sample, const ProductPoint& center) {
  const auto& pm = sample.manifold();
  BallContainmentReport report;
  report.center = center;
  for (const auto& p : sample.points()) report.max_distance = std::max(report.max_distance, pm.dist(center, p));
  try {
    report.radius = uniqueness_radius(pm, center);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnavailableCurvature) throw;
    report.radius_available = false;
    report.verdict = Containment::Inconclusive;
    return report;
  }
  const bool inside = !report.radius || report.max_distance < *report.radius;
  report.verdict = inside ? Containment::Inside : Containment::Outside;
  return report;
}

BallContainmentReport ball_containment_report(const WeightedSample& sample) {
  return ball_containment_report(sample, product_mean(sample));
}

}  // namespace pmedian
