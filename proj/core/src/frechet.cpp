#include "pmedian/frechet.hpp"

#include <cmath>

namespace pmedian {

namespace {

void check_sizes(std::span<const FactorPoint> points, std::span<const double> weights) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "mean of an empty set");
  if (points.size() != weights.size()) throw Error(ErrorKind::ShapeError, "points and weights differ in length");
}

FactorPoint sphere_mean(const Factor& f, std::span<const FactorPoint> points, std::span<const double> weights,
                        const MeanOptions& options) {
  Eigen::VectorXd start = Eigen::VectorXd::Zero(f.dim());
  for (size_t i = 0; i < points.size(); ++i) start += weights[i] * points[i].vector();
  // A vanishing extrinsic average has no direction; fall back to the first datum.
  FactorPoint z = start.norm() > 1e-12 ? FactorPoint(Eigen::VectorXd(start.normalized())) : points[0];

  for (int it = 0; it < options.max_iters; ++it) {
    FactorTangent step = f.zero_tangent();
    for (size_t i = 0; i < points.size(); ++i) step += weights[i] * f.log(z, points[i]);
    if (f.norm(z, step) <= options.sphere_tangent_tol) return z;
    z = f.exp(z, step);
  }
  throw MeanNonConvergence("sphere mean did not converge", z, options.max_iters);
}

FactorPoint bw_barycenter(const Factor& f, std::span<const FactorPoint> points, std::span<const double> weights,
                          const MeanOptions& options) {
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(f.dim(), f.dim());
  for (size_t i = 0; i < points.size(); ++i) avg += weights[i] * points[i].spd().matrix();
  SpdMatrix sigma{symmetrize(avg)};

  for (int it = 0; it < options.max_iters; ++it) {
    const SpdMatrix root = sqrt_spd(sigma);
    const SpdMatrix inv_root = inv_sqrt_spd(sigma);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f.dim(), f.dim());
    for (size_t i = 0; i < points.size(); ++i) {
      const SymMatrix inner = symmetrize(root.matrix() * points[i].spd().matrix() * root.matrix());
      acc += weights[i] * sqrt_psd(inner).matrix();
    }
    SpdMatrix next{symmetrize(inv_root.matrix() * acc * acc * inv_root.matrix())};
    const double change = (next.matrix() - sigma.matrix()).norm();
    sigma = std::move(next);
    if (change <= options.bw_change_tol) return sigma;
  }
  throw MeanNonConvergence("Bures-Wasserstein barycenter did not converge", sigma, options.max_iters);
}

}  // namespace

namespace {

bool identical(const FactorPoint& a, const FactorPoint& b) {
  if (a.value.index() != b.value.index()) return false;
  if (std::holds_alternative<double>(a.value)) return a.scalar() == b.scalar();
  if (std::holds_alternative<Eigen::VectorXd>(a.value)) return a.vector() == b.vector();
  return a.spd().matrix() == b.spd().matrix();
}

bool all_identical(std::span<const FactorPoint> points) {
  for (const auto& p : points.subspan(1))
    if (!identical(p, points[0])) return false;
  return true;
}

}  // namespace

FactorPoint factor_mean(const Factor& f, std::span<const FactorPoint> points, std::span<const double> weights,
                        const MeanOptions& options) {
  check_sizes(points, weights);
  for (const auto& p : points) f.check_point(p);
  if (all_identical(points)) return points[0];
  switch (f.kind()) {
    case FactorKind::Euclidean: {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
      for (size_t i = 0; i < points.size(); ++i) acc += weights[i] * points[i].vector();
      return acc;
    }
    case FactorKind::PositiveHalfLine: {
      double acc = 0.0;
      for (size_t i = 0; i < points.size(); ++i) acc += weights[i] * points[i].scalar();
      return acc;
    }
    case FactorKind::Sphere:
      return sphere_mean(f, points, weights, options);
    case FactorKind::SpdBuresWasserstein:
      return bw_barycenter(f, points, weights, options);
  }
  return points[0];
}

ProductPoint product_mean(const WeightedSample& sample, const MeanOptions& options) {
  const auto& pm = sample.manifold();
  ProductPoint out;
  std::vector<FactorPoint> column;
  column.reserve(static_cast<size_t>(sample.size()));
  for (int j = 0; j < pm.size(); ++j) {
    column.clear();
    for (const auto& p : sample.points()) column.push_back(p.components[j]);
    try {
      out.components.push_back(factor_mean(pm.factor(j), column, sample.weights(), options));
    } catch (const MeanNonConvergence&) {
      throw;
    } catch (const Error& e) {
      throw e.with_factor(j);
    }
  }
  return out;
}

}  // namespace pmedian
