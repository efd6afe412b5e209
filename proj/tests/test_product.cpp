#include <gtest/gtest.h>

#include <numbers>

#include "support/oracles.hpp"

using namespace pmedian;
using std::numbers::pi;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ProductManifold rr() { return ProductManifold({Factor::euclidean(1), Factor::euclidean(1)}); }

ProductPoint pt(double a, double b) { return {{FactorPoint(vec({a})), FactorPoint(vec({b}))}}; }

std::vector<ProductManifold> products() {
  return {ProductManifold({Factor::euclidean(2), Factor::euclidean(1)}),
          ProductManifold({Factor::euclidean(1), Factor::sphere(3)}),
          ProductManifold({Factor::euclidean(3), Factor::spd_bures_wasserstein(3)}),
          ProductManifold({Factor::euclidean(1), Factor::positive_half_line()}),
          ProductManifold({Factor::sphere(3), Factor::euclidean(2), Factor::spd_bures_wasserstein(2)})};
}

}  // namespace

TEST(ProductManifold, RejectsEmptyAndMismatchedPoints) {
  EXPECT_THROW(ProductManifold(std::vector<Factor>{}), Error);
  const ProductManifold pm = rr();
  EXPECT_THROW(pm.dist(pt(0, 0), ProductPoint{{FactorPoint(vec({0}))}}), Error);
}

TEST(ProductDist, ComposesFactorDistances) {
  const ProductManifold pm = rr();
  EXPECT_DOUBLE_EQ(pm.dist(pt(0, 0), pt(3, 4)), 5.0);
  EXPECT_EQ(pm.dist(pt(1, 2), pt(1, 2)), 0.0);
  Rng rng(41);
  const ProductManifold rs({Factor::euclidean(2), Factor::sphere(3)});
  for (int t = 0; t < 100; ++t) {
    const ProductPoint a = oracle::random_point(rs, rng), b = oracle::random_point(rs, rng);
    const double ra = (a.components[0].vector() - b.components[0].vector()).norm();
    const double sa = std::acos(std::clamp(a.components[1].vector().dot(b.components[1].vector()), -1.0, 1.0));
    EXPECT_NEAR(rs.dist(a, b), std::hypot(ra, sa), 1e-12);
    EXPECT_EQ(rs.dist(a, b), rs.dist(b, a));
  }
}

TEST(ProductDist, SingleFactorReducesToFactorDistance) {
  Rng rng(42);
  const Factor f = Factor::spd_bures_wasserstein(3);
  const ProductManifold pm({f});
  for (int t = 0; t < 20; ++t) {
    const ProductPoint a = oracle::random_point(pm, rng), b = oracle::random_point(pm, rng);
    EXPECT_EQ(pm.dist(a, b), f.dist(a.components[0], b.components[0]));
  }
}

TEST(ProductDist, StrictlyMonotoneInEachFactorDistance) {
  const ProductManifold pm = rr();
  double prev = pm.dist(pt(0, 0), pt(1, 1));
  for (double x = 1.5; x < 10; x += 0.5) {
    const double d = pm.dist(pt(0, 0), pt(x, 1));
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(ProductExpLog, ZeroTangentAndSelfLog) {
  Rng rng(43);
  for (const auto& pm : products()) {
    const ProductPoint p = oracle::random_point(pm, rng);
    EXPECT_LE(pm.dist(pm.exp(p, pm.zero_tangent()), p), 1e-12);
    EXPECT_LE(pm.norm(p, pm.log(p, p)), 1e-7);
  }
}

TEST(ProductExpLog, RoundTripNormDistanceAndMidpoint) {
  Rng rng(44);
  for (const auto& pm : products()) {
    for (int t = 0; t < 50; ++t) {
      const ProductPoint p = oracle::random_point(pm, rng);
      const ProductPoint x = oracle::random_point_near(pm, p, 1.5, rng);
      const ProductTangent v = pm.log(p, x);
      EXPECT_LE(oracle::coordinate_gap(pm, pm.exp(p, v), x), 1e-8) << pm.describe();
      EXPECT_NEAR(pm.norm(p, v), oracle::product_dist(pm, p, x), 1e-8) << pm.describe();
      const ProductPoint mid = pm.exp(p, 0.5 * v);
      EXPECT_NEAR(pm.dist(p, mid), pm.dist(mid, x), 1e-8) << pm.describe();
      const auto ld = pm.log_dist(p, x);
      EXPECT_NEAR(ld.dist, pm.dist(p, x), 1e-12);
    }
  }
}

TEST(ProductExpLog, FactorErrorsCarryIndex) {
  const ProductManifold pm({Factor::euclidean(1), Factor::sphere(3)});
  const ProductPoint p{{FactorPoint(vec({0})), FactorPoint(vec({1, 0, 0}))}};
  const ProductPoint x{{FactorPoint(vec({1})), FactorPoint(vec({-1, 0, 0}))}};
  try {
    pm.log(p, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AntipodalPoint);
    EXPECT_EQ(e.factor_index(), 1);
  }
}

TEST(ProductCurvature, MaxOverFactors) {
  EXPECT_EQ(product_curvature_upper(ProductManifold({Factor::euclidean(1), Factor::sphere(3)})), 1.0);
  EXPECT_EQ(product_curvature_upper(rr()), 0.0);
  EXPECT_EQ(product_curvature_upper(
                ProductManifold({Factor::euclidean(1), Factor::sphere(2), Factor::positive_half_line()})),
            1.0);
  try {
    product_curvature_upper(ProductManifold({Factor::euclidean(1), Factor::spd_bures_wasserstein(2)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnavailableCurvature);
  }
  EXPECT_EQ(product_curvature_upper(ProductManifold({Factor::spd_bures_wasserstein(2, 3.0), Factor::sphere(2)})), 3.0);
}

TEST(UniquenessRadius, HadamardSphereAndMixed) {
  EXPECT_FALSE(uniqueness_radius(rr(), pt(0, 0)).has_value());
  const ProductManifold es({Factor::euclidean(1), Factor::sphere(3)});
  const ProductPoint c{{FactorPoint(vec({0})), FactorPoint(vec({0, 0, 1}))}};
  EXPECT_NEAR(*uniqueness_radius(es, c), pi / 4, 1e-15);
  const ProductManifold ss({Factor::sphere(3), Factor::sphere(2)});
  EXPECT_NEAR(*uniqueness_radius(ss, {{FactorPoint(vec({0, 0, 1})), FactorPoint(vec({1, 0}))}}), pi / 4, 1e-15);
}

TEST(UniquenessRadius, NonincreasingInCurvature) {
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {0.5, 1.0, 2.0, 8.0, 32.0}) {
    const ProductManifold pm({Factor::euclidean(1), Factor::spd_bures_wasserstein(2, k)});
    const double r = *uniqueness_radius(pm, {{FactorPoint(vec({0})), FactorPoint(SpdMatrix::identity(2))}});
    EXPECT_NEAR(r, pi / (4 * std::sqrt(k)), 1e-15);
    EXPECT_LE(r, prev);
    prev = r;
  }
}

TEST(BallContainment, Verdicts) {
  const ProductManifold sp({Factor::sphere(3)});
  const ProductPoint pole{{FactorPoint(vec({0, 0, 1}))}};
  {
    const WeightedSample s = WeightedSample::uniform(sp, {pole, pole, pole});
    const auto r = ball_containment_report(s, pole);
    EXPECT_EQ(r.max_distance, 0.0);
    EXPECT_EQ(r.verdict, Containment::Inside);
  }
  {
    Rng rng(45);
    const WeightedSample s = WeightedSample::uniform(rr(), {pt(0, 0), pt(10, 3), pt(-100, 7)});
    const auto r = ball_containment_report(s);
    EXPECT_EQ(r.verdict, Containment::Inside);
    EXPECT_FALSE(r.radius.has_value());
    EXPECT_NEAR(r.max_distance, oracle::product_dist(rr(), r.center, pt(-100, 7)), 1e-9);
  }
  {
    std::vector<ProductPoint> pts{pole};
    for (int k = 0; k < 6; ++k) {
      const double phi = 2 * pi * k / 6, th = pi / 3;
      pts.push_back({{FactorPoint(vec({std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th)}))}});
    }
    const auto r = ball_containment_report(WeightedSample::uniform(sp, pts), pole);
    EXPECT_NEAR(r.max_distance, pi / 3, 1e-12);
    EXPECT_EQ(r.verdict, Containment::Outside);
  }
  {
    const ProductManifold mixed({Factor::euclidean(1), Factor::spd_bures_wasserstein(2)});
    const ProductPoint p{{FactorPoint(vec({0})), FactorPoint(SpdMatrix::identity(2))}};
    const auto r = ball_containment_report(WeightedSample::uniform(mixed, {p}), p);
    EXPECT_EQ(r.verdict, Containment::Inconclusive);
    EXPECT_FALSE(r.radius_available);
  }
}

TEST(WeightedSample, NormalizationRules) {
  const ProductManifold pm = rr();
  EXPECT_THROW(WeightedSample(pm, {pt(0, 0), pt(1, 1)}, {0.5, 0.6}), Error);
  EXPECT_THROW(WeightedSample(pm, {pt(0, 0), pt(1, 1)}, {1.5, -0.5}), Error);
  EXPECT_THROW(WeightedSample(pm, {pt(0, 0)}, {0.5, 0.5}), Error);
  EXPECT_THROW(WeightedSample(pm, {}, {}), Error);
  const WeightedSample s(pm, {pt(0, 0), pt(1, 1), pt(2, 2)}, {0.3, 0.3, 0.4 + 5e-7});
  double sum = 0.0;
  for (double w : s.weights()) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  const WeightedSample u = WeightedSample::from_unnormalized(pm, {pt(0, 0), pt(1, 1)}, {3.0, 1.0});
  EXPECT_DOUBLE_EQ(u.weight(0), 0.75);
  EXPECT_DOUBLE_EQ(u.weight(1), 0.25);
  EXPECT_THROW(WeightedSample::uniform(pm, {pt(0, 0), ProductPoint{{FactorPoint(vec({0}))}}}), Error);
}

TEST(WeightedSample, PowerOfTwoScalingIsBitIdentical) {
  Rng rng(46);
  std::vector<ProductPoint> pts;
  std::vector<double> w;
  for (int i = 0; i < 9; ++i) {
    pts.push_back(pt(oracle::normal(rng), oracle::normal(rng)));
    w.push_back(oracle::uniform(rng, 0.1, 1.0));
  }
  const WeightedSample a = WeightedSample::from_unnormalized(rr(), pts, w);
  for (double c : {0.125, 4.0, 1024.0}) {
    std::vector<double> wc = w;
    for (double& x : wc) x *= c;
    EXPECT_EQ(WeightedSample::from_unnormalized(rr(), pts, wc).weights(), a.weights());
  }
}
