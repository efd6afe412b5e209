#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace pmedian;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double tangent_mean_norm(const Factor& f, const FactorPoint& m, const std::vector<FactorPoint>& pts,
                         const std::vector<double>& w) {
  FactorTangent acc = f.zero_tangent();
  for (size_t i = 0; i < pts.size(); ++i) acc += w[i] * f.log(m, pts[i]);
  return f.norm(m, acc);
}

}  // namespace

TEST(FactorMean, AllEqualPoints) {
  Rng rng(51);
  for (const Factor& f : {Factor::euclidean(2), Factor::positive_half_line(), Factor::sphere(3),
                          Factor::spd_bures_wasserstein(3)}) {
    const FactorPoint p = oracle::random_point(f, rng);
    const std::vector<FactorPoint> pts{p, p, p};
    const std::vector<double> w{0.2, 0.3, 0.5};
    EXPECT_LE(f.dist(factor_mean(f, pts, w), p), 1e-7) << f.describe();
  }
}

TEST(FactorMean, ClosedForms) {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<FactorPoint> e{FactorPoint(vec({0.0})), FactorPoint(vec({1.0}))};
  EXPECT_DOUBLE_EQ(factor_mean(Factor::euclidean(1), e, half).vector()[0], 0.5);
  const std::vector<FactorPoint> bw{FactorPoint(SpdMatrix::identity(2)),
                                    FactorPoint(SpdMatrix(Eigen::MatrixXd(4.0 * Eigen::Matrix2d::Identity())))};
  const Eigen::MatrixXd m = factor_mean(Factor::spd_bures_wasserstein(2), bw, half).spd().matrix();
  EXPECT_LT((m - 2.25 * Eigen::Matrix2d::Identity()).norm(), 1e-10);
}

TEST(FactorMean, CommutingDiagonalBarycenter) {
  Rng rng(52);
  for (int t = 0; t < 10; ++t) {
    const int n = 4, d = 3;
    std::vector<FactorPoint> pts;
    std::vector<double> w;
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(d);
    double total = 0.0;
    for (int i = 0; i < n; ++i) w.push_back(oracle::uniform(rng, 0.5, 1.5)), total += w.back();
    for (double& x : w) x /= total;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd a(d);
      for (int k = 0; k < d; ++k) a[k] = oracle::uniform(rng, 0.2, 5.0);
      expect += w[i] * a.cwiseSqrt();
      pts.emplace_back(SpdMatrix(Eigen::MatrixXd(a.asDiagonal())));
    }
    expect = expect.cwiseProduct(expect);
    const Eigen::MatrixXd m = factor_mean(Factor::spd_bures_wasserstein(d), pts, w).spd().matrix();
    EXPECT_LT((m.diagonal() - expect).norm(), 1e-9);
  }
}

TEST(FactorMean, FirstOrderConditionPerFactor) {
  Rng rng(53);
  for (const Factor& f : {Factor::euclidean(3), Factor::positive_half_line(), Factor::sphere(3), Factor::sphere(5),
                          Factor::spd_bures_wasserstein(2), Factor::spd_bures_wasserstein(4)}) {
    for (int t = 0; t < 5; ++t) {
      const FactorPoint c = oracle::random_point(f, rng);
      std::vector<FactorPoint> pts;
      std::vector<double> w;
      double total = 0.0;
      for (int i = 0; i < 7; ++i) {
        pts.push_back(oracle::random_point_near(f, c, 0.8, rng));
        w.push_back(oracle::uniform(rng, 0.5, 1.5));
        total += w.back();
      }
      for (double& x : w) x /= total;
      const FactorPoint m = factor_mean(f, pts, w);
      EXPECT_LE(tangent_mean_norm(f, m, pts, w), 1e-8) << f.describe();
    }
  }
}

TEST(FactorMean, BuresWassersteinFixedPointResidual) {
  Rng rng(54);
  const Factor f = Factor::spd_bures_wasserstein(3);
  std::vector<FactorPoint> pts;
  std::vector<double> w(6, 1.0 / 6);
  for (int i = 0; i < 6; ++i) pts.push_back(oracle::random_point(f, rng));
  const SpdMatrix m = factor_mean(f, pts, w).spd();
  const Eigen::MatrixXd r = oracle::eig_sqrt(m.matrix());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 6; ++i) acc += w[i] * oracle::eig_sqrt(r * pts[i].spd().matrix() * r);
  const Eigen::MatrixXd ri = r.inverse();
  const Eigen::MatrixXd next = ri * acc * acc * ri;
  EXPECT_LE((next - m.matrix()).norm(), 1e-8);
}

TEST(FactorMean, IterationCapRaisesWithLastIterate) {
  Rng rng(55);
  const Factor f = Factor::sphere(3);
  std::vector<FactorPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(oracle::random_point_near(f, FactorPoint(vec({0, 0, 1})), 1.2, rng));
  const std::vector<double> w(5, 0.2);
  MeanOptions opts;
  opts.max_iters = 1;
  try {
    factor_mean(f, pts, w, opts);
    FAIL();
  } catch (const MeanNonConvergence& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_NO_THROW(f.check_point(e.last_iterate()));
  }
}

TEST(ProductMean, ClosedForms) {
  const ProductManifold rr({Factor::euclidean(1), Factor::euclidean(1)});
  auto p = [](double a, double b) { return ProductPoint{{FactorPoint(vec({a})), FactorPoint(vec({b}))}}; };
  const ProductPoint m = product_mean(WeightedSample::uniform(rr, {p(0, 0), p(1, 0), p(0, 1), p(1, 1)}));
  EXPECT_DOUBLE_EQ(m.components[0].vector()[0], 0.5);
  EXPECT_DOUBLE_EQ(m.components[1].vector()[0], 0.5);
  const ProductPoint single = product_mean(WeightedSample::uniform(rr, {p(3, -2)}));
  EXPECT_EQ(single.components[0].vector()[0], 3.0);
  const ProductManifold uni({Factor::euclidean(1), Factor::positive_half_line()});
  const ProductPoint g =
      product_mean(WeightedSample::uniform(uni, {{{FactorPoint(vec({0})), FactorPoint(1.0)}},
                                                 {{FactorPoint(vec({2})), FactorPoint(3.0)}}}));
  EXPECT_DOUBLE_EQ(g.components[0].vector()[0], 1.0);
  EXPECT_DOUBLE_EQ(g.components[1].scalar(), 2.0);
}

TEST(ProductMean, EuclideanIsWeightedAverage) {
  Rng rng(56);
  const ProductManifold pm({Factor::euclidean(3), Factor::euclidean(2)});
  const WeightedSample s = oracle::random_sample(pm, 11, rng);
  const ProductPoint m = product_mean(s);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < s.size(); ++i) {
    a += s.weight(i) * s.point(i).components[0].vector();
    b += s.weight(i) * s.point(i).components[1].vector();
  }
  EXPECT_LT((m.components[0].vector() - a).norm(), 1e-14);
  EXPECT_LT((m.components[1].vector() - b).norm(), 1e-14);
}

TEST(ProductMean, SeparableUnderFactorPermutation) {
  Rng rng(57);
  const ProductManifold pm({Factor::sphere(3), Factor::euclidean(2), Factor::spd_bures_wasserstein(2)});
  const WeightedSample s = oracle::random_sample(pm, 8, rng, 0.7);
  const ProductManifold swapped({Factor::spd_bures_wasserstein(2), Factor::sphere(3), Factor::euclidean(2)});
  std::vector<ProductPoint> pts;
  for (const auto& p : s.points()) pts.push_back({{p.components[2], p.components[0], p.components[1]}});
  const ProductPoint a = product_mean(s);
  const ProductPoint b = product_mean(WeightedSample(swapped, pts, s.weights()));
  EXPECT_EQ(a.components[0].vector(), b.components[1].vector());
  EXPECT_EQ(a.components[1].vector(), b.components[2].vector());
  EXPECT_EQ(a.components[2].spd().matrix(), b.components[0].spd().matrix());
}
