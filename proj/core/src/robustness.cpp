#include "pmedian/robustness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "pmedian/error.hpp"
#include "pmedian/frechet.hpp"

namespace pmedian {

SpdMatrix ar1_covariance(int d, double rho) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "AR(1) dimension must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidInput, "AR(1) decay must lie in (0, 1)");
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  }
  return SpdMatrix(m);
}

ProductManifold univariate_gaussian_manifold() {
  return ProductManifold({Factor::euclidean(1), Factor::positive_half_line()});
}

ProductManifold multivariate_gaussian_manifold(int d) {
  return ProductManifold({Factor::euclidean(d), Factor::spd_bures_wasserstein(d)});
}

namespace {

double beta55(Rng& rng) {
  std::gamma_distribution<double> gamma(5.0, 1.0);
  const double a = gamma(rng);
  const double b = gamma(rng);
  return a / (a + b);
}

}  // namespace

ProductPoint sample_univariate(DrawKind kind, Rng& rng) {
  const bool signal = kind == DrawKind::Signal;
  std::normal_distribution<double> location(signal ? -1.0 : 5.0, signal ? 0.5 : 1.0);
  const double mu = location(rng);
  const double variance = (signal ? 1.0 : 5.0) * beta55(rng);
  return ProductPoint{{FactorPoint(Eigen::VectorXd::Constant(1, mu)), FactorPoint(std::sqrt(variance))}};
}

ProductPoint sample_multivariate(DrawKind kind, int d, double rho, Rng& rng) {
  if (d < 2) throw Error(ErrorKind::InvalidInput, "multivariate draws need d >= 2");
  const bool signal = kind == DrawKind::Signal;
  Eigen::MatrixXd factor = Eigen::MatrixXd::Identity(d, d);
  if (!signal) factor = Eigen::LLT<Eigen::MatrixXd>(ar1_covariance(d, rho).matrix()).matrixL();
  const double shift = signal ? 0.0 : 10.0;
  const int m = 2 * d;
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int attempt = 0;; ++attempt) {
    Eigen::MatrixXd draws(d, m);
    for (int c = 0; c < m; ++c) {
      Eigen::VectorXd z(d);
      for (int r = 0; r < d; ++r) z(r) = normal(rng);
      draws.col(c) = (factor * z).array() + shift;
    }
    const Eigen::VectorXd mean = draws.rowwise().mean();
    const Eigen::MatrixXd centered = draws.colwise() - mean;
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(m);
    try {
      return ProductPoint{{FactorPoint(mean), FactorPoint(SpdMatrix(cov))}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotSpd || attempt >= 1) throw;
    }
  }
}

int contamination_count(int n, double alpha) {
  return static_cast<int>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

WeightedSample contaminate(const WeightedSample& sample, double alpha, const NoiseSource& noise, Rng& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidInput, "contamination rate must lie in [0, 1)");
  const int n = sample.size();
  const int k = contamination_count(n, alpha);
  std::vector<ProductPoint> points = sample.points();
  if (k == 0) return WeightedSample(sample.manifold(), std::move(points), sample.weights());

  // Partial Fisher–Yates: the first k entries of `order` are the replaced indices.
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::sort(order.begin(), order.begin() + k);
  for (int i = 0; i < k; ++i) points[order[i]] = noise(rng);
  return WeightedSample(sample.manifold(), std::move(points), sample.weights());
}

double estimation_error(const ProductManifold& pm, const ProductPoint& estimate, const ProductPoint& reference) {
  return pm.dist(estimate, reference);
}

// ---------------------------------------------------------------------------
// Sweeps

const char* to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::FrechetMean: return "frechet_mean";
    case Estimator::GeometricMedian: return "geometric_median";
  }
  return "unknown";
}

void ContaminationSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidInput, "contamination spec: " + what); };
  if (n < 1) fail("n must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (alpha_grid.empty()) fail("alpha grid is empty");
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 0.49)) fail("alpha values must lie in [0, 0.49]");
  }
  if (scenario == Scenario::Multivariate) {
    if (d < 2) fail("d must be >= 2");
    if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  }
  if (!(reference_sigma > 0.0)) fail("reference sigma must be positive");
}

std::vector<double> alpha_grid(double step, double upto) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha step must be positive");
  const double per_unit = std::round(1.0 / step);
  const bool exact = std::abs(per_unit * step - 1.0) < 1e-12;
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double a = exact ? k / per_unit : k * step;
    if (a > upto + 1e-12) break;
    out.push_back(a);
  }
  return out;
}

double SweepResult::mean_error(double alpha, Estimator estimator) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.estimator == estimator && std::abs(r.alpha - alpha) < 1e-12) {
      sum += r.error;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::InvalidInput, "no rows for alpha " + std::to_string(alpha));
  return sum / count;
}

ProductManifold sweep_manifold(const ContaminationSpec& spec) {
  return spec.scenario == Scenario::Univariate ? univariate_gaussian_manifold()
                                               : multivariate_gaussian_manifold(spec.d);
}

ProductPoint sweep_reference(const ContaminationSpec& spec) {
  if (spec.scenario == Scenario::Univariate) {
    return ProductPoint{{FactorPoint(Eigen::VectorXd::Constant(1, -1.0)), FactorPoint(spec.reference_sigma)}};
  }
  return ProductPoint{{FactorPoint(Eigen::VectorXd(Eigen::VectorXd::Zero(spec.d))),
                       FactorPoint(SpdMatrix::identity(spec.d))}};
}

namespace {

// Product mean that survives a non-converging factor by keeping its last iterate.
std::pair<ProductPoint, bool> robust_product_mean(const WeightedSample& sample) {
  const auto& pm = sample.manifold();
  ProductPoint out;
  bool converged = true;
  std::vector<FactorPoint> column;
  for (int j = 0; j < pm.size(); ++j) {
    column.clear();
    for (const auto& p : sample.points()) column.push_back(p.components[j]);
    try {
      out.components.push_back(factor_mean(pm.factor(j), column, sample.weights()));
    } catch (const MeanNonConvergence& e) {
      converged = false;
      out.components.push_back(e.last_iterate());
    }
  }
  return {std::move(out), converged};
}

struct CellResult {
  SweepRow mean;
  SweepRow median;
};

CellResult run_cell(const ContaminationSpec& spec, const SolverConfig& cfg, int alpha_index, int trial) {
  Rng rng(stream_seed(spec.seed, static_cast<std::uint64_t>(alpha_index), static_cast<std::uint64_t>(trial)));
  const ProductManifold pm = sweep_manifold(spec);
  const double alpha = spec.alpha_grid[static_cast<size_t>(alpha_index)];

  std::vector<ProductPoint> points;
  points.reserve(static_cast<size_t>(spec.n));
  NoiseSource noise;
  if (spec.scenario == Scenario::Univariate) {
    for (int i = 0; i < spec.n; ++i) points.push_back(sample_univariate(DrawKind::Signal, rng));
    noise = [](Rng& r) { return sample_univariate(DrawKind::Noise, r); };
  } else {
    for (int i = 0; i < spec.n; ++i) points.push_back(sample_multivariate(DrawKind::Signal, spec.d, spec.rho, rng));
    noise = [d = spec.d, rho = spec.rho](Rng& r) { return sample_multivariate(DrawKind::Noise, d, rho, r); };
  }
  const WeightedSample clean = WeightedSample::uniform(pm, std::move(points));
  const WeightedSample data = contaminate(clean, alpha, noise, rng);
  const ProductPoint reference = sweep_reference(spec);

  auto [mean, converged] = robust_product_mean(data);
  CellResult out;
  out.mean = {alpha, trial, Estimator::FrechetMean, estimation_error(pm, mean, reference),
              converged ? "Converged" : "NonConvergence"};
  const SolverReport report = solve_median(data, mean, cfg);
  out.median = {alpha, trial, Estimator::GeometricMedian, estimation_error(pm, report.minimizer, reference),
                to_string(report.termination)};
  return out;
}

}  // namespace

SweepResult run_sweep(const ContaminationSpec& spec, const SolverConfig& cfg, int threads) {
  spec.validate();
  cfg.validate();
  const int cells = static_cast<int>(spec.alpha_grid.size()) * spec.trials;
  std::vector<CellResult> results(static_cast<size_t>(cells));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (int c = next.fetch_add(1); c < cells && !failed; c = next.fetch_add(1)) {
      try {
        results[c] = run_cell(spec, cfg, c / spec.trials, c % spec.trials);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, cells));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  out.rows.reserve(static_cast<size_t>(2 * cells));
  for (auto& cell : results) {
    out.rows.push_back(std::move(cell.mean));
    out.rows.push_back(std::move(cell.median));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Probes

double sample_diameter(const WeightedSample& sample) {
  const auto& pm = sample.manifold();
  double diam = 0.0;
  for (int i = 0; i < sample.size(); ++i) {
    for (int j = i + 1; j < sample.size(); ++j) diam = std::max(diam, pm.dist(sample.point(i), sample.point(j)));
  }
  return diam;
}

double distance_to_sample(const WeightedSample& sample, const ProductPoint& z) {
  const auto& pm = sample.manifold();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sample.points()) best = std::min(best, pm.dist(z, p));
  return best;
}

namespace {

ProductTangent ray_direction(const ProductManifold& pm, const ProductPoint& base) {
  ProductTangent dir = pm.zero_tangent();
  for (int j = 0; j < pm.size(); ++j) {
    const Factor& f = pm.factor(j);
    switch (f.kind()) {
      case FactorKind::Sphere:
        continue;
      case FactorKind::Euclidean: {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(f.dim());
        e(0) = 1.0;
        dir.components[j] = e;
        break;
      }
      case FactorKind::PositiveHalfLine:
        dir.components[j] = 1.0;
        break;
      case FactorKind::SpdBuresWasserstein:
        dir.components[j] = SymMatrix::identity(f.dim());
        break;
    }
    return (1.0 / pm.norm(base, dir)) * dir;
  }
  throw Error(ErrorKind::InvalidInput, "breakdown probe needs a non-compact factor");
}

}  // namespace

BreakdownTable breakdown_probe(const WeightedSample& clean, double weight_contaminated,
                               const std::vector<double>& radii, const SolverConfig& cfg) {
  if (!(weight_contaminated > 0.0 && weight_contaminated < 1.0) || weight_contaminated == 0.5) {
    throw Error(ErrorKind::InvalidInput, "contaminated weight must lie in (0, 1) and differ from 1/2");
  }
  const auto& pm = clean.manifold();
  const ProductPoint center = product_mean(clean);
  const ProductTangent dir = ray_direction(pm, center);
  double spread = 0.0;
  for (const auto& p : clean.points()) spread = std::max(spread, pm.dist(center, p));

  BreakdownTable table;
  table.weight_contaminated = weight_contaminated;
  table.clean_diameter = sample_diameter(clean);

  for (double r : radii) {
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidInput, "probe radii must be nonnegative");
    // Along a ray from the center, distance ≥ t − spread to every clean point.
    const ProductPoint contaminant = pm.exp(center, (r + spread) * dir);
    std::vector<ProductPoint> points = clean.points();
    std::vector<double> weights;
    weights.reserve(points.size() + 1);
    for (double w : clean.weights()) weights.push_back((1.0 - weight_contaminated) * w);
    points.push_back(contaminant);
    weights.push_back(weight_contaminated);
    const WeightedSample mixed(pm, std::move(points), std::move(weights));

    const SolverReport report = solve_median(mixed, cfg);
    table.rows.push_back({r, distance_to_sample(clean, contaminant), distance_to_sample(clean, report.minimizer),
                          report.termination});
  }
  return table;
}

ProductTangent random_unit_tangent(const ProductManifold& pm, const ProductPoint& p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ProductTangent t = pm.zero_tangent();
  for (int j = 0; j < pm.size(); ++j) {
    const Factor& f = pm.factor(j);
    switch (f.kind()) {
      case FactorKind::Euclidean:
      case FactorKind::Sphere: {
        Eigen::VectorXd v(f.dim());
        for (int k = 0; k < f.dim(); ++k) v(k) = normal(rng);
        if (f.kind() == FactorKind::Sphere) {
          const auto& base = p.components[j].vector();
          v -= v.dot(base) * base;
        }
        t.components[j] = v;
        break;
      }
      case FactorKind::PositiveHalfLine:
        t.components[j] = normal(rng);
        break;
      case FactorKind::SpdBuresWasserstein: {
        Eigen::MatrixXd a(f.dim(), f.dim());
        for (int c = 0; c < f.dim(); ++c) {
          for (int r = 0; r < f.dim(); ++r) a(r, c) = normal(rng);
        }
        t.components[j] = symmetrize(a);
        break;
      }
    }
  }
  const double n = pm.norm(p, t);
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidInput, "degenerate random tangent");
  return (1.0 / n) * t;
}

PerturbationTable perturbation_probe(const WeightedSample& sample, const std::vector<double>& epsilons, Rng& rng,
                                     const SolverConfig& cfg, int trials) {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "perturbation probe needs at least one trial");
  const auto& pm = sample.manifold();
  const ProductPoint median = solve_median(sample, cfg).minimizer;

  PerturbationTable table;
  for (double eps : epsilons) {
    if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidInput, "perturbation sizes must be nonnegative");
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      std::vector<ProductPoint> moved;
      moved.reserve(static_cast<size_t>(sample.size()));
      for (const auto& x : sample.points()) {
        if (eps == 0.0) {
          moved.push_back(x);
        } else {
          moved.push_back(pm.exp(x, eps * random_unit_tangent(pm, x, rng)));
        }
      }
      const WeightedSample perturbed(pm, std::move(moved), sample.weights());
      total += pm.dist(solve_median(perturbed, median, cfg).minimizer, median);
    }
    table.rows.push_back({eps, total / trials});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (const auto& row : table.rows) {
    if (row.epsilon > 0.0 && row.displacement > 0.0) {
      const double x = std::log(row.epsilon);
      const double y = std::log(row.displacement);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  if (m >= 2) table.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return table;
}

}  // namespace pmedian
