#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pmedian/product.hpp"
#include "pmedian/random.hpp"
#include "pmedian/solvers.hpp"

namespace pmedian {

// --- Generative models ------------------------------------------------------

/// Σ(i, j) = ρ^|i−j|. Throws InvalidInput unless d ≥ 1 and ρ ∈ (0, 1).
SpdMatrix ar1_covariance(int d, double rho);

enum class DrawKind { Signal, Noise };

/// R × R₊ in (μ, σ) coordinates.
ProductManifold univariate_gaussian_manifold();
/// Rᵈ × SPD(d) with the Bures–Wasserstein metric.
ProductManifold multivariate_gaussian_manifold(int d);

/// Signal: μ ~ N(−1, 1/4), σ² ~ Beta(5, 5). Noise: μ ~ N(5, 1),
/// σ² ~ 5·Beta(5, 5). Returns (μ, σ).
ProductPoint sample_univariate(DrawKind kind, Rng& rng);

/// Maximum-likelihood (mean, covariance) of 2d draws from N(0, I) (signal)
/// or N(10·1, Σ_AR(ρ)) (noise). A degenerate covariance is redrawn once.
ProductPoint sample_multivariate(DrawKind kind, int d, double rho, Rng& rng);

using NoiseSource = std::function<ProductPoint(Rng&)>;

/// ⌊α n⌋ for decimal α, robust to α·n landing a hair below an integer.
int contamination_count(int n, double alpha);

/// Replaces ⌊α n⌋ points, chosen uniformly without replacement, by draws
/// from `noise`. Weights are kept.
WeightedSample contaminate(const WeightedSample& sample, double alpha, const NoiseSource& noise, Rng& rng);

double estimation_error(const ProductManifold& pm, const ProductPoint& estimate, const ProductPoint& reference);

// --- Contamination sweeps ---------------------------------------------------

enum class Scenario { Univariate, Multivariate };
enum class Estimator { FrechetMean, GeometricMedian };

const char* to_string(Estimator e) noexcept;

struct ContaminationSpec {
  Scenario scenario = Scenario::Univariate;
  int n = 1000;
  std::vector<double> alpha_grid;
  int trials = 5;
  std::uint64_t seed = 0;
  int d = 5;          // multivariate only
  double rho = 0.5;   // multivariate only
  /// σ of the univariate reference N(−1, σ²); the default reads the modal
  /// realization as variance ½.
  double reference_sigma = 0.70710678118654752440;

  void validate() const;
};

/// Standard alpha grid 0, 0.05, ..., upto (inclusive), built from integer steps.
std::vector<double> alpha_grid(double step, double upto);

struct SweepRow {
  double alpha = 0.0;
  int trial = 0;
  Estimator estimator = Estimator::FrechetMean;
  double error = 0.0;
  std::string termination;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Mean error over trials for one (alpha, estimator) cell.
  double mean_error(double alpha, Estimator estimator) const;
};

ProductManifold sweep_manifold(const ContaminationSpec& spec);
ProductPoint sweep_reference(const ContaminationSpec& spec);

/// Runs every (α, trial) cell on its own RNG stream; `threads` workers share
/// the cells and results are merged in (α, trial) order.
SweepResult run_sweep(const ContaminationSpec& spec, const SolverConfig& cfg, int threads = 1);

// --- Breakdown and perturbation probes --------------------------------------

struct BreakdownRow {
  double radius = 0.0;
  double contaminant_distance = 0.0;  // d(z', clean set)
  double distance = 0.0;              // d(median, clean set)
  Termination termination = Termination::MaxIters;
};

struct BreakdownTable {
  double weight_contaminated = 0.0;
  double clean_diameter = 0.0;
  std::vector<BreakdownRow> rows;
};

/// Moves total weight W_I onto one contaminating point placed along a fixed
/// geodesic ray from the clean Fréchet mean, far enough that its distance to
/// every clean point is at least R, and reports the median's distance to the
/// nearest clean point for each R. The ray runs along the first coordinate of
/// the first non-spherical factor.
BreakdownTable breakdown_probe(const WeightedSample& clean, double weight_contaminated,
                               const std::vector<double>& radii, const SolverConfig& cfg);

/// Largest pairwise distance in the sample.
double sample_diameter(const WeightedSample& sample);
/// Distance from z to the nearest sample point.
double distance_to_sample(const WeightedSample& sample, const ProductPoint& z);

struct PerturbationRow {
  double epsilon = 0.0;
  double displacement = 0.0;  // mean over trials
};

struct PerturbationTable {
  std::vector<PerturbationRow> rows;
  double slope = 0.0;  // least-squares slope of log displacement on log ε
};

/// Moves every datum by a random tangent of norm ε, re-solves and records the
/// median displacement, averaged over `trials` draws per ε.
PerturbationTable perturbation_probe(const WeightedSample& sample, const std::vector<double>& epsilons, Rng& rng,
                                     const SolverConfig& cfg, int trials = 20);

/// Random unit-norm tangent at p.
ProductTangent random_unit_tangent(const ProductManifold& pm, const ProductPoint& p, Rng& rng);

}  // namespace pmedian
