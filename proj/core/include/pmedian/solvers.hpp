#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmedian/product.hpp"

namespace pmedian {

enum class SolverMethod { Subgradient, Weiszfeld, Hybrid };
enum class Termination { ResidualTol, StepTol, MaxIters, AtDatum };

const char* to_string(SolverMethod m) noexcept;
const char* to_string(Termination t) noexcept;
std::optional<SolverMethod> parse_solver_method(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::Hybrid;
  int max_iters = 10000;
  /// Subgradient base step; η_k = η₀/√(k+1). Unset: F(init) / max(1, n).
  std::optional<double> eta0;
  double tol_step = 1e-12;
  double tol_residual = 1e-9;
  /// Distance floor in the Weiszfeld weights; 0 runs the pure iteration.
  double weiszfeld_epsilon = 0.0;
  double coincidence_tol = 1e-11;
  /// Weiszfeld step is (1 − damping)·Δ.
  double damping = 0.0;
  double hybrid_switch_residual = 1e-2;
  int hybrid_max_subgradient_iters = 500;
  /// Slack in the datum optimality test ‖smooth part‖ ≤ w_datum + tol.
  double datum_test_tol = 1e-10;
  /// Carried into reports and manifests; the min-norm selections used by the
  /// solvers are deterministic and draw nothing from it.
  std::uint64_t seed = 0;
  /// Keep every iterate in SolverReport::iterate_trace.
  bool record_iterates = false;

  /// Throws InvalidInput on out-of-range values.
  void validate() const;
};

struct SolverEvent {
  enum class Kind { LeftManifold, Clamp, DatumRestart, PhaseSwitch };
  int iteration = 0;
  Kind kind = Kind::LeftManifold;
  std::string detail;
};

const char* to_string(SolverEvent::Kind k) noexcept;

struct SolverReport {
  SolverMethod method = SolverMethod::Subgradient;
  ProductPoint minimizer;
  std::vector<double> objective_trace;
  /// Norm of the min-norm subgradient at each iterate. At an iterate that
  /// coincides with a datum the entry is the distance from 0 to ∂F there.
  std::vector<double> residual_trace;
  std::vector<ProductPoint> iterate_trace;
  double best_objective = 0.0;
  int iterations_used = 0;
  Termination termination = Termination::MaxIters;
  std::optional<int> datum_index;       // set when termination == AtDatum
  std::optional<int> switch_iteration;  // hybrid: first Weiszfeld iteration
  double initial_distance = 0.0;        // observed d(init, minimizer)
  double max_subgradient_norm = 0.0;    // observed sup of the residual trace
  std::vector<SolverEvent> events;

  double final_residual() const { return residual_trace.empty() ? 0.0 : residual_trace.back(); }
};

/// F(z) = Σ wᵢ d(z, xᵢ).
double objective(const WeightedSample& sample, const ProductPoint& z);

/// −Σ_{dᵢ>0} wᵢ log_z(xᵢ)/dᵢ. Data coinciding with z contribute the
/// minimum-norm element (zero) of their weighted unit ball.
ProductTangent min_norm_subgradient(const WeightedSample& sample, const ProductPoint& z);

/// Inverse-distance weights w̃ᵢ ∝ wᵢ / max(dᵢ, ε), normalized to sum to one.
/// Throws CoincidentIterate when some dᵢ = 0 and ε = 0.
std::vector<double> weiszfeld_weights(const WeightedSample& sample, const ProductPoint& z,
                                      double epsilon = 0.0);

/// Result of testing whether datum j minimizes F: the smooth part
/// s = Σ_{dᵢ>0} wᵢ log(xᵢ)/dᵢ at x_j must be absorbed by the ball of radius
/// equal to the total weight sitting exactly on x_j.
struct DatumOptimality {
  bool optimal = false;
  double smooth_norm = 0.0;
  double ball_weight = 0.0;
  double objective = 0.0;
  ProductTangent smooth;
  double inverse_distance_sum = 0.0;
};

DatumOptimality datum_optimality(const WeightedSample& sample, int datum, double tol = 1e-10);

SolverReport subgradient_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg);
SolverReport weiszfeld_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg);
SolverReport hybrid_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg);

/// Dispatches on cfg.method.
SolverReport solve_median(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg);
/// Starts from the product Fréchet mean.
SolverReport solve_median(const WeightedSample& sample, const SolverConfig& cfg);

}  // namespace pmedian
