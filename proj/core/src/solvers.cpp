#include "pmedian/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmedian/error.hpp"
#include "pmedian/frechet.hpp"

namespace pmedian {

const char* to_string(SolverMethod m) noexcept {
  switch (m) {
    case SolverMethod::Subgradient: return "subgradient";
    case SolverMethod::Weiszfeld: return "weiszfeld";
    case SolverMethod::Hybrid: return "hybrid";
  }
  return "unknown";
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::ResidualTol: return "ResidualTol";
    case Termination::StepTol: return "StepTol";
    case Termination::MaxIters: return "MaxIters";
    case Termination::AtDatum: return "AtDatum";
  }
  return "unknown";
}

const char* to_string(SolverEvent::Kind k) noexcept {
  switch (k) {
    case SolverEvent::Kind::LeftManifold: return "LeftManifold";
    case SolverEvent::Kind::Clamp: return "Clamp";
    case SolverEvent::Kind::DatumRestart: return "DatumRestart";
    case SolverEvent::Kind::PhaseSwitch: return "PhaseSwitch";
  }
  return "unknown";
}

std::optional<SolverMethod> parse_solver_method(const std::string& name) {
  if (name == "subgradient") return SolverMethod::Subgradient;
  if (name == "weiszfeld") return SolverMethod::Weiszfeld;
  if (name == "hybrid") return SolverMethod::Hybrid;
  return std::nullopt;
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidInput, "solver config: " + what); };
  if (max_iters < 1) fail("max_iters must be positive");
  if (eta0 && !(*eta0 > 0.0 && std::isfinite(*eta0))) fail("eta0 must be positive");
  if (!(tol_step > 0.0)) fail("tol_step must be positive");
  if (!(tol_residual > 0.0)) fail("tol_residual must be positive");
  if (!(weiszfeld_epsilon >= 0.0)) fail("weiszfeld_epsilon must be nonnegative");
  if (!(coincidence_tol > 0.0)) fail("coincidence_tol must be positive");
  if (!(damping >= 0.0 && damping <= 1.0)) fail("damping must lie in [0, 1]");
  if (!(hybrid_switch_residual > 0.0)) fail("hybrid_switch_residual must be positive");
  if (hybrid_max_subgradient_iters < 0) fail("hybrid_max_subgradient_iters must be nonnegative");
  if (!(datum_test_tol >= 0.0)) fail("datum_test_tol must be nonnegative");
}

namespace {

constexpr int kMaxStepHalvings = 30;

// Logs and distances from z to every datum, accumulated in index order.
struct Evaluation {
  std::vector<ProductTangent> logs;
  std::vector<double> dists;
  double objective = 0.0;
  int nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
};

Evaluation evaluate(const WeightedSample& sample, const ProductPoint& z) {
  const auto& pm = sample.manifold();
  Evaluation ev;
  const int n = sample.size();
  ev.logs.reserve(static_cast<size_t>(n));
  ev.dists.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto ld = pm.log_dist(z, sample.point(i));
    ev.objective += sample.weight(i) * ld.dist;
    if (ld.dist < ev.nearest_dist) {
      ev.nearest_dist = ld.dist;
      ev.nearest = i;
    }
    ev.logs.push_back(std::move(ld.log));
    ev.dists.push_back(ld.dist);
  }
  return ev;
}

// Σ_{dᵢ>0} wᵢ logᵢ / dᵢ: the negative of the smooth part of the subgradient.
ProductTangent smooth_pull(const WeightedSample& sample, const Evaluation& ev) {
  ProductTangent acc = sample.manifold().zero_tangent();
  for (int i = 0; i < sample.size(); ++i) {
    if (ev.dists[i] > 0.0) acc += (sample.weight(i) / ev.dists[i]) * ev.logs[i];
  }
  return acc;
}

double default_eta0(const WeightedSample& sample, double initial_objective) {
  const double eta = initial_objective / std::max(1.0, static_cast<double>(sample.size()));
  return eta > 0.0 ? eta : 1.0;
}

// Takes exp(z, v), halving v on LeftManifold. Returns nullopt after the
// halving budget is spent.
std::optional<ProductPoint> guarded_exp(const ProductManifold& pm, const ProductPoint& z, ProductTangent v,
                                        int iteration, SolverReport& report) {
  for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt) {
    try {
      int clamps = 0;
      ProductPoint next = pm.exp(z, v, &clamps);
      if (clamps > 0) {
        report.events.push_back({iteration, SolverEvent::Kind::Clamp,
                                 std::to_string(clamps) + " half-line component(s) clamped"});
      }
      return next;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LeftManifold) throw;
      report.events.push_back({iteration, SolverEvent::Kind::LeftManifold, e.what()});
      v *= 0.5;
    }
  }
  return std::nullopt;
}

void record(SolverReport& report, const SolverConfig& cfg, const ProductPoint& z, double objective,
            double residual) {
  report.objective_trace.push_back(objective);
  report.residual_trace.push_back(residual);
  if (cfg.record_iterates) report.iterate_trace.push_back(z);
  report.max_subgradient_norm = std::max(report.max_subgradient_norm, residual);
  ++report.iterations_used;
}

void finish(SolverReport& report, const WeightedSample& sample, const ProductPoint& init) {
  report.best_objective = *std::min_element(report.objective_trace.begin(), report.objective_trace.end());
  report.initial_distance = sample.manifold().dist(init, report.minimizer);
}

// Records the datum as the final iterate and stops there.
void stop_at_datum(SolverReport& report, const SolverConfig& cfg, const WeightedSample& sample, int j,
                   const DatumOptimality& test) {
  report.minimizer = sample.point(j);
  record(report, cfg, report.minimizer, test.objective, std::max(0.0, test.smooth_norm - test.ball_weight));
  report.termination = Termination::AtDatum;
  report.datum_index = j;
}

}  // namespace

double objective(const WeightedSample& sample, const ProductPoint& z) {
  const auto& pm = sample.manifold();
  double total = 0.0;
  for (int i = 0; i < sample.size(); ++i) total += sample.weight(i) * pm.dist(z, sample.point(i));
  return total;
}

ProductTangent min_norm_subgradient(const WeightedSample& sample, const ProductPoint& z) {
  sample.manifold().check_point(z);
  return -1.0 * smooth_pull(sample, evaluate(sample, z));
}

std::vector<double> weiszfeld_weights(const WeightedSample& sample, const ProductPoint& z, double epsilon) {
  const auto& pm = sample.manifold();
  std::vector<double> out(static_cast<size_t>(sample.size()));
  double total = 0.0;
  for (int i = 0; i < sample.size(); ++i) {
    double d = pm.dist(z, sample.point(i));
    if (epsilon > 0.0) d = std::max(d, epsilon);
    if (d == 0.0) {
      throw Error(ErrorKind::CoincidentIterate, "iterate coincides with datum " + std::to_string(i));
    }
    out[i] = sample.weight(i) / d;
    total += out[i];
  }
  for (auto& w : out) w /= total;
  return out;
}

DatumOptimality datum_optimality(const WeightedSample& sample, int datum, double tol) {
  const auto& x = sample.point(datum);
  const Evaluation ev = evaluate(sample, x);
  DatumOptimality out;
  out.objective = ev.objective;
  out.smooth = smooth_pull(sample, ev);
  out.smooth_norm = sample.manifold().norm(x, out.smooth);
  for (int i = 0; i < sample.size(); ++i) {
    if (ev.dists[i] == 0.0) {
      out.ball_weight += sample.weight(i);
    } else {
      out.inverse_distance_sum += sample.weight(i) / ev.dists[i];
    }
  }
  out.optimal = out.smooth_norm <= out.ball_weight + tol;
  return out;
}

SolverReport subgradient_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg) {
  cfg.validate();
  const auto& pm = sample.manifold();
  pm.check_point(init);

  SolverReport report;
  report.method = SolverMethod::Subgradient;
  report.termination = Termination::MaxIters;

  ProductPoint z = init;
  Evaluation ev = evaluate(sample, z);
  const double eta0 = cfg.eta0.value_or(default_eta0(sample, ev.objective));
  ProductPoint best = z;
  double best_objective = ev.objective;

  for (int k = 0; k < cfg.max_iters; ++k) {
    const ProductTangent pull = smooth_pull(sample, ev);
    const double residual = pm.norm(z, pull);
    const double eta = eta0 / std::sqrt(static_cast<double>(k) + 1.0);
    const double step_len = eta * residual;

    if (ev.nearest_dist <= std::max(cfg.coincidence_tol, step_len)) {
      const auto test = datum_optimality(sample, ev.nearest, cfg.datum_test_tol);
      if (test.optimal) {
        if (ev.nearest_dist > 0.0) record(report, cfg, z, ev.objective, residual);
        stop_at_datum(report, cfg, sample, ev.nearest, test);
        finish(report, sample, init);
        return report;
      }
    }

    record(report, cfg, z, ev.objective, residual);
    if (ev.objective < best_objective) {
      best_objective = ev.objective;
      best = z;
    }
    if (residual <= cfg.tol_residual) {
      report.termination = Termination::ResidualTol;
      break;
    }
    if (step_len <= cfg.tol_step) {
      report.termination = Termination::StepTol;
      break;
    }
    if (k + 1 == cfg.max_iters) break;

    // ξ = −pull, so the step −η·ξ is η·pull.
    auto next = guarded_exp(pm, z, eta * pull, k, report);
    if (!next) break;
    z = std::move(*next);
    ev = evaluate(sample, z);
  }
  report.minimizer = best;
  finish(report, sample, init);
  return report;
}

SolverReport weiszfeld_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg) {
  cfg.validate();
  const auto& pm = sample.manifold();
  pm.check_point(init);

  SolverReport report;
  report.method = SolverMethod::Weiszfeld;
  report.termination = Termination::MaxIters;

  ProductPoint z = init;
  Evaluation ev = evaluate(sample, z);
  ProductPoint best = z;
  double best_objective = ev.objective;
  const double step_scale = 1.0 - cfg.damping;

  for (int k = 0; k < cfg.max_iters; ++k) {
    const int j = ev.nearest;

    if (ev.nearest_dist <= cfg.coincidence_tol) {
      // Sitting on a datum: either it is the median, or leave along the
      // steepest-descent direction with the modified Weiszfeld step.
      const auto test = datum_optimality(sample, j, cfg.datum_test_tol);
      if (test.optimal) {
        stop_at_datum(report, cfg, sample, j, test);
        finish(report, sample, init);
        return report;
      }
      const ProductPoint& x = sample.point(j);
      record(report, cfg, x, test.objective, test.smooth_norm - test.ball_weight);
      if (test.objective < best_objective) {
        best_objective = test.objective;
        best = x;
      }
      if (k + 1 == cfg.max_iters) break;
      const double shrink = (1.0 - test.ball_weight / test.smooth_norm) / test.inverse_distance_sum;
      report.events.push_back({k, SolverEvent::Kind::DatumRestart,
                               "left datum " + std::to_string(j) + " along the descent direction"});
      auto next = guarded_exp(pm, x, step_scale * shrink * test.smooth, k, report);
      if (!next) break;
      z = std::move(*next);
      ev = evaluate(sample, z);
      continue;
    }

    const ProductTangent pull = smooth_pull(sample, ev);
    const double residual = pm.norm(z, pull);

    ProductTangent delta = pm.zero_tangent();
    double weight_total = 0.0;
    for (int i = 0; i < sample.size(); ++i) weight_total += sample.weight(i) / std::max(ev.dists[i], cfg.weiszfeld_epsilon);
    for (int i = 0; i < sample.size(); ++i) {
      const double w = sample.weight(i) / std::max(ev.dists[i], cfg.weiszfeld_epsilon) / weight_total;
      delta += w * ev.logs[i];
    }
    delta *= step_scale;
    const double step_len = pm.norm(z, delta);

    if (ev.nearest_dist <= 2.0 * step_len) {
      const auto test = datum_optimality(sample, j, cfg.datum_test_tol);
      if (test.optimal) {
        record(report, cfg, z, ev.objective, residual);
        stop_at_datum(report, cfg, sample, j, test);
        finish(report, sample, init);
        return report;
      }
    }

    record(report, cfg, z, ev.objective, residual);
    if (ev.objective < best_objective) {
      best_objective = ev.objective;
      best = z;
    }
    if (residual <= cfg.tol_residual) {
      report.termination = Termination::ResidualTol;
      report.minimizer = z;
      finish(report, sample, init);
      return report;
    }
    if (step_len <= cfg.tol_step) {
      report.termination = Termination::StepTol;
      report.minimizer = z;
      finish(report, sample, init);
      return report;
    }
    if (k + 1 == cfg.max_iters) break;

    auto next = guarded_exp(pm, z, std::move(delta), k, report);
    if (!next) break;
    z = std::move(*next);
    ev = evaluate(sample, z);
  }
  report.minimizer = best;
  finish(report, sample, init);
  return report;
}

SolverReport hybrid_solve(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg) {
  cfg.validate();
  SolverConfig first = cfg;
  first.max_iters = std::max(1, std::min(cfg.hybrid_max_subgradient_iters, cfg.max_iters - 1));
  first.tol_residual = std::max(cfg.hybrid_switch_residual, cfg.tol_residual);
  SolverReport report = subgradient_solve(sample, init, first);
  report.method = SolverMethod::Hybrid;
  if (report.termination == Termination::AtDatum || cfg.max_iters - report.iterations_used < 1) {
    finish(report, sample, init);
    return report;
  }

  SolverConfig second = cfg;
  second.max_iters = cfg.max_iters - report.iterations_used;
  SolverReport tail = weiszfeld_solve(sample, report.minimizer, second);

  const int offset = report.iterations_used;
  report.switch_iteration = offset;
  report.events.push_back({offset, SolverEvent::Kind::PhaseSwitch,
                           std::string("subgradient phase ended with ") + to_string(report.termination)});
  for (auto e : tail.events) {
    e.iteration += offset;
    report.events.push_back(std::move(e));
  }
  report.objective_trace.insert(report.objective_trace.end(), tail.objective_trace.begin(),
                                tail.objective_trace.end());
  report.residual_trace.insert(report.residual_trace.end(), tail.residual_trace.begin(), tail.residual_trace.end());
  report.iterate_trace.insert(report.iterate_trace.end(), tail.iterate_trace.begin(), tail.iterate_trace.end());
  report.iterations_used += tail.iterations_used;
  report.max_subgradient_norm = std::max(report.max_subgradient_norm, tail.max_subgradient_norm);
  report.termination = tail.termination;
  report.datum_index = tail.datum_index;
  report.minimizer = std::move(tail.minimizer);
  finish(report, sample, init);
  return report;
}

SolverReport solve_median(const WeightedSample& sample, const ProductPoint& init, const SolverConfig& cfg) {
  switch (cfg.method) {
    case SolverMethod::Subgradient: return subgradient_solve(sample, init, cfg);
    case SolverMethod::Weiszfeld: return weiszfeld_solve(sample, init, cfg);
    case SolverMethod::Hybrid: return hybrid_solve(sample, init, cfg);
  }
  return hybrid_solve(sample, init, cfg);
}

SolverReport solve_median(const WeightedSample& sample, const SolverConfig& cfg) {
  return solve_median(sample, product_mean(sample), cfg);
}

}  // namespace pmedian
