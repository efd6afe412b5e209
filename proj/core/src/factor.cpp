#include "pmedian/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmedian/error.hpp"

namespace pmedian {

const char* to_string(FactorKind kind) noexcept {
  switch (kind) {
    case FactorKind::Euclidean: return "euclidean";
    case FactorKind::PositiveHalfLine: return "positive";
    case FactorKind::Sphere: return "sphere";
    case FactorKind::SpdBuresWasserstein: return "spd_bw";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Point / tangent accessors

namespace {

[[noreturn]] void wrong_alternative(const char* wanted) {
  throw Error(ErrorKind::ShapeError, std::string("value does not hold a ") + wanted);
}

}  // namespace

double FactorPoint::scalar() const {
  if (const auto* s = std::get_if<double>(&value)) return *s;
  wrong_alternative("scalar");
}

const Eigen::VectorXd& FactorPoint::vector() const {
  if (const auto* v = std::get_if<Eigen::VectorXd>(&value)) return *v;
  wrong_alternative("vector");
}

const SpdMatrix& FactorPoint::spd() const {
  if (const auto* m = std::get_if<SpdMatrix>(&value)) return *m;
  wrong_alternative("SPD matrix");
}

double FactorTangent::scalar() const {
  if (const auto* s = std::get_if<double>(&value)) return *s;
  wrong_alternative("scalar");
}

const Eigen::VectorXd& FactorTangent::vector() const {
  if (const auto* v = std::get_if<Eigen::VectorXd>(&value)) return *v;
  wrong_alternative("vector");
}

const SymMatrix& FactorTangent::sym() const {
  if (const auto* m = std::get_if<SymMatrix>(&value)) return *m;
  wrong_alternative("symmetric matrix");
}

FactorTangent& FactorTangent::operator+=(const FactorTangent& other) {
  if (value.index() != other.value.index()) {
    throw Error(ErrorKind::ShapeError, "adding tangents of different kinds");
  }
  std::visit(
      [&](auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(other.value);
        if constexpr (std::is_same_v<T, Eigen::VectorXd>) {
          if (lhs.size() != rhs.size()) {
            throw Error(ErrorKind::ShapeError, "adding tangents of different lengths");
          }
        }
        lhs += rhs;
      },
      value);
  return *this;
}

FactorTangent& FactorTangent::operator*=(double s) {
  std::visit([&](auto& v) { v *= s; }, value);
  return *this;
}

// ---------------------------------------------------------------------------
// Factor

Factor Factor::euclidean(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "euclidean dimension must be positive");
  return Factor(FactorKind::Euclidean, dim);
}

Factor Factor::positive_half_line() { return Factor(FactorKind::PositiveHalfLine, 1); }

Factor Factor::sphere(int ambient_dim) {
  if (ambient_dim < 2) throw Error(ErrorKind::InvalidInput, "sphere ambient dimension must be >= 2");
  return Factor(FactorKind::Sphere, ambient_dim);
}

Factor Factor::spd_bures_wasserstein(int dim, std::optional<double> curvature_bound) {
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "SPD dimension must be positive");
  if (curvature_bound && !(*curvature_bound >= 0.0 && std::isfinite(*curvature_bound))) {
    throw Error(ErrorKind::InvalidInput, "curvature bound must be finite and nonnegative");
  }
  Factor f(FactorKind::SpdBuresWasserstein, dim);
  f.bw_curvature_ = curvature_bound;
  return f;
}

Factor Factor::with_tolerances(const FactorTolerances& tol) const {
  Factor f = *this;
  f.tol_ = tol;
  return f;
}

std::string Factor::describe() const {
  return std::string(to_string(kind_)) + "(" + std::to_string(dim_) + ")";
}

void Factor::check_point(const FactorPoint& p) const {
  switch (kind_) {
    case FactorKind::Euclidean: {
      const auto& v = p.vector();
      if (v.size() != dim_) throw Error(ErrorKind::ShapeError, "expected " + describe() + " point");
      if (!v.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite coordinates");
      return;
    }
    case FactorKind::PositiveHalfLine: {
      const double s = p.scalar();
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidInput, "half-line point must be finite and > 0");
      }
      return;
    }
    case FactorKind::Sphere: {
      const auto& v = p.vector();
      if (v.size() != dim_) throw Error(ErrorKind::ShapeError, "expected " + describe() + " point");
      if (!v.allFinite() || std::abs(v.norm() - 1.0) > tol_.sphere_unit) {
        throw Error(ErrorKind::InvalidInput, "sphere point is not a unit vector");
      }
      return;
    }
    case FactorKind::SpdBuresWasserstein:
      if (p.spd().dim() != dim_) throw Error(ErrorKind::ShapeError, "expected " + describe() + " point");
      return;
  }
}

void Factor::check_tangent(const FactorPoint& p, const FactorTangent& v) const {
  switch (kind_) {
    case FactorKind::Euclidean:
      if (v.vector().size() != dim_) throw Error(ErrorKind::ShapeError, "tangent length mismatch");
      return;
    case FactorKind::PositiveHalfLine:
      (void)v.scalar();
      return;
    case FactorKind::Sphere: {
      const auto& t = v.vector();
      if (t.size() != dim_) throw Error(ErrorKind::ShapeError, "tangent length mismatch");
      if (std::abs(t.dot(p.vector())) > tol_.sphere_tangent * std::max(1.0, t.norm())) {
        throw Error(ErrorKind::InvalidInput, "sphere tangent is not orthogonal to its base point");
      }
      return;
    }
    case FactorKind::SpdBuresWasserstein:
      if (v.sym().dim() != dim_) throw Error(ErrorKind::ShapeError, "tangent size mismatch");
      return;
  }
}

namespace {

double sphere_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // Half-chord form: accurate at both small and near-antipodal angles and
  // symmetric in (a, b) as computed. Equal to arccos(clamp(⟨a,b⟩)).
  const double dot = a.dot(b);
  if (dot >= 0.0) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
  }
  return std::numbers::pi - 2.0 * std::asin(std::min(1.0, 0.5 * (a + b).norm()));
}

bool lexicographically_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a.data()[k] != b.data()[k]) return a.data()[k] < b.data()[k];
  }
  return false;
}

// Below this fraction of tr(Σ₁)+tr(Σ₂) the trace formula has lost most of
// its digits and the transport form is used instead.
constexpr double kTraceCancellation = 1e-6;

// d² = tr(Σ₁) + tr(Σ₂) − 2 tr((Σ_b^{1/2} Σ_a Σ_b^{1/2})^{1/2}); near the
// diagonal d = ‖Σ_b^{-1/2} M^{1/2} − Σ_b^{1/2}‖_F with M the middle term.
double bw_distance_from(const SpdMatrix& base, const SpdMatrix& other, const SpdMatrix& root, const SymMatrix& middle) {
  const double scale = base.sym().trace() + other.sym().trace();
  const double d2 = scale - 2.0 * middle.trace();
  if (d2 > kTraceCancellation * scale) return std::sqrt(d2);
  return (inv_sqrt_spd(base).matrix() * middle.matrix() - root.matrix()).norm();
}

double bw_distance(const SpdMatrix& s1, const SpdMatrix& s2) {
  const SpdMatrix root = sqrt_spd(s2);
  const SymMatrix middle = sqrt_psd(symmetrize(root.matrix() * s1.matrix() * root.matrix()));
  return bw_distance_from(s2, s1, root, middle);
}

}  // namespace

double Factor::dist(const FactorPoint& a, const FactorPoint& b) const {
  switch (kind_) {
    case FactorKind::Euclidean: {
      const auto& x = a.vector();
      const auto& y = b.vector();
      if (x.size() != dim_ || y.size() != dim_) throw Error(ErrorKind::ShapeError, "point length mismatch");
      return (x - y).norm();
    }
    case FactorKind::PositiveHalfLine:
      return std::abs(a.scalar() - b.scalar());
    case FactorKind::Sphere: {
      const auto& x = a.vector();
      const auto& y = b.vector();
      if (x.size() != dim_ || y.size() != dim_) throw Error(ErrorKind::ShapeError, "point length mismatch");
      return sphere_angle(x, y);
    }
    case FactorKind::SpdBuresWasserstein: {
      const auto& x = a.spd();
      const auto& y = b.spd();
      if (x.dim() != dim_ || y.dim() != dim_) throw Error(ErrorKind::ShapeError, "matrix size mismatch");
      // The trace formula cancels to O(sqrt(eps)) on equal inputs.
      if (x.matrix() == y.matrix()) return 0.0;
      // Fixed argument order keeps dist(a, b) == dist(b, a) bit for bit.
      if (lexicographically_less(y.matrix(), x.matrix())) return bw_distance(y, x);
      return bw_distance(x, y);
    }
  }
  return 0.0;
}

FactorPoint Factor::exp(const FactorPoint& p, const FactorTangent& v, bool* clamped) const {
  if (clamped) *clamped = false;
  switch (kind_) {
    case FactorKind::Euclidean:
      if (v.vector().size() != dim_) throw Error(ErrorKind::ShapeError, "tangent length mismatch");
      return Eigen::VectorXd(p.vector() + v.vector());
    case FactorKind::PositiveHalfLine: {
      double s = p.scalar() + v.scalar();
      if (!(s >= tol_.half_line_floor)) {
        s = tol_.half_line_floor;
        if (clamped) *clamped = true;
      }
      return s;
    }
    case FactorKind::Sphere: {
      const auto& base = p.vector();
      const auto& t = v.vector();
      if (t.size() != dim_) throw Error(ErrorKind::ShapeError, "tangent length mismatch");
      const double len = t.norm();
      if (len < tol_.sphere_zero_tangent) return base;
      Eigen::VectorXd out = std::cos(len) * base + (std::sin(len) / len) * t;
      out.normalize();
      return out;
    }
    case FactorKind::SpdBuresWasserstein: {
      const auto& sigma = p.spd();
      const auto& tangent = v.sym();
      const SymMatrix l = solve_lyapunov(sigma, tangent);
      const Eigen::MatrixXd moved =
          sigma.matrix() + tangent.matrix() + l.matrix() * sigma.matrix() * l.matrix();
      try {
        return SpdMatrix(symmetrize(moved));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotSpd && e.kind() != ErrorKind::InvalidInput) throw;
        throw Error(ErrorKind::LeftManifold, "exponential step left the SPD cone");
      }
    }
  }
  return p;
}

Factor::LogDist Factor::log_dist(const FactorPoint& p, const FactorPoint& x) const {
  switch (kind_) {
    case FactorKind::Euclidean: {
      if (x.vector().size() != dim_ || p.vector().size() != dim_) {
        throw Error(ErrorKind::ShapeError, "point length mismatch");
      }
      Eigen::VectorXd d = x.vector() - p.vector();
      const double n = d.norm();
      return {FactorTangent(std::move(d)), n};
    }
    case FactorKind::PositiveHalfLine: {
      const double d = x.scalar() - p.scalar();
      return {FactorTangent(d), std::abs(d)};
    }
    case FactorKind::Sphere: {
      const auto& base = p.vector();
      const auto& target = x.vector();
      if (base.dot(target) <= -1.0 + tol_.antipodal) {
        throw Error(ErrorKind::AntipodalPoint, "log is undefined at the antipode");
      }
      const double theta = sphere_angle(base, target);
      Eigen::VectorXd u = target - base.dot(target) * base;
      const double un = u.norm();
      if (theta == 0.0 || un == 0.0) return {zero_tangent(), 0.0};
      u *= theta / un;
      return {FactorTangent(std::move(u)), theta};
    }
    case FactorKind::SpdBuresWasserstein: {
      const auto& s1 = p.spd();
      const auto& s2 = x.spd();
      if (s1.dim() != dim_ || s2.dim() != dim_) throw Error(ErrorKind::ShapeError, "matrix size mismatch");
      if (s1.matrix() == s2.matrix()) return {zero_tangent(), 0.0};
      const SpdMatrix root = sqrt_spd(s1);
      const SpdMatrix inv_root = inv_sqrt_spd(s1);
      const SymMatrix middle = sqrt_psd(symmetrize(root.matrix() * s2.matrix() * root.matrix()));
      const Eigen::MatrixXd transport = inv_root.matrix() * middle.matrix() * inv_root.matrix();
      const Eigen::MatrixXd ts = transport * s1.matrix();
      SymMatrix log = symmetrize(ts + ts.transpose() - 2.0 * s1.matrix());
      return {FactorTangent(std::move(log)), bw_distance_from(s1, s2, root, middle)};
    }
  }
  return {zero_tangent(), 0.0};
}

FactorTangent Factor::log(const FactorPoint& p, const FactorPoint& x) const {
  return log_dist(p, x).log;
}

double Factor::inner(const FactorPoint& p, const FactorTangent& u, const FactorTangent& v) const {
  switch (kind_) {
    case FactorKind::Euclidean:
    case FactorKind::Sphere: {
      const auto& a = u.vector();
      const auto& b = v.vector();
      if (a.size() != dim_ || b.size() != dim_) throw Error(ErrorKind::ShapeError, "tangent length mismatch");
      return a.dot(b);
    }
    case FactorKind::PositiveHalfLine:
      return u.scalar() * v.scalar();
    case FactorKind::SpdBuresWasserstein: {
      const SymMatrix l = solve_lyapunov(p.spd(), u.sym());
      if (v.sym().dim() != dim_) throw Error(ErrorKind::ShapeError, "tangent size mismatch");
      return 0.5 * l.matrix().cwiseProduct(v.sym().matrix()).sum();
    }
  }
  return 0.0;
}

double Factor::norm(const FactorPoint& p, const FactorTangent& v) const {
  return std::sqrt(std::max(0.0, inner(p, v, v)));
}

FactorTangent Factor::zero_tangent() const {
  switch (kind_) {
    case FactorKind::Euclidean:
    case FactorKind::Sphere:
      return Eigen::VectorXd(Eigen::VectorXd::Zero(dim_));
    case FactorKind::PositiveHalfLine:
      return 0.0;
    case FactorKind::SpdBuresWasserstein:
      return SymMatrix::zero(dim_);
  }
  return 0.0;
}

std::optional<double> Factor::curvature_upper() const noexcept {
  switch (kind_) {
    case FactorKind::Euclidean:
    case FactorKind::PositiveHalfLine:
      return 0.0;
    case FactorKind::Sphere:
      return 1.0;
    case FactorKind::SpdBuresWasserstein:
      return bw_curvature_;
  }
  return std::nullopt;
}

std::optional<double> Factor::injectivity_radius(const FactorPoint& /*p*/) const {
  if (kind_ == FactorKind::Sphere) return std::numbers::pi;
  return std::nullopt;
}

}  // namespace pmedian
