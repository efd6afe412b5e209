#pragma once

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "pmedian/linalg.hpp"

namespace pmedian {

enum class FactorKind { Euclidean, PositiveHalfLine, Sphere, SpdBuresWasserstein };

const char* to_string(FactorKind kind) noexcept;

/// Point on one factor. Euclidean and sphere points are vectors, half-line
/// points are scalars (σ > 0), Bures–Wasserstein points are SPD matrices.
struct FactorPoint {
  std::variant<double, Eigen::VectorXd, SpdMatrix> value;

  FactorPoint(double s) : value(s) {}  // NOLINT(google-explicit-constructor)
  FactorPoint(Eigen::VectorXd v) : value(std::move(v)) {}  // NOLINT
  FactorPoint(SpdMatrix m) : value(std::move(m)) {}  // NOLINT

  double scalar() const;
  const Eigen::VectorXd& vector() const;
  const SpdMatrix& spd() const;
};

/// Tangent vector on one factor; the base point is always passed alongside.
struct FactorTangent {
  std::variant<double, Eigen::VectorXd, SymMatrix> value;

  FactorTangent(double s) : value(s) {}  // NOLINT
  FactorTangent(Eigen::VectorXd v) : value(std::move(v)) {}  // NOLINT
  FactorTangent(SymMatrix m) : value(std::move(m)) {}  // NOLINT

  double scalar() const;
  const Eigen::VectorXd& vector() const;
  const SymMatrix& sym() const;

  FactorTangent& operator+=(const FactorTangent& other);
  FactorTangent& operator*=(double s);
  friend FactorTangent operator*(double s, FactorTangent t) { return t *= s; }
  friend FactorTangent operator+(FactorTangent a, const FactorTangent& b) { return a += b; }
};

struct FactorTolerances {
  double sphere_unit = 1e-10;        // | ‖p‖ − 1 | allowed on sphere points
  double sphere_tangent = 1e-10;     // |⟨v, p⟩| allowed on sphere tangents
  double antipodal = 1e-10;          // log fails when ⟨p, x⟩ ≤ −1 + antipodal
  double sphere_zero_tangent = 1e-14;
  double half_line_floor = 1e-9;     // exp results are clamped to σ ≥ floor
};

/// One factor of a product manifold together with its Riemannian structure.
///
/// `dim` is the coordinate dimension: the vector length for Euclidean and
/// sphere factors (so Sphere(3) is the 2-sphere in R³), the matrix size for
/// Bures–Wasserstein, and 1 for the half-line.
class Factor {
 public:
  static Factor euclidean(int dim);
  static Factor positive_half_line();
  static Factor sphere(int ambient_dim);
  /// The sectional curvature bound of the Bures–Wasserstein factor is not a
  /// closed-form quantity; it is supplied by the caller or left unavailable.
  static Factor spd_bures_wasserstein(int dim,
                                      std::optional<double> curvature_bound = std::nullopt);

  FactorKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const FactorTolerances& tolerances() const noexcept { return tol_; }
  Factor with_tolerances(const FactorTolerances& tol) const;
  std::string describe() const;

  /// Throws ShapeError / InvalidInput / NotSpd when `p` is not a point here.
  void check_point(const FactorPoint& p) const;
  void check_tangent(const FactorPoint& p, const FactorTangent& v) const;

  double dist(const FactorPoint& a, const FactorPoint& b) const;
  FactorPoint exp(const FactorPoint& p, const FactorTangent& v, bool* clamped = nullptr) const;
  FactorTangent log(const FactorPoint& p, const FactorPoint& x) const;
  double inner(const FactorPoint& p, const FactorTangent& u, const FactorTangent& v) const;
  double norm(const FactorPoint& p, const FactorTangent& v) const;

  struct LogDist {
    FactorTangent log;
    double dist;
  };
  /// log(p, x) and dist(p, x) sharing one factorization.
  LogDist log_dist(const FactorPoint& p, const FactorPoint& x) const;

  FactorTangent zero_tangent() const;

  /// nullopt: no bound available (Bures–Wasserstein by default).
  std::optional<double> curvature_upper() const noexcept;
  /// nullopt: unbounded.
  std::optional<double> injectivity_radius(const FactorPoint& p) const;

  friend bool operator==(const Factor& a, const Factor& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_;
  }

 private:
  Factor(FactorKind kind, int dim) : kind_(kind), dim_(dim) {}

  FactorKind kind_;
  int dim_;
  std::optional<double> bw_curvature_;
  FactorTolerances tol_;
};

}  // namespace pmedian
