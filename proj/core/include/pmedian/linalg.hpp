#pragma once

#include <Eigen/Dense>

namespace pmedian {

/// Smallest eigenvalue admitted by the SPD guard, relative to the largest.
inline constexpr double kSpdTolerance = 1e-12;
/// Relative Frobenius residual the eigen-based routines are held to.
inline constexpr double kEigTolerance = 1e-10;

/// Dense symmetric matrix. Construction symmetrizes the input, so
/// entry (i, j) equals entry (j, i) bit for bit; non-finite entries are
/// rejected with InvalidInput.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}
  friend class SpdMatrix;

  Eigen::MatrixXd m_;
};

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns are orthonormal eigenvectors
};

SymEig sym_eig(const SymMatrix& s);

/// Symmetric positive-definite matrix. The eigendecomposition computed by the
/// SPD guard is kept so that square roots and Lyapunov solves at this matrix
/// need no further factorization.
class SpdMatrix {
 public:
  /// Throws NotSpd when the smallest eigenvalue is at or below
  /// kSpdTolerance times the largest.
  explicit SpdMatrix(const SymMatrix& s);
  explicit SpdMatrix(const Eigen::MatrixXd& m) : SpdMatrix(SymMatrix(m)) {}

  static SpdMatrix identity(int dim);

  int dim() const noexcept { return sym_.dim(); }
  const SymMatrix& sym() const noexcept { return sym_; }
  const Eigen::MatrixXd& matrix() const noexcept { return sym_.matrix(); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eig_.values; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eig_.vectors; }

  /// Q f(Λ) Qᵀ for the spectral function f given per eigenvalue.
  template <class F>
  Eigen::MatrixXd spectral(F&& f) const {
    Eigen::VectorXd mapped = eig_.values.unaryExpr(f);
    return eig_.vectors * mapped.asDiagonal() * eig_.vectors.transpose();
  }

 private:
  SpdMatrix(SymMatrix s, SymEig eig) : sym_(std::move(s)), eig_(std::move(eig)) {}
  friend SpdMatrix sqrt_spd(const SpdMatrix&);
  friend SpdMatrix inv_sqrt_spd(const SpdMatrix&);

  SymMatrix sym_;
  SymEig eig_;
};

SpdMatrix sqrt_spd(const SpdMatrix& s);
SpdMatrix inv_sqrt_spd(const SpdMatrix& s);

/// Square root of a symmetric positive-semidefinite matrix, clamping
/// eigenvalues below zero (roundoff) to zero. Never throws NotSpd.
SymMatrix sqrt_psd(const SymMatrix& s);

/// Solves L·S + S·L = V in the eigenbasis of S.
SymMatrix solve_lyapunov(const SpdMatrix& s, const SymMatrix& v);

/// (A + Aᵀ) / 2 as a SymMatrix.
SymMatrix symmetrize(const Eigen::MatrixXd& a);

}  // namespace pmedian
