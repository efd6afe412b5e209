#include "pmedian/linalg.hpp"

#include <cmath>
#include <string>

#include "pmedian/error.hpp"

namespace pmedian {

namespace {

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    out(j, j) = a(j, j);
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::ShapeError, "symmetric matrix must be square and nonempty, got " +
                                           std::to_string(m.rows()) + "x" +
                                           std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  m_ = symmetric_part(m);
}

SymMatrix SymMatrix::identity(int dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim), Trusted{});
}

SymMatrix SymMatrix::zero(int dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim), Trusted{});
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.dim() != dim()) throw Error(ErrorKind::ShapeError, "dimension mismatch in sum");
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (other.dim() != dim()) throw Error(ErrorKind::ShapeError, "dimension mismatch in difference");
  m_ -= other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

SymMatrix symmetrize(const Eigen::MatrixXd& a) { return SymMatrix(a); }

SymEig sym_eig(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidInput, "symmetric eigensolver failed");
  }
  return SymEig{solver.eigenvalues(), solver.eigenvectors()};
}

SpdMatrix::SpdMatrix(const SymMatrix& s) : sym_(s), eig_(sym_eig(s)) {
  const double lo = eig_.values(0);
  const double hi = eig_.values(eig_.values.size() - 1);
  if (!(hi > 0.0) || !(lo > kSpdTolerance * hi)) {
    throw Error(ErrorKind::NotSpd, "eigenvalue range [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "] fails the SPD guard");
  }
}

SpdMatrix SpdMatrix::identity(int dim) { return SpdMatrix(SymMatrix::identity(dim)); }

SpdMatrix sqrt_spd(const SpdMatrix& s) {
  SymEig eig{s.eig_.values.cwiseSqrt(), s.eig_.vectors};
  SymMatrix root(eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose());
  return SpdMatrix(std::move(root), std::move(eig));
}

SpdMatrix inv_sqrt_spd(const SpdMatrix& s) {
  // Ascending order is reversed by the reciprocal; reorder to keep the
  // eigenvalue invariant.
  const Eigen::Index n = s.eig_.values.size();
  SymEig eig{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    eig.values(k) = 1.0 / std::sqrt(s.eig_.values(n - 1 - k));
    eig.vectors.col(k) = s.eig_.vectors.col(n - 1 - k);
  }
  SymMatrix root(eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose());
  return SpdMatrix(std::move(root), std::move(eig));
}

SymMatrix sqrt_psd(const SymMatrix& s) {
  const SymEig eig = sym_eig(s);
  const Eigen::VectorXd roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(eig.vectors * roots.asDiagonal() * eig.vectors.transpose());
}

SymMatrix solve_lyapunov(const SpdMatrix& s, const SymMatrix& v) {
  if (s.dim() != v.dim()) {
    throw Error(ErrorKind::ShapeError, "Lyapunov operands have dimensions " +
                                           std::to_string(s.dim()) + " and " +
                                           std::to_string(v.dim()));
  }
  const Eigen::MatrixXd& q = s.eigenvectors();
  const Eigen::VectorXd& lambda = s.eigenvalues();
  Eigen::MatrixXd rotated = q.transpose() * v.matrix() * q;
  for (Eigen::Index j = 0; j < rotated.cols(); ++j) {
    for (Eigen::Index i = 0; i < rotated.rows(); ++i) {
      rotated(i, j) /= lambda(i) + lambda(j);
    }
  }
  return SymMatrix(q * rotated * q.transpose());
}

}  // namespace pmedian
