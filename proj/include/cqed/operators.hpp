#pragma once

// Dense operators on the composite atom (4 levels) x cavity (truncated Fock)
// Hilbert space.
//
// Index ordering is atom-major: index = level * fock_dim + photon_number.

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "cqed/errors.hpp"

namespace cqed {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

struct HilbertLayout {
  static constexpr Index atom_dim = 4;
  Index fock_dim = 4;

  HilbertLayout() = default;
  explicit HilbertLayout(Index fock) : fock_dim(fock) {
    if (fock < 2) {
      throw InvalidArgument("HilbertLayout: fock_dim must be >= 2, got " +
                            std::to_string(fock));
    }
  }

  Index total_dim() const { return atom_dim * fock_dim; }
  Index index(Index level, Index photons) const {
    return level * fock_dim + photons;
  }
  friend bool operator==(const HilbertLayout&, const HilbertLayout&) = default;
};

inline void require_same_layout(const HilbertLayout& a, const HilbertLayout& b,
                                const char* where) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(where) + ": layout mismatch (fock_dim " +
                          std::to_string(a.fock_dim) + " vs " +
                          std::to_string(b.fock_dim) + ")");
  }
}

template <typename Scalar = double>
struct QOperator {
  HilbertLayout layout;
  CMatrix<Scalar> matrix;

  QOperator() = default;
  QOperator(HilbertLayout l, CMatrix<Scalar> m)
      : layout(l), matrix(std::move(m)) {
    if (matrix.rows() != layout.total_dim() ||
        matrix.cols() != layout.total_dim()) {
      throw InvalidArgument("QOperator: matrix is " +
                            std::to_string(matrix.rows()) + "x" +
                            std::to_string(matrix.cols()) + ", layout needs " +
                            std::to_string(layout.total_dim()));
    }
  }

  static QOperator zero(HilbertLayout l) {
    return {l, CMatrix<Scalar>::Zero(l.total_dim(), l.total_dim())};
  }
  static QOperator identity(HilbertLayout l) {
    return {l, CMatrix<Scalar>::Identity(l.total_dim(), l.total_dim())};
  }

  QOperator adjoint() const { return {layout, matrix.adjoint()}; }

  /// Largest elementwise |A - A^dagger|.
  Scalar hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(Scalar tol = Scalar(1e-10)) const {
    return hermiticity_error() <= tol;
  }

  QOperator& operator+=(const QOperator& o) {
    require_same_layout(layout, o.layout, "QOperator +=");
    matrix += o.matrix;
    return *this;
  }
  QOperator& operator-=(const QOperator& o) {
    require_same_layout(layout, o.layout, "QOperator -=");
    matrix -= o.matrix;
    return *this;
  }
  QOperator& operator*=(Complex<Scalar> s) {
    matrix *= s;
    return *this;
  }
};

template <typename Scalar>
QOperator<Scalar> operator+(QOperator<Scalar> a, const QOperator<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
QOperator<Scalar> operator-(QOperator<Scalar> a, const QOperator<Scalar>& b) {
  return a -= b;
}
template <typename Scalar>
QOperator<Scalar> operator*(const QOperator<Scalar>& a,
                            const QOperator<Scalar>& b) {
  require_same_layout(a.layout, b.layout, "QOperator *");
  return {a.layout, a.matrix * b.matrix};
}
template <typename Scalar>
QOperator<Scalar> operator*(Complex<Scalar> s, QOperator<Scalar> a) {
  return a *= s;
}
template <typename Scalar>
QOperator<Scalar> operator*(Scalar s, QOperator<Scalar> a) {
  return a *= Complex<Scalar>(s, 0);
}

template <typename Scalar>
QOperator<Scalar> commutator(const QOperator<Scalar>& a,
                             const QOperator<Scalar>& b) {
  return a * b - b * a;
}

/// Kronecker embedding atom_op (4x4) (x) fock_op (fock_dim x fock_dim).
template <typename Scalar>
QOperator<Scalar> tensor(const CMatrix<Scalar>& atom_op,
                         const CMatrix<Scalar>& fock_op) {
  if (atom_op.rows() != HilbertLayout::atom_dim ||
      atom_op.cols() != HilbertLayout::atom_dim) {
    throw InvalidArgument("tensor: atom operator must be 4x4");
  }
  if (fock_op.rows() != fock_op.cols()) {
    throw InvalidArgument("tensor: fock operator must be square");
  }
  const HilbertLayout layout(fock_op.rows());
  const Index n = layout.fock_dim;
  CMatrix<Scalar> out(layout.total_dim(), layout.total_dim());
  for (Index i = 0; i < HilbertLayout::atom_dim; ++i) {
    for (Index j = 0; j < HilbertLayout::atom_dim; ++j) {
      out.block(i * n, j * n, n, n) = atom_op(i, j) * fock_op;
    }
  }
  return {layout, std::move(out)};
}

/// Truncated single-mode annihilation operator, a[n-1, n] = sqrt(n).
template <typename Scalar = double>
CMatrix<Scalar> fock_annihilation(Index fock_dim) {
  if (fock_dim < 2) {
    throw InvalidArgument("fock_annihilation: fock_dim must be >= 2");
  }
  CMatrix<Scalar> a = CMatrix<Scalar>::Zero(fock_dim, fock_dim);
  for (Index n = 1; n < fock_dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<Scalar>(n));
  }
  return a;
}

/// Atomic |j><i| as a 4x4 matrix; sigma_ij maps level i to level j.
template <typename Scalar = double>
CMatrix<Scalar> atom_transition(Index i, Index j) {
  if (i < 0 || i > 3 || j < 0 || j > 3) {
    throw InvalidArgument("atomic_sigma: level index out of range [0,3]: (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
  }
  CMatrix<Scalar> s = CMatrix<Scalar>::Zero(4, 4);
  s(j, i) = Scalar(1);
  return s;
}

/// I_4 (x) a.
template <typename Scalar = double>
QOperator<Scalar> annihilation(HilbertLayout layout) {
  return tensor<Scalar>(CMatrix<Scalar>::Identity(4, 4),
                        fock_annihilation<Scalar>(layout.fock_dim));
}

template <typename Scalar = double>
QOperator<Scalar> number_operator(HilbertLayout layout) {
  const auto a = annihilation<Scalar>(layout);
  return a.adjoint() * a;
}

/// sigma_ij (x) I_fock, with sigma_ij = |j><i|.
template <typename Scalar = double>
QOperator<Scalar> atomic_sigma(HilbertLayout layout, Index i, Index j) {
  return tensor<Scalar>(atom_transition<Scalar>(i, j),
                        CMatrix<Scalar>::Identity(layout.fock_dim,
                                                  layout.fock_dim));
}

template <typename Scalar = double>
struct DensityMatrix {
  HilbertLayout layout;
  CMatrix<Scalar> matrix;

  DensityMatrix() = default;
  DensityMatrix(HilbertLayout l, CMatrix<Scalar> m)
      : layout(l), matrix(std::move(m)) {
    if (matrix.rows() != layout.total_dim() ||
        matrix.cols() != layout.total_dim()) {
      throw InvalidArgument("DensityMatrix: dimension does not match layout");
    }
  }

  /// |level, photons><level, photons|.
  static DensityMatrix basis_state(HilbertLayout l, Index level,
                                   Index photons = 0) {
    CMatrix<Scalar> m = CMatrix<Scalar>::Zero(l.total_dim(), l.total_dim());
    const Index k = l.index(level, photons);
    m(k, k) = Scalar(1);
    return {l, std::move(m)};
  }

  Complex<Scalar> trace() const { return matrix.trace(); }

  Scalar hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }

  /// Smallest eigenvalue of the Hermitian part.
  Scalar min_eigenvalue() const {
    const CMatrix<Scalar> h = Scalar(0.5) * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Atomic level population summed over photon number.
  Scalar population(Index level) const {
    const Index n = layout.fock_dim;
    return matrix.diagonal().segment(level * n, n).real().sum();
  }
};

/// Tr(rho * op).
template <typename Scalar>
Complex<Scalar> expectation(const QOperator<Scalar>& op,
                            const DensityMatrix<Scalar>& rho) {
  require_same_layout(op.layout, rho.layout, "expectation");
  // Tr(rho op) = sum_ij rho_ij op_ji
  return (rho.matrix.transpose().cwiseProduct(op.matrix)).sum();
}

} // namespace cqed
