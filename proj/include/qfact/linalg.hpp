// SPDX-License-Identifier: Apache-2.0

// Dense complex kernels shared by every other part of the library: a cyclic
// Jacobi Hermitian eigensolver, a one-sided Jacobi SVD, norms, positivity and
// contraction tests, PSD functional calculus and the block positivity witness.
//
// Everything is templated on the Eigen expression type so callers can pass
// blocks, products or adjoints without materializing them first.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qfact/errors.hpp"

namespace qfact {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using MatrixXc = ComplexMatrix<double>;
using Complex = std::complex<double>;
using Eigen::Index;

/// Relative rank cutoff: singular values at or below max(rows, cols) * kRankCutoff * sigma_max
/// count as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Off-diagonal Frobenius mass (relative to the input norm) at which Jacobi stops.
inline constexpr double kJacobiOffDiagonal = 1e-14;
inline constexpr int kJacobiMaxSweeps = 100;

template <typename Scalar>
struct HermitianEig {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  RealVector<Real> eigenvalues;  // ascending
  Matrix vectors;                // orthonormal columns

  Matrix reconstruct() const {
    return vectors * eigenvalues.template cast<Scalar>().asDiagonal() * vectors.adjoint();
  }
};

/// Full SVD: left is rows x rows, right is cols x cols, singular_values has
/// min(rows, cols) entries in descending order.
template <typename Scalar>
struct Svd {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix left;
  RealVector<Real> singular_values;
  Matrix right;
  Index rank = 0;   // singular values strictly above `cutoff`
  Real cutoff = 0;

  Real max_singular_value() const {
    return singular_values.size() ? singular_values(0) : Real(0);
  }

  Matrix reconstruct() const {
    const Index k = singular_values.size();
    return left.leftCols(k) * singular_values.template cast<Scalar>().asDiagonal() *
           right.leftCols(k).adjoint();
  }
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what = "matrix") {
  if (!m.allFinite()) {
    throw NonFiniteInput(std::string(what) + " has non-finite entries");
  }
}

/// Builds a matrix from row-major entries, rejecting bad shapes and NaN/Inf.
inline MatrixXc make_matrix(Index rows, Index cols, std::span<const Complex> entries) {
  if (rows <= 0 || cols <= 0) {
    throw DimensionMismatch("matrix dimensions must be positive");
  }
  if (static_cast<Index>(entries.size()) != rows * cols) {
    throw DimensionMismatch("expected " + std::to_string(rows * cols) + " entries, got " +
                            std::to_string(entries.size()));
  }
  MatrixXc m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = entries[i * cols + j];
  }
  require_finite(m);
  return m;
}

template <typename DerivedA, typename DerivedB>
auto matmul(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Plain = typename DerivedA::PlainObject;
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  }
  Plain out = a * b;
  return out;
}

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Plain = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Plain out = (m + m.adjoint()) * Scalar(0.5);
  return out;
}

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
}

// Unitary plane rotation J acting on coordinates (p, q):
//   J = [[c, s], [-s * conj(e), c * conj(e)]]
// where e is the phase of the entry being annihilated. J^* G J has a zero
// (p, q) entry for the Hermitian 2x2 G = [[g_pp, g_pq], [conj(g_pq), g_qq]].
template <typename Scalar>
struct Rotation {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  Real c;
  Real s;
  Scalar phase;

  static Rotation annihilating(Real g_pp, Real g_qq, Scalar g_pq) {
    const Real magnitude = std::abs(g_pq);
    const Real tau = (g_qq - g_pp) / (Real(2) * magnitude);
    const Real t = (tau >= 0 ? Real(1) : Real(-1)) / (std::abs(tau) + std::sqrt(Real(1) + tau * tau));
    const Real c = Real(1) / std::sqrt(Real(1) + t * t);
    return Rotation{c, t * c, g_pq / magnitude};
  }

  template <typename M>
  void apply_right(M& m, Index p, Index q) const {
    const Scalar ce = Eigen::numext::conj(phase);
    for (Index k = 0; k < m.rows(); ++k) {
      const Scalar xp = m(k, p);
      const Scalar xq = m(k, q);
      m(k, p) = c * xp - s * ce * xq;
      m(k, q) = s * xp + c * ce * xq;
    }
  }

  template <typename M>
  void apply_left_adjoint(M& m, Index p, Index q) const {
    for (Index k = 0; k < m.cols(); ++k) {
      const Scalar xp = m(p, k);
      const Scalar xq = m(q, k);
      m(p, k) = c * xp - s * phase * xq;
      m(q, k) = s * xp + c * phase * xq;
    }
  }
};

template <typename Real>
std::vector<Index> stable_order(const RealVector<Real>& values, bool descending) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return descending ? values(i) > values(j) : values(i) < values(j);
  });
  return order;
}

// Extends the orthonormal columns q.leftCols(filled) to a full basis by
// greedily projecting standard basis vectors.
template <typename Matrix>
void complete_orthonormal_basis(Matrix& q, Index filled) {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = q.rows();
  while (filled < q.cols()) {
    Vector best;
    typename Eigen::NumTraits<Scalar>::Real best_norm = -1;
    for (Index i = 0; i < n; ++i) {
      Vector v = Vector::Unit(n, i);
      for (int pass = 0; pass < 2; ++pass) {
        v -= q.leftCols(filled) * (q.leftCols(filled).adjoint() * v);
      }
      const auto nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = v;
      }
    }
    q.col(filled) = best / best_norm;
    ++filled;
  }
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix. Eigenvalues come
/// back ascending; ties keep the order in which Jacobi left them, so the
/// result is reproducible for identical input.
template <typename Derived>
HermitianEig<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& h,
                   typename Eigen::NumTraits<typename Derived::Scalar>::Real tol) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  detail::require_square(h, "hermitian_eig");
  require_finite(h);
  const Index n = h.rows();
  Matrix a = h;
  const Real norm = a.norm();
  if ((a - a.adjoint()).norm() > tol * norm) {
    throw NotHermitian("hermitian_eig: input is not Hermitian within tolerance");
  }
  a = hermitian_part(a);
  Matrix v = Matrix::Identity(n, n);

  auto off_diagonal = [&] {
    Real sum = 0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (i != j) sum += std::norm(a(i, j));
      }
    }
    return std::sqrt(sum);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal() <= Real(kJacobiOffDiagonal) * norm) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const auto rot = detail::Rotation<Scalar>::annihilating(
            Eigen::numext::real(a(p, p)), Eigen::numext::real(a(q, q)), apq);
        rot.apply_right(a, p, q);
        rot.apply_left_adjoint(a, p, q);
        rot.apply_right(v, p, q);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(Eigen::numext::real(a(p, p)));
        a(q, q) = Scalar(Eigen::numext::real(a(q, q)));
      }
    }
  }
  if (!converged) {
    throw NoConvergence("hermitian_eig: Jacobi did not converge in " +
                        std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  RealVector<Real> diag = a.diagonal().real();
  const auto order = detail::stable_order(diag, /*descending=*/false);
  HermitianEig<Scalar> out;
  out.eigenvalues.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = diag(order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi: columns are
/// orthogonalized with the same plane rotations the eigensolver uses, which
/// keeps tiny singular values accurate to O(eps * sigma_max).
template <typename Derived>
Svd<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  require_finite(x);
  const Index m = x.rows();
  const Index n = x.cols();
  if (m < n) {
    Matrix adj = x.adjoint();
    auto t = svd(adj);
    std::swap(t.left, t.right);
    return t;
  }

  Matrix w = x;
  Matrix v = Matrix::Identity(n, n);
  const Real threshold = Real(std::max<Index>(m, 1)) * std::numeric_limits<Real>::epsilon();

  bool converged = false;
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Real alpha = w.col(p).squaredNorm();
        const Real beta = w.col(q).squaredNorm();
        const Scalar gamma = w.col(p).dot(w.col(q));
        if (gamma == Scalar(0) || std::abs(gamma) <= threshold * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const auto rot = detail::Rotation<Scalar>::annihilating(alpha, beta, gamma);
        rot.apply_right(w, p, q);
        rot.apply_right(v, p, q);
      }
    }
    if (!rotated) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoConvergence("svd: one-sided Jacobi did not converge");
  }

  RealVector<Real> norms(n);
  for (Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  const auto order = detail::stable_order(norms, /*descending=*/true);

  Svd<Scalar> out;
  out.singular_values.resize(n);
  out.right.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.singular_values(k) = norms(order[k]);
    out.right.col(k) = v.col(order[k]);
  }
  const Real sigma_max = n ? out.singular_values(0) : Real(0);
  out.cutoff = Real(std::max(m, n)) * Real(kRankCutoff) * sigma_max;
  out.rank = 0;
  while (out.rank < n && out.singular_values(out.rank) > out.cutoff) ++out.rank;

  out.left = Matrix::Zero(m, m);
  for (Index k = 0; k < out.rank; ++k) {
    out.left.col(k) = w.col(order[k]) / out.singular_values(k);
  }
  detail::complete_orthonormal_basis(out.left, out.rank);
  return out;
}

/// Largest singular value.
template <typename Derived>
auto operator_norm(const Eigen::MatrixBase<Derived>& x) {
  return svd(x).max_singular_value();
}

/// True when h is Hermitian within tol * max(1, |h|_F) and the smallest
/// eigenvalue of its Hermitian part is at least -tol.
template <typename Derived>
bool psd_check(const Eigen::MatrixBase<Derived>& h,
               typename Eigen::NumTraits<typename Derived::Scalar>::Real tol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  detail::require_square(h, "psd_check");
  if ((h - h.adjoint()).norm() > tol * std::max(Real(1), h.norm())) return false;
  if (h.rows() == 0) return true;
  const auto eig = hermitian_eig(hermitian_part(h), Real(1));
  return eig.eigenvalues(0) >= -tol;
}

template <typename Derived>
bool contraction_check(const Eigen::MatrixBase<Derived>& a,
                       typename Eigen::NumTraits<typename Derived::Scalar>::Real tol) {
  return operator_norm(a) <= 1 + tol;
}

/// W diag(f(lambda)) W^* for a Hermitian eigendecomposition.
template <typename Scalar, typename F>
auto apply_function(const HermitianEig<Scalar>& eig, F&& f) {
  using Matrix = typename HermitianEig<Scalar>::Matrix;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mapped(eig.eigenvalues.size());
  for (Index k = 0; k < mapped.size(); ++k) mapped(k) = Scalar(f(eig.eigenvalues(k)));
  Matrix out = eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
  return out;
}

/// Square root of a PSD matrix; eigenvalues below zero (round-off) clamp to 0.
template <typename Derived>
auto psd_sqrt(const Eigen::MatrixBase<Derived>& h,
              typename Eigen::NumTraits<typename Derived::Scalar>::Real tol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return apply_function(hermitian_eig(h, tol),
                        [](Real x) { return std::sqrt(std::max(x, Real(0))); });
}

/// Moore-Penrose pseudo-inverse; singular values <= max(rows, cols) * rel_cutoff * sigma_max
/// are dropped.
template <typename Derived>
auto pseudo_inverse(const Eigen::MatrixBase<Derived>& x,
                    typename Eigen::NumTraits<typename Derived::Scalar>::Real rel_cutoff = kRankCutoff) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto s = svd(x);
  const Real cutoff = Real(std::max(x.rows(), x.cols())) * rel_cutoff * s.max_singular_value();
  Matrix out = Matrix::Zero(x.cols(), x.rows());
  for (Index k = 0; k < s.singular_values.size(); ++k) {
    if (s.singular_values(k) <= cutoff) break;
    out += s.right.col(k) * (s.left.col(k).adjoint() / s.singular_values(k));
  }
  return out;
}

/// Pseudo-inverse of the square root of a PSD matrix. The rank decision is
/// made on the eigenvalues of h itself, so round-off eigenvalues of order
/// eps * |h| are not promoted to sqrt(eps) by the square root.
template <typename Derived>
auto psd_sqrt_pinv(const Eigen::MatrixBase<Derived>& h,
                   typename Eigen::NumTraits<typename Derived::Scalar>::Real tol,
                   typename Eigen::NumTraits<typename Derived::Scalar>::Real rel_cutoff = kRankCutoff) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const auto eig = hermitian_eig(h, tol);
  const Index n = eig.eigenvalues.size();
  const Real top = n ? std::max(eig.eigenvalues(n - 1), Real(0)) : Real(0);
  const Real cutoff = Real(n) * rel_cutoff * top;
  return apply_function(eig, [cutoff](Real x) { return x > cutoff ? Real(1) / std::sqrt(x) : Real(0); });
}

/// Contraction D with a12 = a11^{1/2} D a22^{1/2}. Such a D exists exactly
/// when [[a11, a12], [a12^*, a22]] is PSD, so a returned witness certifies
/// positivity of the assembled block matrix.
template <typename D11, typename D12, typename D22>
auto block_positivity_witness(const Eigen::MatrixBase<D11>& a11, const Eigen::MatrixBase<D12>& a12,
                              const Eigen::MatrixBase<D22>& a22,
                              typename Eigen::NumTraits<typename D11::Scalar>::Real tol) {
  using Scalar = typename D11::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  detail::require_square(a11, "block_positivity_witness");
  detail::require_square(a22, "block_positivity_witness");
  if (a12.rows() != a11.rows() || a12.cols() != a22.rows()) {
    throw DimensionMismatch("block_positivity_witness: off-diagonal block has wrong shape");
  }
  if (!psd_check(a11, tol)) throw NotPsd("block_positivity_witness: leading block is not PSD");
  if (!psd_check(a22, tol)) throw NotPsd("block_positivity_witness: trailing block is not PSD");

  const Matrix h11 = hermitian_part(a11);
  const Matrix h22 = hermitian_part(a22);
  const Matrix root11 = psd_sqrt(h11, Real(1));
  const Matrix root22 = psd_sqrt(h22, Real(1));
  Matrix witness = psd_sqrt_pinv(h11, Real(1)) * a12 * psd_sqrt_pinv(h22, Real(1));

  const Real scale = std::max(
      Real(1), std::sqrt(h11.squaredNorm() + Real(2) * a12.squaredNorm() + h22.squaredNorm()));
  const Real residual = (a12 - root11 * witness * root22).norm();
  if (residual > tol * scale) {
    throw NoWitness("block_positivity_witness: off-diagonal block leaves the range of the "
                    "diagonal square roots (residual " + std::to_string(residual) + ")");
  }
  if (witness.size() > 0 && operator_norm(witness) > 1 + tol) {
    throw NoWitness("block_positivity_witness: witness is not a contraction");
  }
  return witness;
}

}  // namespace qfact
