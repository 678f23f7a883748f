// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qfact/linalg.hpp"

namespace qfact {

inline constexpr double kDefaultTol = 1e-9;

/// Scalars with (T - aI)(T - bI) = 0, ordered so that (Re a, Im a) <= (Re b, Im b).
struct QuadraticParams {
  Complex a;
  Complex b;
  double residual = 0;  // |T^2 - (a + b) T + ab I|_F
};

/// Unitary normal form of a quadratic operator:
///
///   unitary^* T unitary = a I_d1 (+) b I_d2 (+) [[a I_r, diag(p)], [0, b I_r]]
///
/// with p strictly positive and descending.
struct CanonicalForm {
  QuadraticParams params;
  Index d1 = 0;
  Index d2 = 0;
  Index r = 0;
  std::vector<double> p_values;
  MatrixXc unitary;
  double residual = 0;  // |unitary^* T unitary - canonical_matrix|_F

  Index dim() const { return d1 + d2 + 2 * r; }
  double p_norm() const { return p_values.empty() ? 0.0 : p_values.front(); }
};

/// Identifies the minimal polynomial of T by least squares on
/// vec(T^2) = s vec(T) - p vec(I). Throws NotQuadratic when the fit leaves a
/// residual above tol * max(1, |T|_F^2).
QuadraticParams detect_quadratic(const Eigen::Ref<const MatrixXc>& t, double tol = kDefaultTol);

/// Splits the space into M = ker(T - aI) and its complement, where T reads
/// [[aI, X], [0, bI]], and takes the SVD of the coupling block X.
CanonicalForm canonicalize(const Eigen::Ref<const MatrixXc>& t, const QuadraticParams& params,
                           double tol = kDefaultTol);

/// The middle factor aI (+) bI (+) [[aI, diag(p)], [0, bI]] in canonical coordinates.
MatrixXc canonical_matrix(const CanonicalForm& form);

MatrixXc assemble_from_canonical(const CanonicalForm& form);

}  // namespace qfact
