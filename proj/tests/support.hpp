// SPDX-License-Identifier: Apache-2.0

// Random instances shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qfact/factor.hpp"
#include "qfact/linalg.hpp"
#include "qfact/verify.hpp"

namespace qfact::testing {

inline MatrixXc random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXc m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

/// Hermitian PSD with prescribed spectrum.
inline MatrixXc psd_with_spectrum(const Eigen::VectorXd& spectrum, std::mt19937_64& rng) {
  const MatrixXc u = random_unitary(spectrum.size(), rng);
  return u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
}

/// PSD contraction with eigenvalues uniform in [0, 1]; a few are forced to
/// the endpoints so that rank-deficient and norm-one factors get exercised.
inline MatrixXc random_positive_contraction(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd spectrum(n);
  for (Index k = 0; k < n; ++k) {
    const double roll = u(rng);
    spectrum(k) = roll < 0.15 ? 0.0 : roll < 0.3 ? 1.0 : u(rng);
  }
  return psd_with_spectrum(spectrum, rng);
}

/// Independent check that h is Hermitian PSD with |h| <= 1, using Eigen's
/// own eigensolver rather than the library's.
inline double positive_contraction_slack(const MatrixXc& h) {
  const double asym = (h - h.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es((h + h.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max({asym, -ev.minCoeff(), ev.maxCoeff() - 1.0, 0.0});
}

}  // namespace qfact::testing
