// SPDX-License-Identifier: Apache-2.0

// Independent checks on factorizations: the positivity/contraction/product
// certificate, the classical necessary conditions on Re T and Im T, a
// derivative-free 2x2 search oracle, diagonal-block factor extraction for
// block upper triangular products, and seeded random quadratic instances.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "qfact/canonical.hpp"
#include "qfact/linalg.hpp"

namespace qfact {

struct VerificationReport {
  bool a_psd = false;
  bool a_contraction = false;
  bool b_psd = false;
  bool b_contraction = false;
  double product_residual = 0;  // |A B - T|_F
  double tolerance = 0;
  bool pass = false;
};

/// pass <=> both factors are PSD contractions within tol and
/// |A B - T|_F <= tol * max(1, |T|_F).
VerificationReport verify_certificate(const Eigen::Ref<const MatrixXc>& t,
                                      const Eigen::Ref<const MatrixXc>& a,
                                      const Eigen::Ref<const MatrixXc>& b, double tol);

/// Necessary (never sufficient) conditions for T to be a product of two
/// positive contractions: Re T >= -I/8, -I/4 <= Im T <= I/4, |T| <= 1.
struct NecessaryConditions {
  double re_min = 0;  // smallest eigenvalue of (T + T^*) / 2
  double im_min = 0;  // spectrum bounds of (T - T^*) / 2i
  double im_max = 0;
  double norm = 0;
  bool re_lower = false;
  bool im_bounds = false;
  bool contraction = false;

  bool all() const { return re_lower && im_bounds && contraction; }
};

NecessaryConditions necessary_conditions(const Eigen::Ref<const MatrixXc>& t, double tol);

/// Best product residual found by the brute-force search over real symmetric
/// PSD contraction pairs R(theta) diag(s, t) R(theta)^T.
struct OracleResult {
  double best_residual = 0;
  // theta_A, s_A, t_A, theta_B, s_B, t_B
  std::array<double, 6> parameters{};
  std::int64_t evaluations = 0;
};

/// Grid of floor(budget^(1/6)) points per parameter followed by cyclic
/// coordinate descent with step halving down to 1e-12. The seed shifts the
/// angle grid; results are deterministic for fixed (seed, budget).
OracleResult oracle_2x2(double a, double b, double z, std::int64_t budget, std::uint64_t seed);

/// A claimed factorization target = first * second with its certificate.
struct CertifiedPair {
  MatrixXc target;
  MatrixXc first;
  MatrixXc second;
  VerificationReport report;
};

/// For PSD contractions A, B whose product is block upper triangular with
/// respect to the split, builds certified factor pairs for both diagonal
/// blocks of A B.
std::pair<CertifiedPair, CertifiedPair> diagonal_block_factors(const Eigen::Ref<const MatrixXc>& a,
                                                               const Eigen::Ref<const MatrixXc>& b,
                                                               Index split, double tol);

/// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
MatrixXc random_unitary(Index n, std::mt19937_64& rng);

/// U (a I_d1 (+) b I_d2 (+) [[a I_r, diag(p)], [0, b I_r]]) U^* for a random
/// unitary U drawn from the seed.
MatrixXc random_quadratic(Index d1, Index d2, Index r, Complex a, Complex b,
                          std::span<const double> p_spec, std::uint64_t seed);

}  // namespace qfact
