// SPDX-License-Identifier: Apache-2.0

// Factorization of quadratic operators into two positive contractions.
//
// A quadratic T with canonical form aI (+) bI (+) [[aI, P], [0, bI]] is such a
// product iff a, b lie in [0, 1] and |P| <= |sqrt(a) - sqrt(b)| sqrt((1-a)(1-b)).
// The factors are built from closed-form 2x2 factors of [[a, z], [0, b]],
// lifted to P eigenvalue by eigenvalue, then rotated back by the canonical
// unitary.

#pragma once

#include <array>
#include <optional>
#include <utility>

#include "qfact/canonical.hpp"
#include "qfact/errors.hpp"
#include "qfact/linalg.hpp"
#include "qfact/verify.hpp"

namespace qfact {

struct FeasibilityReport {
  Complex a;
  Complex b;
  bool spectrum_admissible = false;  // a, b real and in [0, 1] within tol
  double p_norm = 0;
  std::optional<double> bound;       // absent when the spectrum is inadmissible
  std::optional<double> margin;      // bound - p_norm
  bool feasible = false;
};

class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, FeasibilityReport report)
      : Error(what), report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

/// |sqrt(a) - sqrt(b)| * sqrt((1 - a)(1 - b)) for a, b in [0, 1].
double feasibility_bound(double a, double b);

FeasibilityReport assess_feasibility(Complex a, Complex b, double p_norm, double tol);

/// Real symmetric 2x2 factors A, B with A B = [[a, z], [0, b]]. Entries are
/// stored as (x11, x12, x22).
struct Factor2x2 {
  enum class Branch {
    kDiagonal,  // z = 0 forced: diag(a, 1) diag(1, b)
    kRankOne,   // min(a, b) = 0
    kCoupled,   // 0 < a != b < 1
  };
  struct Spectral {
    double lambda1;  // A has eigenvalues {1, lambda1}
    double lambda2;  // B has eigenvalues {1, lambda2}
    double gamma;
  };

  Branch branch = Branch::kDiagonal;
  bool reflected = false;  // a > b, built from the (b, a) instance
  std::array<double, 3> a_entries{};
  std::array<double, 3> b_entries{};
  std::optional<Spectral> spectral;  // set for kCoupled; refers to the unreflected instance

  Eigen::Matrix2d a_matrix() const;
  Eigen::Matrix2d b_matrix() const;
};

Factor2x2 factor_2x2(double a, double b, double z, double tol = kDefaultTol);

struct Factorization {
  MatrixXc a;
  MatrixXc b;
  VerificationReport report;
};

/// Factors [[aI, P], [0, bI]] for PSD P by applying the 2x2 maps to the
/// eigenvalues of P.
Factorization factor_block(double a, double b, const Eigen::Ref<const MatrixXc>& p,
                           double tol = kDefaultTol);

/// (U (aI (+) bI (+) block_a) U^*, U (I (+) I (+) block_b) U^*)
std::pair<MatrixXc, MatrixXc> assemble_full_factors(const CanonicalForm& form,
                                                    const Eigen::Ref<const MatrixXc>& block_a,
                                                    const Eigen::Ref<const MatrixXc>& block_b);

/// Quadratic detection, canonical form, feasibility test and certified factors.
Factorization factor_quadratic(const Eigen::Ref<const MatrixXc>& t, double tol = kDefaultTol);

}  // namespace qfact
