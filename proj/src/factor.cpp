// SPDX-License-Identifier: Apache-2.0

#include "qfact/factor.hpp"

#include <cmath>
#include <sstream>

namespace qfact {

namespace {

// Audit threshold for round-off below zero inside square roots.
constexpr double kRootClamp = 1e-12;

void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << x << " is outside [0, 1]";
    throw DomainError(msg.str());
  }
}

double clamp_nonnegative(double x, const char* what) {
  if (x < -kRootClamp) {
    std::ostringstream msg;
    msg << "factor_2x2: " << what << " = " << x << " is negative beyond round-off";
    throw Error(msg.str());
  }
  return std::max(x, 0.0);
}

Factor2x2 coupled(double a, double b, double z) {
  // 0 < a < b < 1, 0 <= z <= bound. Every difference that vanishes at z = 0
  // or at the bound is formed without subtraction:
  //   s^2 - 4ab  = gap (s + 2 sqrt(ab)),  gap = (bound^2 - z^2) / scale
  //   b - l1     = 2 w b / (b - a + w + root)
  //   l1 - a     = (2 sqrt(a)(sqrt(b) - sqrt(a)) + gap + root) / 2
  //   a3 - l1    = (1 - a)(b - l1) / d,  1 - a3 = (1 - b)(1 - gamma) / d
  // with d = (1 - a) - gamma (1 - b) = ((l1 - a) + a (b - l1)) / l1.
  const double scale = (1 - a) * (1 - b);
  const double w = z * z / scale;
  const double bound = (std::sqrt(b) - std::sqrt(a)) * std::sqrt(scale);
  const double gap = clamp_nonnegative((bound - z) * (bound + z) / scale, "discriminant");
  const double root = std::sqrt(gap * (a + b - w + 2 * std::sqrt(a * b)));
  const double b_minus_l1 = 2 * w * b / (b - a + w + root);
  const double l1_minus_a = (2 * std::sqrt(a) * (std::sqrt(b) - std::sqrt(a)) + gap + root) / 2;

  const double lambda1 = a + l1_minus_a;
  const double lambda2 = a * b / lambda1;
  const double gamma = a / lambda1;
  const double d = (l1_minus_a + a * b_minus_l1) / lambda1;

  const double a3 = (b - a) / d;
  const double one_minus_a3 = (1 - b) * (l1_minus_a / lambda1) / d;
  const double a3_minus_l1 = (1 - a) * b_minus_l1 / d;
  const double a1 = one_minus_a3 + lambda1;
  const double a2 = std::sqrt(one_minus_a3 * a3_minus_l1);

  Factor2x2 f;
  f.branch = Factor2x2::Branch::kCoupled;
  f.a_entries = {a1, a2, a3};
  // gamma * a4 with a4 = (lambda2 / gamma^2 + a2^2) / a3, using lambda2 / gamma = b.
  f.b_entries = {gamma * a3, -gamma * a2, (b + gamma * a2 * a2) / a3};
  f.spectral = Factor2x2::Spectral{lambda1, lambda2, gamma};
  return f;
}

}  // namespace

double feasibility_bound(double a, double b) {
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  return std::abs(std::sqrt(a) - std::sqrt(b)) * std::sqrt((1 - a) * (1 - b));
}

FeasibilityReport assess_feasibility(Complex a, Complex b, double p_norm, double tol) {
  FeasibilityReport report;
  report.a = a;
  report.b = b;
  report.p_norm = p_norm;
  auto admissible = [tol](Complex x) {
    return std::abs(x.imag()) <= tol && x.real() >= -tol && x.real() <= 1 + tol;
  };
  report.spectrum_admissible = admissible(a) && admissible(b);
  if (report.spectrum_admissible) {
    report.bound = feasibility_bound(std::clamp(a.real(), 0.0, 1.0), std::clamp(b.real(), 0.0, 1.0));
    report.margin = *report.bound - p_norm;
    report.feasible = *report.margin >= -tol;
  }
  return report;
}

Eigen::Matrix2d Factor2x2::a_matrix() const {
  Eigen::Matrix2d m;
  m << a_entries[0], a_entries[1], a_entries[1], a_entries[2];
  return m;
}

Eigen::Matrix2d Factor2x2::b_matrix() const {
  Eigen::Matrix2d m;
  m << b_entries[0], b_entries[1], b_entries[1], b_entries[2];
  return m;
}

Factor2x2 factor_2x2(double a, double b, double z, double tol) {
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  if (!(z >= 0) || !std::isfinite(z)) {
    std::ostringstream msg;
    msg << "factor_2x2: z = " << z << " must be finite and nonnegative";
    throw DomainError(msg.str());
  }
  const double bound = feasibility_bound(a, b);
  if (z > bound + tol) {
    std::ostringstream msg;
    msg << "factor_2x2: z = " << z << " exceeds the bound " << bound;
    throw Infeasible(msg.str(), assess_feasibility(a, b, z, tol));
  }
  z = std::min(z, bound);

  if (a > b) {
    // [[a, z], [0, b]] = J C'^T J with C' = [[b, z], [0, a]]; if C' = A' B'
    // with symmetric factors then C = (J B' J)(J A' J).
    Factor2x2 f = factor_2x2(b, a, z, tol);
    const auto a_prime = f.a_entries;
    const auto b_prime = f.b_entries;
    f.a_entries = {b_prime[2], b_prime[1], b_prime[0]};
    f.b_entries = {a_prime[2], a_prime[1], a_prime[0]};
    f.reflected = true;
    return f;
  }

  Factor2x2 f;
  if (a == b || b == 1) {
    f.branch = Factor2x2::Branch::kDiagonal;
    f.a_entries = {a, 0, 1};
    f.b_entries = {1, 0, b};
  } else if (a == 0) {
    f.branch = Factor2x2::Branch::kRankOne;
    f.a_entries = {z * z / b, z, b};
    f.b_entries = {0, 0, 1};
  } else {
    f = coupled(a, b, z);
  }
  return f;
}

Factorization factor_block(double a, double b, const Eigen::Ref<const MatrixXc>& p, double tol) {
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  detail::require_square(p, "factor_block");
  require_finite(p);
  if (!psd_check(p, tol)) throw NotPsd("factor_block: P is not positive semidefinite");

  const Index r = p.rows();
  const auto eig = hermitian_eig(hermitian_part(p), 1.0);
  const double p_norm =
      r ? std::max(std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(r - 1))) : 0.0;
  const FeasibilityReport report = assess_feasibility(a, b, p_norm, tol);
  if (!report.feasible) {
    std::ostringstream msg;
    msg << "factor_block: |P| = " << p_norm << " exceeds the bound " << report.bound.value_or(0);
    throw Infeasible(msg.str(), report);
  }

  // Scalar maps evaluated on the spectrum of P.
  std::array<RealVector<double>, 6> values;
  for (auto& v : values) v.resize(r);
  for (Index k = 0; k < r; ++k) {
    const auto f = factor_2x2(a, b, std::max(eig.eigenvalues(k), 0.0), tol);
    for (int e = 0; e < 3; ++e) {
      values[e](k) = f.a_entries[e];
      values[3 + e](k) = f.b_entries[e];
    }
  }
  auto lift = [&](const RealVector<double>& v) -> MatrixXc {
    return eig.vectors * v.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  };
  auto assemble = [&](int offset) {
    MatrixXc m(2 * r, 2 * r);
    const MatrixXc off = lift(values[offset + 1]);
    m.topLeftCorner(r, r) = lift(values[offset]);
    m.topRightCorner(r, r) = off;
    m.bottomLeftCorner(r, r) = off;
    m.bottomRightCorner(r, r) = lift(values[offset + 2]);
    return m;
  };

  Factorization out;
  out.a = assemble(0);
  out.b = assemble(3);

  MatrixXc target = MatrixXc::Zero(2 * r, 2 * r);
  target.topLeftCorner(r, r).diagonal().setConstant(a);
  target.bottomRightCorner(r, r).diagonal().setConstant(b);
  target.topRightCorner(r, r) = p;
  out.report = verify_certificate(target, out.a, out.b, tol);
  if (!out.report.pass) {
    std::ostringstream msg;
    msg << "factor_block: lifted factors fail their certificate (product residual "
        << out.report.product_residual << ")";
    throw CertificateFailure(msg.str());
  }
  return out;
}

std::pair<MatrixXc, MatrixXc> assemble_full_factors(const CanonicalForm& form,
                                                    const Eigen::Ref<const MatrixXc>& block_a,
                                                    const Eigen::Ref<const MatrixXc>& block_b) {
  const Index n = form.dim();
  const Index coupled = 2 * form.r;
  if (block_a.rows() != coupled || block_a.cols() != coupled || block_b.rows() != coupled ||
      block_b.cols() != coupled) {
    throw DimensionMismatch("assemble_full_factors: coupled blocks must be " +
                            std::to_string(coupled) + "x" + std::to_string(coupled));
  }
  if (form.unitary.rows() != n || form.unitary.cols() != n) {
    throw DimensionMismatch("assemble_full_factors: unitary does not match the form dimensions");
  }
  const double a = std::clamp(form.params.a.real(), 0.0, 1.0);
  const double b = std::clamp(form.params.b.real(), 0.0, 1.0);

  MatrixXc fa = MatrixXc::Zero(n, n);
  MatrixXc fb = MatrixXc::Zero(n, n);
  fa.diagonal().head(form.d1).setConstant(a);
  fa.diagonal().segment(form.d1, form.d2).setConstant(b);
  fb.diagonal().head(form.d1 + form.d2).setOnes();
  fa.bottomRightCorner(coupled, coupled) = block_a;
  fb.bottomRightCorner(coupled, coupled) = block_b;
  return {form.unitary * fa * form.unitary.adjoint(), form.unitary * fb * form.unitary.adjoint()};
}

Factorization factor_quadratic(const Eigen::Ref<const MatrixXc>& t, double tol) {
  const QuadraticParams params = detect_quadratic(t, tol);
  const CanonicalForm form = canonicalize(t, params, tol);
  const FeasibilityReport report = assess_feasibility(params.a, params.b, form.p_norm(), tol);
  if (!report.feasible) {
    std::ostringstream msg;
    if (!report.spectrum_admissible) {
      msg << "factor_quadratic: spectrum {" << params.a << ", " << params.b
          << "} is not contained in [0, 1]";
    } else {
      msg << "factor_quadratic: |P| = " << report.p_norm << " exceeds the bound " << *report.bound;
    }
    throw Infeasible(msg.str(), report);
  }

  const double a = std::clamp(params.a.real(), 0.0, 1.0);
  const double b = std::clamp(params.b.real(), 0.0, 1.0);
  MatrixXc block_a(0, 0);
  MatrixXc block_b(0, 0);
  if (form.r > 0) {
    MatrixXc p = MatrixXc::Zero(form.r, form.r);
    for (Index k = 0; k < form.r; ++k) p(k, k) = form.p_values[static_cast<std::size_t>(k)];
    Factorization block = factor_block(a, b, p, tol);
    block_a = std::move(block.a);
    block_b = std::move(block.b);
  }

  Factorization out;
  std::tie(out.a, out.b) = assemble_full_factors(form, block_a, block_b);
  out.report = verify_certificate(t, out.a, out.b, tol);
  if (!out.report.pass) {
    std::ostringstream msg;
    msg << "factor_quadratic: assembled factors fail their certificate (product residual "
        << out.report.product_residual << ")";
    throw CertificateFailure(msg.str());
  }
  return out;
}

}  // namespace qfact
