// SPDX-License-Identifier: Apache-2.0

#include "qfact/canonical.hpp"

#include <sstream>

namespace qfact {

namespace {

bool lex_less(Complex x, Complex y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

double quadratic_residual(const MatrixXc& t, Complex a, Complex b) {
  const Index n = t.rows();
  const MatrixXc id = MatrixXc::Identity(n, n);
  return (t * t - (a + b) * t + (a * b) * id).norm();
}

// Singular values in (cutoff / 10, 10 * cutoff] cannot be classified reliably.
void require_unambiguous(const RealVector<double>& sigma, double cutoff, const char* what) {
  if (cutoff <= 0) return;
  for (Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cutoff / 10 && sigma(k) <= 10 * cutoff) {
      std::ostringstream msg;
      msg << "canonicalize: singular value " << sigma(k) << " of " << what
          << " is within a factor 10 of the rank cutoff " << cutoff;
      throw RankAmbiguous(msg.str());
    }
  }
}

}  // namespace

QuadraticParams detect_quadratic(const Eigen::Ref<const MatrixXc>& t, double tol) {
  detail::require_square(t, "detect_quadratic");
  require_finite(t);
  const Index n = t.rows();
  const MatrixXc tm = t;
  const double norm = tm.norm();
  const double accept = tol * std::max(1.0, norm * norm);

  const Complex alpha = tm.trace() / static_cast<double>(n);
  if ((tm - alpha * MatrixXc::Identity(n, n)).norm() <= tol * std::max(1.0, norm)) {
    return {alpha, alpha, quadratic_residual(tm, alpha, alpha)};
  }

  // vec(T^2) = s vec(T) - p vec(I)
  Eigen::Matrix<Complex, Eigen::Dynamic, 2> design(n * n, 2);
  const MatrixXc square = tm * tm;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> rhs(n * n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      design(j * n + i, 0) = tm(i, j);
      design(j * n + i, 1) = i == j ? Complex(-1) : Complex(0);
      rhs(j * n + i) = square(i, j);
    }
  }
  const Eigen::Matrix<Complex, 2, 1> sp = design.colPivHouseholderQr().solve(rhs);
  const Complex s = sp(0);
  const Complex p = sp(1);

  Complex a;
  Complex b;
  const Complex disc = s * s - 4.0 * p;
  if (std::abs(disc) <= 1e-12 * std::max(1.0, std::norm(s))) {
    a = b = s / 2.0;
  } else {
    const Complex root = std::sqrt(disc);
    // Larger-magnitude root first, the other from the product to avoid cancellation.
    const Complex big = (std::real(std::conj(s) * root) >= 0 ? s + root : s - root) / 2.0;
    a = big;
    b = big == Complex(0) ? Complex(0) : p / big;
    if (lex_less(b, a)) std::swap(a, b);
  }

  const double residual = quadratic_residual(tm, a, b);
  if (!(residual <= accept)) {
    std::ostringstream msg;
    msg << "detect_quadratic: best quadratic fit leaves residual " << residual
        << " above tolerance " << accept;
    throw NotQuadratic(msg.str());
  }
  return {a, b, residual};
}

MatrixXc canonical_matrix(const CanonicalForm& form) {
  const Index n = form.dim();
  const Complex a = form.params.a;
  const Complex b = form.params.b;
  MatrixXc c = MatrixXc::Zero(n, n);
  Index at = 0;
  for (Index k = 0; k < form.d1; ++k, ++at) c(at, at) = a;
  for (Index k = 0; k < form.d2; ++k, ++at) c(at, at) = b;
  for (Index k = 0; k < form.r; ++k) {
    c(at + k, at + k) = a;
    c(at + form.r + k, at + form.r + k) = b;
    c(at + k, at + form.r + k) = form.p_values[static_cast<std::size_t>(k)];
  }
  return c;
}

MatrixXc assemble_from_canonical(const CanonicalForm& form) {
  return form.unitary * canonical_matrix(form) * form.unitary.adjoint();
}

CanonicalForm canonicalize(const Eigen::Ref<const MatrixXc>& t, const QuadraticParams& params,
                           double tol) {
  detail::require_square(t, "canonicalize");
  require_finite(t);
  const Index n = t.rows();
  const MatrixXc tm = t;
  const MatrixXc id = MatrixXc::Identity(n, n);

  CanonicalForm form;
  form.params = params;

  if (params.a == params.b && (tm - params.a * id).norm() <= tol * std::max(1.0, tm.norm())) {
    form.d1 = n;
    form.unitary = id;
    form.residual = (tm - params.a * id).norm();
    return form;
  }

  // M = ker(T - aI); on M (+) M^perp, T = [[aI, X], [0, Y]] with Y = bI.
  const MatrixXc shifted = tm - params.a * id;
  const auto shifted_svd = svd(shifted);
  // Round-off in T - aI is relative to |T|, not to |T - aI|, which can be far smaller.
  const double scale = std::max(shifted_svd.max_singular_value(), operator_norm(tm));
  const double cutoff = static_cast<double>(n) * kRankCutoff * scale;
  require_unambiguous(shifted_svd.singular_values, cutoff, "T - aI");
  Index k = 0;
  while (k < n && shifted_svd.singular_values(k) > cutoff) ++k;
  const Index m = n - k;

  const MatrixXc complement = shifted_svd.right.leftCols(k);
  const MatrixXc kernel = shifted_svd.right.rightCols(m);
  const MatrixXc coupling = kernel.adjoint() * tm * complement;

  Index r = 0;
  MatrixXc coupling_left = MatrixXc::Identity(m, m);
  MatrixXc coupling_right = MatrixXc::Identity(k, k);
  if (m > 0 && k > 0) {
    const auto coupling_svd = svd(coupling);
    require_unambiguous(coupling_svd.singular_values, cutoff, "the coupling block");
    while (r < coupling_svd.singular_values.size() && coupling_svd.singular_values(r) > cutoff) {
      form.p_values.push_back(coupling_svd.singular_values(r));
      ++r;
    }
    coupling_left = coupling_svd.left;
    coupling_right = coupling_svd.right;
  }

  form.r = r;
  form.d1 = m - r;
  form.d2 = k - r;
  form.unitary.resize(n, n);
  form.unitary.leftCols(form.d1) = kernel * coupling_left.rightCols(form.d1);
  form.unitary.middleCols(form.d1, form.d2) = complement * coupling_right.rightCols(form.d2);
  form.unitary.middleCols(form.d1 + form.d2, r) = kernel * coupling_left.leftCols(r);
  form.unitary.rightCols(r) = complement * coupling_right.leftCols(r);

  form.residual = (form.unitary.adjoint() * tm * form.unitary - canonical_matrix(form)).norm();
  const double limit = 1e3 * tol * std::max(1.0, tm.norm());
  if (!(form.residual <= limit)) {
    std::ostringstream msg;
    msg << "canonicalize: canonical form reproduces T only to " << form.residual
        << " (limit " << limit << "); T is not quadratic with these parameters";
    throw NotQuadratic(msg.str());
  }
  return form;
}

}  // namespace qfact
