// SPDX-License-Identifier: Apache-2.0

#include "qfact/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace qfact {

VerificationReport verify_certificate(const Eigen::Ref<const MatrixXc>& t,
                                      const Eigen::Ref<const MatrixXc>& a,
                                      const Eigen::Ref<const MatrixXc>& b, double tol) {
  if (a.cols() != b.rows() || a.rows() != t.rows() || b.cols() != t.cols()) {
    throw DimensionMismatch("verify_certificate: factor shapes do not match the target");
  }
  require_finite(t, "target");
  require_finite(a, "first factor");
  require_finite(b, "second factor");
  VerificationReport report;
  report.tolerance = tol;
  report.a_psd = a.rows() == a.cols() && psd_check(a, tol);
  report.a_contraction = contraction_check(a, tol);
  report.b_psd = b.rows() == b.cols() && psd_check(b, tol);
  report.b_contraction = contraction_check(b, tol);
  report.product_residual = (a * b - t).norm();
  report.pass = report.a_psd && report.a_contraction && report.b_psd && report.b_contraction &&
                report.product_residual <= tol * std::max(1.0, t.norm());
  return report;
}

NecessaryConditions necessary_conditions(const Eigen::Ref<const MatrixXc>& t, double tol) {
  detail::require_square(t, "necessary_conditions");
  require_finite(t);
  const MatrixXc re = hermitian_part(t);
  const MatrixXc im = (t - t.adjoint()) / Complex(0, 2);
  const auto re_eig = hermitian_eig(re, 1.0);
  const auto im_eig = hermitian_eig(hermitian_part(im), 1.0);
  const Index n = t.rows();

  NecessaryConditions out;
  out.re_min = re_eig.eigenvalues(0);
  out.im_min = im_eig.eigenvalues(0);
  out.im_max = im_eig.eigenvalues(n - 1);
  out.norm = operator_norm(t);
  out.re_lower = out.re_min >= -0.125 - tol;
  out.im_bounds = out.im_min >= -0.25 - tol && out.im_max <= 0.25 + tol;
  out.contraction = out.norm <= 1 + tol;
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

struct Sym2 {
  double x11, x12, x22;
};

Sym2 psd_contraction(double theta, double s, double t) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  return {c * c * s + sn * sn * t, c * sn * (s - t), sn * sn * s + c * c * t};
}

double squared_residual(const Sym2& a, const Sym2& b, double ta, double tz, double tb) {
  const double r11 = a.x11 * b.x11 + a.x12 * b.x12 - ta;
  const double r12 = a.x11 * b.x12 + a.x12 * b.x22 - tz;
  const double r21 = a.x12 * b.x11 + a.x22 * b.x12;
  const double r22 = a.x12 * b.x12 + a.x22 * b.x22 - tb;
  return r11 * r11 + r12 * r12 + r21 * r21 + r22 * r22;
}

struct Candidate {
  double value;
  std::array<double, 6> x;
};

// Residual vector of R(ta) diag(sa, ta') R(ta)^T R(tb) diag(sb, tb') R(tb)^T
// against [[a, z], [0, b]] in the smooth variables y, where each eigenvalue
// is sin^2(phi). Also fills the 4x6 Jacobian.
Eigen::Vector4d residual_and_jacobian(const Eigen::Matrix<double, 6, 1>& y, double ta, double tz,
                                      double tb, Eigen::Matrix<double, 4, 6>& jac) {
  std::array<Eigen::Matrix2d, 2> m;
  std::array<std::array<Eigen::Matrix2d, 3>, 2> dm;
  for (int f = 0; f < 2; ++f) {
    const double th = y(3 * f), ps = y(3 * f + 1), pt = y(3 * f + 2);
    const double c = std::cos(th), sn = std::sin(th);
    const double s = std::sin(ps) * std::sin(ps), t = std::sin(pt) * std::sin(pt);
    m[f] << c * c * s + sn * sn * t, c * sn * (s - t), c * sn * (s - t), sn * sn * s + c * c * t;
    dm[f][0] << -2 * c * sn * (s - t), (c * c - sn * sn) * (s - t), (c * c - sn * sn) * (s - t),
        2 * c * sn * (s - t);
    dm[f][1] << c * c, c * sn, c * sn, sn * sn;
    dm[f][1] *= std::sin(2 * ps);
    dm[f][2] << sn * sn, -c * sn, -c * sn, c * c;
    dm[f][2] *= std::sin(2 * pt);
  }
  auto flatten = [](const Eigen::Matrix2d& x) { return Eigen::Vector4d(x(0, 0), x(0, 1), x(1, 0), x(1, 1)); };
  for (int k = 0; k < 3; ++k) {
    jac.col(k) = flatten(dm[0][k] * m[1]);
    jac.col(3 + k) = flatten(m[0] * dm[1][k]);
  }
  return flatten(m[0] * m[1]) - Eigen::Vector4d(ta, tz, 0, tb);
}

// Damped minimum-norm Gauss-Newton steps from a coordinate-descent point.
// Coordinate moves zig-zag in the narrow valleys that appear when a ~ b;
// this only ever lowers the residual, so it cannot manufacture infeasibility.
Candidate polish(const Candidate& start, double ta, double tz, double tb, std::int64_t& evaluations) {
  Eigen::Matrix<double, 6, 1> y;
  for (int f = 0; f < 2; ++f) {
    y(3 * f) = start.x[3 * f];
    y(3 * f + 1) = std::asin(std::sqrt(std::clamp(start.x[3 * f + 1], 0.0, 1.0)));
    y(3 * f + 2) = std::asin(std::sqrt(std::clamp(start.x[3 * f + 2], 0.0, 1.0)));
  }
  Eigen::Matrix<double, 4, 6> jac;
  Eigen::Vector4d r = residual_and_jacobian(y, ta, tz, tb, jac);
  ++evaluations;
  double value = r.squaredNorm();
  double mu = 1e-3;
  for (int iter = 0; iter < 200 && value > 1e-30; ++iter) {
    const Eigen::Matrix4d normal = jac * jac.transpose() + mu * Eigen::Matrix4d::Identity();
    const Eigen::Matrix<double, 6, 1> step = -jac.transpose() * normal.ldlt().solve(r);
    Eigen::Matrix<double, 4, 6> trial_jac;
    const Eigen::Vector4d trial_r = residual_and_jacobian(y + step, ta, tz, tb, trial_jac);
    ++evaluations;
    if (trial_r.squaredNorm() < value) {
      y += step;
      r = trial_r;
      jac = trial_jac;
      value = r.squaredNorm();
      mu = std::max(mu / 10, 1e-15);
    } else {
      mu *= 10;
      if (mu > 1e8) break;
    }
  }
  if (value >= start.value) return start;
  Candidate out{value, {}};
  for (int f = 0; f < 2; ++f) {
    double th = std::fmod(y(3 * f), std::numbers::pi);
    out.x[3 * f] = th < 0 ? th + std::numbers::pi : th;
    out.x[3 * f + 1] = std::sin(y(3 * f + 1)) * std::sin(y(3 * f + 1));
    out.x[3 * f + 2] = std::sin(y(3 * f + 2)) * std::sin(y(3 * f + 2));
  }
  return out;
}

}  // namespace

OracleResult oracle_2x2(double a, double b, double z, std::int64_t budget, std::uint64_t seed) {
  if (!(a >= 0 && a <= 1 && b >= 0 && b <= 1)) throw DomainError("oracle_2x2: a, b must lie in [0, 1]");
  if (!(z >= 0) || !std::isfinite(z)) throw DomainError("oracle_2x2: z must be finite and nonnegative");
  if (budget < 10000) throw DomainError("oracle_2x2: budget must be at least 1e4");

  int points = static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / 6.0)));
  while (std::pow(points + 1, 6) <= static_cast<double>(budget)) ++points;
  while (points > 1 && std::pow(points, 6) > static_cast<double>(budget)) --points;

  std::mt19937_64 rng(seed);
  const double theta_offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double theta_step = std::numbers::pi / points;
  const double unit_step = 1.0 / (points - 1);

  // Every (theta, s, t) triple on the grid, shared by both factors.
  struct Node {
    Sym2 m;
    std::array<double, 3> x;
  };
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(points) * points * points);
  for (int i = 0; i < points; ++i) {
    const double theta = (i + theta_offset) * theta_step;
    for (int j = 0; j < points; ++j) {
      for (int k = 0; k < points; ++k) {
        const double s = j * unit_step;
        const double t = k * unit_step;
        nodes.push_back({psd_contraction(theta, s, t), {theta, s, t}});
      }
    }
  }

  OracleResult result;
  constexpr std::size_t kStarts = 8;
  std::vector<Candidate> best;  // ascending by value, at most kStarts
  for (const Node& na : nodes) {
    for (const Node& nb : nodes) {
      const double v = squared_residual(na.m, nb.m, a, z, b);
      ++result.evaluations;
      if (best.size() == kStarts && v >= best.back().value) continue;
      Candidate c{v, {na.x[0], na.x[1], na.x[2], nb.x[0], nb.x[1], nb.x[2]}};
      auto at = std::upper_bound(best.begin(), best.end(), c,
                                 [](const Candidate& l, const Candidate& r) { return l.value < r.value; });
      best.insert(at, c);
      if (best.size() > kStarts) best.pop_back();
    }
  }

  auto evaluate = [&](const std::array<double, 6>& x) {
    ++result.evaluations;
    return squared_residual(psd_contraction(x[0], x[1], x[2]), psd_contraction(x[3], x[4], x[5]), a,
                            z, b);
  };
  const std::array<double, 6> initial_step{theta_step, unit_step, unit_step,
                                           theta_step, unit_step, unit_step};

  // Per-start cap on descent evaluations.
  constexpr std::int64_t kDescentCap = 2'000'000;

  Candidate overall = best.front();
  for (Candidate c : best) {
    double scale = 1.0;
    const std::int64_t started = result.evaluations;
    // Cyclic coordinate descent; halve every step after a sweep with no gain.
    while (scale * theta_step >= 1e-12 && result.evaluations - started < kDescentCap) {
      bool improved = false;
      for (std::size_t d = 0; d < 6; ++d) {
        for (double sign : {1.0, -1.0}) {
          std::array<double, 6> trial = c.x;
          trial[d] += sign * scale * initial_step[d];
          if (d % 3 != 0) trial[d] = std::clamp(trial[d], 0.0, 1.0);
          if (trial[d] == c.x[d]) continue;
          const double v = evaluate(trial);
          if (v < c.value) {
            c = {v, trial};
            improved = true;
            break;
          }
        }
      }
      if (!improved) scale *= 0.5;
    }
    c = polish(c, a, z, b, result.evaluations);
    if (c.value < overall.value) overall = c;
  }

  result.best_residual = std::sqrt(overall.value);
  result.parameters = overall.x;
  return result;
}

// ---------------------------------------------------------------------------
// Diagonal blocks of block upper triangular products

namespace {

// Pseudo-inverse and range cutoff for the square roots: n * 1e-10 * sigma_max.
constexpr double kBlockCutoff = 1e-10;

// With x = [[x1, x12], [x12^*, x2]] and the (2,1) block of x y vanishing,
// the (1,1) block of x y equals x1^{1/2} (I - K^* K) x1^{1/2} y1 where
// K = Pi D^*, D = x1^{-1/2} x12 x2^{-1/2} and Pi projects onto ran(x2^{1/2}).
MatrixXc first_factor(const MatrixXc& x1, const MatrixXc& x12, const MatrixXc& x2, Index n) {
  const MatrixXc root1 = psd_sqrt(hermitian_part(x1), 1.0);
  const MatrixXc root2 = psd_sqrt(hermitian_part(x2), 1.0);
  auto pinv = [n](const MatrixXc& m) {
    const auto s = svd(m);
    const double cutoff = static_cast<double>(n) * kBlockCutoff * s.max_singular_value();
    MatrixXc out = MatrixXc::Zero(m.cols(), m.rows());
    for (Index k = 0; k < s.singular_values.size() && s.singular_values(k) > cutoff; ++k) {
      out += s.right.col(k) * (s.left.col(k).adjoint() / s.singular_values(k));
    }
    return out;
  };
  const MatrixXc pinv2 = pinv(root2);
  const MatrixXc witness = pinv(root1) * x12 * pinv2;
  const MatrixXc projector = root2 * pinv2;
  const MatrixXc k = projector * witness.adjoint();
  const Index m = x1.rows();
  const MatrixXc middle = MatrixXc::Identity(m, m) - k.adjoint() * k;
  return hermitian_part(root1 * middle * root1);
}

}  // namespace

std::pair<CertifiedPair, CertifiedPair> diagonal_block_factors(const Eigen::Ref<const MatrixXc>& a,
                                                               const Eigen::Ref<const MatrixXc>& b,
                                                               Index split, double tol) {
  detail::require_square(a, "diagonal_block_factors");
  detail::require_square(b, "diagonal_block_factors");
  const Index n = a.rows();
  if (b.rows() != n) throw DimensionMismatch("diagonal_block_factors: factors differ in size");
  if (split <= 0 || split >= n) {
    throw DomainError("diagonal_block_factors: split must lie strictly between 0 and n");
  }
  if (!psd_check(a, tol) || !psd_check(b, tol)) {
    throw NotPsd("diagonal_block_factors: factors must be positive semidefinite");
  }

  const MatrixXc product = a * b;
  const Index rest = n - split;
  const double lower = product.bottomLeftCorner(rest, split).norm();
  if (lower > tol * std::max(1.0, product.norm())) {
    std::ostringstream msg;
    msg << "diagonal_block_factors: (2,1) block of A B has norm " << lower;
    throw NotUpperTriangular(msg.str());
  }

  const MatrixXc a1 = a.topLeftCorner(split, split);
  const MatrixXc a2 = a.bottomRightCorner(rest, rest);
  const MatrixXc b1 = b.topLeftCorner(split, split);
  const MatrixXc b2 = b.bottomRightCorner(rest, rest);

  CertifiedPair leading;
  leading.target = product.topLeftCorner(split, split);
  leading.first = first_factor(a1, a.topRightCorner(split, rest), a2, n);
  leading.second = b1;
  leading.report = verify_certificate(leading.target, leading.first, leading.second, tol);

  // The same construction on the block-swapped adjoint pair (B, A) gives
  // T2^* = F A2, hence T2 = A2 F.
  CertifiedPair trailing;
  trailing.target = product.bottomRightCorner(rest, rest);
  trailing.first = a2;
  trailing.second = first_factor(b2, b.bottomLeftCorner(rest, split), b1, n);
  trailing.report = verify_certificate(trailing.target, trailing.first, trailing.second, tol);

  for (const CertifiedPair* pair : {&leading, &trailing}) {
    if (!pair->report.pass) {
      std::ostringstream msg;
      msg << "diagonal_block_factors: extracted pair fails its certificate (residual "
          << pair->report.product_residual << ")";
      throw CertificateFailure(msg.str());
    }
  }
  return {leading, trailing};
}

// ---------------------------------------------------------------------------
// Random instances

MatrixXc random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXc g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(n, n);
  const MatrixXc& r = qr.matrixQR();
  for (Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

MatrixXc random_quadratic(Index d1, Index d2, Index r, Complex a, Complex b,
                          std::span<const double> p_spec, std::uint64_t seed) {
  if (d1 < 0 || d2 < 0 || r < 0) throw DomainError("random_quadratic: negative block size");
  if (static_cast<Index>(p_spec.size()) != r) {
    throw DomainError("random_quadratic: p_spec must have exactly r entries");
  }
  for (double p : p_spec) {
    if (!(p > 0) || !std::isfinite(p)) throw DomainError("random_quadratic: p_spec must be strictly positive");
  }
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
      !std::isfinite(b.imag())) {
    throw DomainError("random_quadratic: a and b must be finite");
  }
  const Index n = d1 + d2 + 2 * r;
  if (n == 0) throw DomainError("random_quadratic: empty instance");

  CanonicalForm form;
  form.params = {a, b, 0.0};
  form.d1 = d1;
  form.d2 = d2;
  form.r = r;
  form.p_values.assign(p_spec.begin(), p_spec.end());
  std::mt19937_64 rng(seed);
  form.unitary = random_unitary(n, rng);
  return assemble_from_canonical(form);
}

}  // namespace qfact
