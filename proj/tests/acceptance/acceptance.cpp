// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: runs each criterion at its stated tolerance and time
// budget and prints one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfact/canonical.hpp"
#include "qfact/commands.hpp"
#include "qfact/factor.hpp"
#include "qfact/verify.hpp"
#include "support.hpp"

namespace {

using namespace qfact;
using qfact::testing::positive_contraction_slack;
using qfact::testing::psd_with_spectrum;
using qfact::testing::random_positive_contraction;

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Collector {
 public:
  void require(bool cond, const std::string& what) {
    if (!cond && failures_++ < 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Eigen::Matrix2cd upper(double a, double b, double z) {
  Eigen::Matrix2cd t;
  t << a, z, 0, b;
  return t;
}

Outcome counterexample() {
  Collector c;
  MatrixXc t(2, 2);
  t << 9.0 / 25, 3.0 / 25, 0, 16.0 / 25;
  const RunReport r = cmd_check(t, kDefaultTol);
  c.require(r.verdict == Verdict::kInfeasible, "verdict " + std::string(verdict_name(r.verdict)));
  double bound = 0, p_norm = 0, margin = 0;
  if (r.payload.contains("feasibility")) {
    const Json& f = r.payload["feasibility"];
    bound = f["bound"].get<double>();
    p_norm = f["p_norm"].get<double>();
    margin = f["margin"].get<double>();
  }
  c.require(std::abs(bound - 0.096) <= 1e-12, "bound " + fmt(bound));
  c.require(std::abs(p_norm - 0.12) <= 1e-12, "p_norm " + fmt(p_norm));
  c.require(std::abs(margin + 0.024) <= 1e-12, "margin " + fmt(margin));
  c.require(necessary_conditions(t, kDefaultTol).all(), "necessary conditions");
  const double residual = oracle_2x2(0.36, 0.64, 0.12, 1'000'000, 0).best_residual;
  c.require(residual >= 1e-3, "oracle residual " + fmt(residual));
  return c.outcome("bound " + fmt(bound) + ", p_norm " + fmt(p_norm) + ", margin " + fmt(margin) +
                   ", oracle " + fmt(residual));
}

Outcome boundary_sweep() {
  Collector c;
  int cases = 0, factored = 0;
  double worst = 0;
  for (int i = 0; i <= 10; ++i) {
    for (int k = 0; k <= 10; ++k) {
      const double a = i / 10.0;
      const double b = k / 10.0;
      const double bound = feasibility_bound(a, b);
      for (double z : {0.0, bound / 2, bound, bound + 1e-6 + 1e-6 * bound}) {
        ++cases;
        const bool expect = z <= bound + 1e-9;
        const std::string at = "(" + fmt(a) + ", " + fmt(b) + ", " + fmt(z) + ")";
        try {
          const Factor2x2 f = factor_2x2(a, b, z, kDefaultTol);
          ++factored;
          c.require(expect, "factored infeasible " + at);
          const Eigen::Matrix2cd fa = f.a_matrix().cast<Complex>();
          const Eigen::Matrix2cd fb = f.b_matrix().cast<Complex>();
          const double slack = std::max(positive_contraction_slack(fa), positive_contraction_slack(fb));
          const double residual = (fa * fb - upper(a, b, z)).norm();
          worst = std::max({worst, slack, residual});
          c.require(slack <= 1e-10, "slack " + fmt(slack) + " at " + at);
          c.require(residual <= 1e-10, "residual " + fmt(residual) + " at " + at);
        } catch (const Infeasible&) {
          c.require(!expect, "rejected feasible " + at);
        }
      }
    }
  }
  return c.outcome(std::to_string(cases) + " cases, " + std::to_string(factored) +
                   " factored, worst slack/residual " + fmt(worst));
}

Outcome spectral_identities() {
  Collector c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (a <= 0 || b >= 1 || a == b) {
      --trial;
      continue;
    }
    const double z = u(rng) * feasibility_bound(a, b);
    const Factor2x2 f = factor_2x2(a, b, z, kDefaultTol);
    if (!f.spectral) {
      c.require(false, "no spectral data at trial " + std::to_string(trial));
      continue;
    }
    const auto [l1, l2, gamma] = *f.spectral;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ea(f.a_matrix(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eb(f.b_matrix(), Eigen::EigenvaluesOnly);
    const double s = a + b - z * z / ((1 - a) * (1 - b));
    const double err = std::max({std::abs(ea.eigenvalues()(0) - l1), std::abs(ea.eigenvalues()(1) - 1),
                                 std::abs(eb.eigenvalues()(0) - l2), std::abs(eb.eigenvalues()(1) - 1),
                                 std::abs(l1 * l2 - a * b), std::abs(l1 + l2 - s)});
    worst = std::max(worst, err);
    c.require(err <= 1e-10, "identity error " + fmt(err) + " at trial " + std::to_string(trial));
  }
  return c.outcome("1000 instances, worst error " + fmt(worst));
}

Outcome functional_calculus() {
  Collector c;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 8);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), b = u(rng);
    const double bound = feasibility_bound(a, b);
    const Index r = dim(rng);
    Eigen::VectorXd spectrum(r);
    for (Index k = 0; k < r; ++k) spectrum(k) = u(rng);
    spectrum(0) = 1.0;
    spectrum(r - 1) = r > 1 ? 0.0 : 1.0;  // rank-deficient P whenever r > 1
    const MatrixXc shape = psd_with_spectrum(spectrum, rng);

    const Factorization f = factor_block(a, b, 0.99 * bound * shape, kDefaultTol);
    worst = std::max(worst, f.report.product_residual);
    c.require(f.report.pass && f.report.product_residual <= 1e-8,
              "certificate at trial " + std::to_string(trial));
    try {
      factor_block(a, b, (1.01 * bound + 1e-6) * shape, kDefaultTol);
      c.require(false, "accepted oversized P at trial " + std::to_string(trial));
    } catch (const Infeasible&) {
    }
  }
  return c.outcome("100 instances, worst residual " + fmt(worst));
}

Outcome pipeline_round_trip() {
  Collector c;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int feasible = 0, infeasible = 0, skipped = 0;
  double worst_canon = 0, worst_cert = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Index d1, d2, r;
    do {
      d1 = static_cast<Index>(u(rng) * 9);
      d2 = static_cast<Index>(u(rng) * 9);
      r = static_cast<Index>(u(rng) * 9);
    } while (d1 + d2 + 2 * r > 24 || d1 + d2 + 2 * r == 0);
    const double a = u(rng), b = u(rng);
    const double bound = feasibility_bound(a, b);
    std::vector<double> p(static_cast<std::size_t>(r));
    for (auto& x : p) x = (0.05 + 1.95 * u(rng)) * std::max(bound, 1e-3);
    const double p_norm = p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
    const double margin = bound - p_norm;
    const MatrixXc t = random_quadratic(d1, d2, r, a, b, p, 10'000 + trial);
    const double scale = t.norm();
    const std::string at = " at trial " + std::to_string(trial);

    try {
      const CanonicalForm form = canonicalize(t, detect_quadratic(t, kDefaultTol), kDefaultTol);
      const double rt = (assemble_from_canonical(form) - t).norm();
      worst_canon = std::max(worst_canon, rt / scale);
      c.require(rt <= 1e-9 * scale, "canonical round trip " + fmt(rt) + at);
      c.require(form.r == r, "coupling rank" + at);
    } catch (const std::exception& e) {
      c.require(false, std::string(e.what()) + at);
      continue;
    }

    if (std::abs(margin) < 1e-6) {
      ++skipped;
      continue;
    }
    try {
      const Factorization f = factor_quadratic(t, kDefaultTol);
      ++feasible;
      c.require(margin > 0, "factored an infeasible instance" + at);
      const VerificationReport v = verify_certificate(t, f.a, f.b, 1e-8);
      worst_cert = std::max(worst_cert, v.product_residual / std::max(1.0, scale));
      c.require(v.pass, "certificate" + at);
    } catch (const Infeasible&) {
      ++infeasible;
      c.require(margin < 0, "rejected a feasible instance" + at);
    } catch (const std::exception& e) {
      c.require(false, std::string(e.what()) + at);
    }
  }
  return c.outcome(std::to_string(feasible) + " feasible, " + std::to_string(infeasible) +
                   " infeasible, " + std::to_string(skipped) + " near-boundary; worst canonical " +
                   fmt(worst_canon) + ", worst certificate " + fmt(worst_cert));
}

Outcome oracle_agreement() {
  Collector c;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst_feasible = 0, best_infeasible = INFINITY;
  for (int sample = 0; sample < 50; ++sample) {
    const double a = u(rng), b = u(rng);
    const double bound = feasibility_bound(a, b);
    const std::uint64_t seed = static_cast<std::uint64_t>(sample);
    for (double z : {0.5 * bound, 0.99 * bound}) {
      const double res = oracle_2x2(a, b, z, 1'000'000, seed).best_residual;
      worst_feasible = std::max(worst_feasible, res);
      c.require(res <= 1e-6, "feasible residual " + fmt(res) + " at (" + fmt(a) + ", " + fmt(b) +
                                 ", " + fmt(z) + ")");
    }
    for (double z : {1.01 * bound + 1e-3, 2 * bound + 1e-3}) {
      const double res = oracle_2x2(a, b, z, 1'000'000, seed).best_residual;
      best_infeasible = std::min(best_infeasible, res);
      c.require(res >= 1e-4, "infeasible residual " + fmt(res) + " at (" + fmt(a) + ", " + fmt(b) +
                                 ", " + fmt(z) + ")");
    }
  }
  return c.outcome("worst feasible " + fmt(worst_feasible) + ", smallest infeasible " +
                   fmt(best_infeasible));
}

Outcome necessary_condition_suite() {
  Collector c;
  std::mt19937_64 rng(555);
  std::uniform_int_distribution<int> dim(1, 10);
  double re_min = INFINITY, im_abs = 0, norm = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = dim(rng);
    const MatrixXc t = random_positive_contraction(n, rng) * random_positive_contraction(n, rng);
    const NecessaryConditions nc = necessary_conditions(t, 1e-8);
    re_min = std::min(re_min, nc.re_min);
    im_abs = std::max({im_abs, -nc.im_min, nc.im_max});
    norm = std::max(norm, nc.norm);
    c.require(nc.all(), "violation at trial " + std::to_string(trial));
  }
  return c.outcome("1000 products; min Re " + fmt(re_min) + ", max |Im| " + fmt(im_abs) +
                   ", max norm " + fmt(norm));
}

MatrixXc block_diagonal_unitary(Index split, Index n, std::mt19937_64& rng) {
  MatrixXc u = MatrixXc::Zero(n, n);
  if (split > 0) u.topLeftCorner(split, split) = random_unitary(split, rng);
  if (n - split > 0) u.bottomRightCorner(n - split, n - split) = random_unitary(n - split, rng);
  return u;
}

Outcome diagonal_block_suite() {
  Collector c;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dim(0, 3);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index d1 = dim(rng), d2 = dim(rng), r = 1 + dim(rng);
    const double a = u(rng), b = u(rng);
    const double bound = feasibility_bound(a, b);
    Eigen::VectorXd spectrum(r);
    for (Index k = 0; k < r; ++k) spectrum(k) = u(rng) * bound;
    const MatrixXc p = psd_with_spectrum(spectrum, rng);
    const Factorization block = factor_block(a, b, p, kDefaultTol);

    // Canonical coordinates: a I_d1 (+) b I_d2 (+) [[a I, P], [0, b I]].
    CanonicalForm form;
    form.params = {a, b, 0.0};
    form.d1 = d1;
    form.d2 = d2;
    form.r = r;
    form.unitary = MatrixXc::Identity(d1 + d2 + 2 * r, d1 + d2 + 2 * r);
    auto [fa, fb] = assemble_full_factors(form, block.a, block.b);

    // Splits that keep the product block upper triangular.
    const Index n = form.dim();
    const Index split = (trial % 2 == 0) ? d1 + d2 + r : (d1 > 0 ? d1 : d1 + d2 + r);
    const MatrixXc w = block_diagonal_unitary(split, n, rng);
    fa = w * fa * w.adjoint();
    fb = w * fb * w.adjoint();

    const std::string at = " at trial " + std::to_string(trial);
    try {
      const auto [first, second] = diagonal_block_factors(fa, fb, split, kDefaultTol);
      for (const CertifiedPair* pair : {&first, &second}) {
        worst = std::max(worst, pair->report.product_residual);
        c.require(pair->report.pass && pair->report.product_residual <= 1e-8,
                  "falsified, residual " + fmt(pair->report.product_residual) + at);
      }
    } catch (const std::exception& e) {
      c.require(false, std::string(e.what()) + at);
    }
  }
  return c.outcome("200 products, worst residual " + fmt(worst));
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"counterexample", 5, counterexample},
      {"boundary exactness sweep", 5, boundary_sweep},
      {"coupled-branch spectral identities", 2, spectral_identities},
      {"functional-calculus lifting", 10, functional_calculus},
      {"full pipeline round trip", 30, pipeline_round_trip},
      {"oracle agreement", 120, oracle_agreement},
      {"necessary-conditions property suite", 10, necessary_condition_suite},
      {"diagonal-block factorization suite", 20, diagonal_block_suite},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criteria[k].budget_seconds) {
      out.ok = false;
      out.detail += " [over time budget " + fmt(criteria[k].budget_seconds) + " s]";
    }
    failed += out.ok ? 0 : 1;
    std::printf("criterion %zu %s: %s (%.2f s) %s\n", k + 1, criteria[k].name, out.ok ? "PASS" : "FAIL",
                seconds, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
