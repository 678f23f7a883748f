// SPDX-License-Identifier: Apache-2.0

#include "qfact/commands.hpp"

#include <sstream>

#include "qfact/canonical.hpp"
#include "qfact/factor.hpp"
#include "qfact/verify.hpp"

namespace qfact {

namespace {

Json params_json(const QuadraticParams& p) {
  Json j;
  j["a"] = complex_to_json(p.a);
  j["b"] = complex_to_json(p.b);
  j["residual"] = p.residual;
  return j;
}

Json canonical_summary(const CanonicalForm& f) {
  Json j;
  j["d1"] = f.d1;
  j["d2"] = f.d2;
  j["r"] = f.r;
  j["p_values"] = f.p_values;
  return j;
}

Json feasibility_json(const FeasibilityReport& f) {
  Json j;
  j["a"] = complex_to_json(f.a);
  j["b"] = complex_to_json(f.b);
  j["spectrum_admissible"] = f.spectrum_admissible;
  j["p_norm"] = f.p_norm;
  j["bound"] = f.bound ? Json(*f.bound) : Json(nullptr);
  j["margin"] = f.margin ? Json(*f.margin) : Json(nullptr);
  j["feasible"] = f.feasible;
  return j;
}

Json certificate_json(const VerificationReport& r) {
  Json j;
  j["a_psd"] = r.a_psd;
  j["a_contraction"] = r.a_contraction;
  j["b_psd"] = r.b_psd;
  j["b_contraction"] = r.b_contraction;
  j["product_residual"] = r.product_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

RunReport make(std::string command, Verdict verdict, Json payload) {
  RunReport r;
  r.command = std::move(command);
  r.verdict = verdict;
  r.payload = std::move(payload);
  return r;
}

// Maps library failures onto verdicts.
template <typename F>
RunReport guarded(const std::string& command, F&& body) {
  try {
    return body();
  } catch (const Infeasible& e) {
    Json j;
    j["message"] = e.what();
    j["feasibility"] = feasibility_json(e.report());
    return make(command, Verdict::kInfeasible, std::move(j));
  } catch (const NotQuadratic& e) {
    Json j;
    j["message"] = e.what();
    return make(command, Verdict::kNotQuadratic, std::move(j));
  } catch (const std::exception& e) {
    return error_report(command, e.what());
  }
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kOk:
      return "ok";
    case Verdict::kInfeasible:
      return "infeasible";
    case Verdict::kNotQuadratic:
      return "not_quadratic";
    case Verdict::kError:
      break;
  }
  return "error";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::kOk:
      return 0;
    case Verdict::kInfeasible:
      return 2;
    case Verdict::kNotQuadratic:
      return 3;
    case Verdict::kError:
      break;
  }
  return 1;
}

Json RunReport::to_json() const {
  Json j;
  j["command"] = command;
  j["verdict"] = std::string(verdict_name(verdict));
  j["payload"] = payload;
  return j;
}

RunReport error_report(std::string command, std::string_view message) {
  Json j;
  j["message"] = std::string(message);
  return make(std::move(command), Verdict::kError, std::move(j));
}

RunReport cmd_check(const MatrixXc& t, double tol) {
  return guarded("check", [&] {
    const QuadraticParams params = detect_quadratic(t, tol);
    const CanonicalForm form = canonicalize(t, params, tol);
    const FeasibilityReport feas = assess_feasibility(params.a, params.b, form.p_norm(), tol);
    Json j;
    j["params"] = params_json(params);
    j["canonical"] = canonical_summary(form);
    j["feasibility"] = feasibility_json(feas);
    return make("check", feas.feasible ? Verdict::kOk : Verdict::kInfeasible, std::move(j));
  });
}

RunReport cmd_factor(const MatrixXc& t, double tol) {
  return guarded("factor", [&] {
    const Factorization f = factor_quadratic(t, tol);
    Json j;
    j["T"] = matrix_to_json(t);
    j["A"] = matrix_to_json(f.a);
    j["B"] = matrix_to_json(f.b);
    j["certificate"] = certificate_json(f.report);
    return make("factor", Verdict::kOk, std::move(j));
  });
}

RunReport cmd_canonical(const MatrixXc& t, double tol) {
  return guarded("canonical", [&] {
    const QuadraticParams params = detect_quadratic(t, tol);
    const CanonicalForm form = canonicalize(t, params, tol);
    Json canon = canonical_summary(form);
    canon["residual"] = form.residual;
    canon["unitary"] = matrix_to_json(form.unitary);
    Json j;
    j["params"] = params_json(params);
    j["canonical"] = std::move(canon);
    return make("canonical", Verdict::kOk, std::move(j));
  });
}

RunReport cmd_bound(double a, double b) {
  return guarded("bound", [&] {
    const double bound = feasibility_bound(a, b);
    Json j;
    j["a"] = a;
    j["b"] = b;
    j["bound"] = bound;
    return make("bound", Verdict::kOk, std::move(j));
  });
}

std::string bound_sweep_csv(int steps) {
  if (steps < 1) throw DomainError("bound sweep needs at least one step");
  std::ostringstream out;
  out << "a,b,bound\n";
  for (int i = 0; i <= steps; ++i) {
    for (int k = 0; k <= steps; ++k) {
      const double a = static_cast<double>(i) / steps;
      const double b = static_cast<double>(k) / steps;
      out << format_number(a) << ',' << format_number(b) << ','
          << format_number(feasibility_bound(a, b)) << '\n';
    }
  }
  return out.str();
}

RunReport cmd_oracle(double a, double b, double z, std::int64_t budget, std::uint64_t seed) {
  return guarded("oracle", [&] {
    const OracleResult r = oracle_2x2(a, b, z, budget, seed);
    Json params;
    params["theta_a"] = r.parameters[0];
    params["s_a"] = r.parameters[1];
    params["t_a"] = r.parameters[2];
    params["theta_b"] = r.parameters[3];
    params["s_b"] = r.parameters[4];
    params["t_b"] = r.parameters[5];
    Json j;
    j["a"] = a;
    j["b"] = b;
    j["z"] = z;
    j["budget"] = budget;
    j["seed"] = seed;
    j["best_residual"] = r.best_residual;
    j["parameters"] = std::move(params);
    j["evaluations"] = r.evaluations;
    return make("oracle", Verdict::kOk, std::move(j));
  });
}

RunReport cmd_verify(const MatrixXc& t, const MatrixXc& a, const MatrixXc& b, double tol) {
  return guarded("verify", [&] {
    const VerificationReport r = verify_certificate(t, a, b, tol);
    Json j;
    j["certificate"] = certificate_json(r);
    return make("verify", r.pass ? Verdict::kOk : Verdict::kInfeasible, std::move(j));
  });
}

RunReport cmd_gen(Index d1, Index d2, Index r, double a, double b, const std::vector<double>& p,
                  std::uint64_t seed) {
  return guarded("gen", [&] {
    const MatrixXc t = random_quadratic(d1, d2, r, a, b, p, seed);
    Json j;
    j["d1"] = d1;
    j["d2"] = d2;
    j["r"] = r;
    j["a"] = a;
    j["b"] = b;
    j["p_values"] = p;
    j["seed"] = seed;
    j["matrix"] = matrix_to_json(t);
    return make("gen", Verdict::kOk, std::move(j));
  });
}

VerifyInput parse_verify_input(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  const Json* source = &doc;
  if (doc.is_object() && doc.contains("payload")) source = &doc["payload"];
  if (!source->is_object()) throw ParseError("verify input must be an object");
  for (const char* key : {"T", "A", "B"}) {
    if (!source->contains(key)) {
      throw ParseError(std::string("verify input is missing \"") + key + "\"");
    }
  }
  return {matrix_from_json((*source)["T"]), matrix_from_json((*source)["A"]),
          matrix_from_json((*source)["B"])};
}

}  // namespace qfact
