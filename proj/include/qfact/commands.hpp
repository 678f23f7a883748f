// SPDX-License-Identifier: Apache-2.0

// Subcommands of the qfact command-line tool. Each returns a RunReport; the
// binary in tools/ only parses flags, reads inputs and writes the report.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qfact/report.hpp"

namespace qfact {

enum class Verdict { kOk, kInfeasible, kNotQuadratic, kError };

std::string_view verdict_name(Verdict v);

/// 0 = ok, 1 = error, 2 = infeasible, 3 = not quadratic.
int exit_code(Verdict v);

struct RunReport {
  std::string command;
  Verdict verdict = Verdict::kError;
  Json payload = Json::object();

  Json to_json() const;
  std::string text() const { return dump_json(to_json()); }
};

RunReport error_report(std::string command, std::string_view message);

RunReport cmd_check(const MatrixXc& t, double tol);
RunReport cmd_factor(const MatrixXc& t, double tol);
RunReport cmd_canonical(const MatrixXc& t, double tol);
RunReport cmd_bound(double a, double b);
RunReport cmd_oracle(double a, double b, double z, std::int64_t budget, std::uint64_t seed);
RunReport cmd_verify(const MatrixXc& t, const MatrixXc& a, const MatrixXc& b, double tol);
RunReport cmd_gen(Index d1, Index d2, Index r, double a, double b, const std::vector<double>& p,
                  std::uint64_t seed);

/// CSV "a,b,bound" over the (steps + 1)^2 grid of [0, 1]^2.
std::string bound_sweep_csv(int steps);

struct VerifyInput {
  MatrixXc t;
  MatrixXc a;
  MatrixXc b;
};

/// Reads {"T": doc, "A": doc, "B": doc}, either at top level or inside the
/// payload of a factor report.
VerifyInput parse_verify_input(std::string_view text);

}  // namespace qfact
