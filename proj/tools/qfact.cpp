// SPDX-License-Identifier: Apache-2.0

// qfact: decide and construct factorizations of quadratic matrices into two
// positive contractions.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfact/canonical.hpp"
#include "qfact/commands.hpp"

namespace {

std::string read_all(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qfact::ParseError("cannot open input file \"" + path + "\"");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool write_all(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout.flush());
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out.flush());
}

int emit(const qfact::RunReport& report, const std::string& output) {
  if (!write_all(output, report.text())) {
    std::cerr << "qfact: cannot write output\n";
    return 1;
  }
  return qfact::exit_code(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factor quadratic matrices into two positive contractions."};
  app.require_subcommand(1, 1);
  app.fallthrough();

  double tol = qfact::kDefaultTol;
  std::uint64_t seed = 0;
  std::int64_t budget = 1'000'000;
  std::string input;
  std::string output;
  app.add_option("--tol", tol, "Tolerance")->capture_default_str();
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--budget", budget, "Oracle evaluation budget")->capture_default_str();
  app.add_option("--input", input, "Input path (default stdin)");
  app.add_option("--output", output, "Output path (default stdout)");

  double a = 0;
  double b = 0;
  double z = 0;
  qfact::Index d1 = 0;
  qfact::Index d2 = 0;
  qfact::Index r = 0;
  std::vector<double> p;
  std::optional<int> grid;

  auto* check = app.add_subcommand("check", "Decide feasibility without computing factors");
  auto* factor = app.add_subcommand("factor", "Construct and certify the two factors");
  auto* canonical = app.add_subcommand("canonical", "Report the canonical form and its unitary");
  auto* verify = app.add_subcommand("verify", "Check a {T, A, B} certificate");

  auto* bound = app.add_subcommand("bound", "Evaluate the feasibility bound");
  bound->add_option("--a", a, "Eigenvalue a in [0, 1]");
  bound->add_option("--b", b, "Eigenvalue b in [0, 1]");
  bound->add_option("--grid", grid, "Emit a CSV sweep over a (grid+1)^2 lattice of [0, 1]^2");

  auto* oracle = app.add_subcommand("oracle", "Search for a 2x2 factorization numerically");
  oracle->add_option("--a", a)->required();
  oracle->add_option("--b", b)->required();
  oracle->add_option("--z", z)->required();

  auto* gen = app.add_subcommand("gen", "Generate a random quadratic matrix");
  gen->add_option("--d1", d1)->capture_default_str();
  gen->add_option("--d2", d2)->capture_default_str();
  gen->add_option("--r", r)->capture_default_str();
  gen->add_option("--a", a)->required();
  gen->add_option("--b", b)->required();
  gen->add_option("--p", p, "Diagonal of P (r values)");

  std::string command = "qfact";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    return emit(qfact::error_report(command, e.what()), output);
  }
  command = app.get_subcommands().front()->get_name();

  try {
    if (check->parsed()) return emit(qfact::cmd_check(qfact::parse_matrix_text(read_all(input)), tol), output);
    if (factor->parsed()) return emit(qfact::cmd_factor(qfact::parse_matrix_text(read_all(input)), tol), output);
    if (canonical->parsed()) {
      return emit(qfact::cmd_canonical(qfact::parse_matrix_text(read_all(input)), tol), output);
    }
    if (verify->parsed()) {
      const qfact::VerifyInput v = qfact::parse_verify_input(read_all(input));
      return emit(qfact::cmd_verify(v.t, v.a, v.b, tol), output);
    }
    if (bound->parsed()) {
      if (grid) {
        if (!write_all(output, qfact::bound_sweep_csv(*grid))) return 1;
        return 0;
      }
      return emit(qfact::cmd_bound(a, b), output);
    }
    if (oracle->parsed()) return emit(qfact::cmd_oracle(a, b, z, budget, seed), output);
    if (gen->parsed()) return emit(qfact::cmd_gen(d1, d2, r, a, b, p, seed), output);
  } catch (const std::exception& e) {
    return emit(qfact::error_report(command, e.what()), output);
  }
  return emit(qfact::error_report(command, "no subcommand"), output);
}
