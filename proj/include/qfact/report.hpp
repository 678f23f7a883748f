// SPDX-License-Identifier: Apache-2.0

// Matrix documents and deterministic report text.
//
// A matrix document is {"rows": r, "cols": c, "data": [[re, im], ...]} with
// the data in row-major order. Reports are emitted with keys in insertion
// order and every floating-point number printed with 17 significant digits,
// so a double survives a write/read cycle bit for bit.

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "qfact/linalg.hpp"

namespace qfact {

using Json = nlohmann::ordered_json;

class ParseError : public Error {
 public:
  using Error::Error;
};

Json complex_to_json(Complex z);
Json matrix_to_json(const Eigen::Ref<const MatrixXc>& m);
MatrixXc matrix_from_json(const Json& doc);

/// Accepts a matrix document, a run report whose payload carries "matrix",
/// or the plain-text form: n followed by n rows of n real numbers.
MatrixXc parse_matrix_text(std::string_view text);

/// "%.17g"; non-finite values have no JSON spelling and are rejected.
std::string format_number(double x);

/// Deterministic rendering of a JSON value (two-space indent; arrays of
/// scalars and of [re, im] pairs stay on one line).
std::string dump_json(const Json& value);

}  // namespace qfact
