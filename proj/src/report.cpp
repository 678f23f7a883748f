// SPDX-License-Identifier: Apache-2.0

#include "qfact/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace qfact {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const Eigen::Ref<const MatrixXc>& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  }
  Json doc;
  doc["rows"] = m.rows();
  doc["cols"] = m.cols();
  doc["data"] = std::move(data);
  return doc;
}

namespace {

double number_at(const Json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string("matrix document: ") + what + " is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string("matrix document: ") + what + " is not finite");
  return x;
}

Index dimension_at(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw ParseError(std::string("matrix document: \"") + key + "\" must be an integer");
  }
  const auto v = doc[key].get<std::int64_t>();
  if (v <= 0) throw ParseError(std::string("matrix document: \"") + key + "\" must be positive");
  return static_cast<Index>(v);
}

MatrixXc parse_plain(std::string_view text) {
  std::istringstream in{std::string(text)};
  long long n = 0;
  if (!(in >> n) || n <= 0) throw ParseError("plain matrix: expected a positive dimension first");
  std::vector<Complex> entries;
  entries.reserve(static_cast<std::size_t>(n * n));
  for (long long k = 0; k < n * n; ++k) {
    double x = 0;
    if (!(in >> x)) throw ParseError("plain matrix: expected " + std::to_string(n * n) + " numbers");
    entries.emplace_back(x, 0.0);
  }
  std::string rest;
  if (in >> rest) throw ParseError("plain matrix: trailing input \"" + rest + "\"");
  try {
    return make_matrix(n, n, entries);
  } catch (const Error& e) {
    throw ParseError(std::string("plain matrix: ") + e.what());
  }
}

void append_json(std::string& out, const Json& v, int indent);

bool is_scalar(const Json& v) { return !v.is_array() && !v.is_object(); }

bool is_flat(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v) {
    if (is_scalar(e)) continue;
    if (!e.is_array()) return false;
    for (const auto& inner : e) {
      if (!is_scalar(inner)) return false;
    }
  }
  return true;
}

void append_inline(std::string& out, const Json& v) {
  if (v.is_array()) {
    out += '[';
    bool first = true;
    for (const auto& e : v) {
      if (!first) out += ", ";
      first = false;
      append_inline(out, e);
    }
    out += ']';
  } else {
    append_json(out, v, 0);
  }
}

void append_json(std::string& out, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  switch (v.type()) {
    case Json::value_t::number_float:
      out += format_number(v.get<double>());
      return;
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(key).dump();
        out += ": ";
        append_json(out, value, indent + 2);
      }
      out += '\n';
      out.append(static_cast<std::size_t>(indent), ' ');
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty() || is_flat(v)) {
        append_inline(out, v);
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        append_json(out, e, indent + 2);
      }
      out += '\n';
      out.append(static_cast<std::size_t>(indent), ' ');
      out += ']';
      return;
    }
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

MatrixXc matrix_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("matrix document must be an object");
  const Index rows = dimension_at(doc, "rows");
  const Index cols = dimension_at(doc, "cols");
  if (!doc.contains("data") || !doc["data"].is_array()) {
    throw ParseError("matrix document: \"data\" must be an array");
  }
  const Json& data = doc["data"];
  if (static_cast<Index>(data.size()) != rows * cols) {
    throw ParseError("matrix document: expected " + std::to_string(rows * cols) +
                     " entries, got " + std::to_string(data.size()));
  }
  MatrixXc m(rows, cols);
  for (Index k = 0; k < rows * cols; ++k) {
    const Json& entry = data[static_cast<std::size_t>(k)];
    if (!entry.is_array() || entry.size() != 2) {
      throw ParseError("matrix document: entry " + std::to_string(k) + " is not a [re, im] pair");
    }
    m(k / cols, k % cols) = Complex(number_at(entry[0], "real part"), number_at(entry[1], "imaginary part"));
  }
  return m;
}

MatrixXc parse_matrix_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw ParseError("empty matrix input");
  if (text[first] != '{') return parse_plain(text);

  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("payload") && doc["payload"].is_object() &&
      doc["payload"].contains("matrix")) {
    return matrix_from_json(doc["payload"]["matrix"]);
  }
  return matrix_from_json(doc);
}

std::string format_number(double x) {
  if (!std::isfinite(x)) throw Error("cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& value) {
  std::string out;
  append_json(out, value, 0);
  out += '\n';
  return out;
}

}  // namespace qfact
