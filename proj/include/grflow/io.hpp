#pragma once

// Serialization helpers shared by the CLI and the test drivers: shortest
// round-trip decimal formatting (so identical runs produce byte-identical
// files) and JSON views of the decomposed circle-invariant data.

#include "grflow/forms.hpp"
#include "grflow/tduality.hpp"

#include <json.hpp>

#include <charconv>
#include <string>

namespace grflow {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline json form_to_json(const Form& f) {
  json arr = json::array();
  for (int s = 0; s < f.components(); ++s) arr.push_back(f.raw(s));
  return arr;
}

inline Form form_from_json(const json& arr, int dim, int rank) {
  Form f(dim, rank);
  if (static_cast<int>(arr.size()) != f.components())
    throw std::invalid_argument("form component count mismatch");
  for (int s = 0; s < f.components(); ++s) f.raw(s) = arr[s].get<double>();
  return f;
}

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const json& rows) {
  const int m = static_cast<int>(rows.size());
  Matrix M(m, m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != m)
      throw std::invalid_argument("matrix rows must have equal length");
    for (int j = 0; j < m; ++j) M(i, j) = rows[i][j].get<double>();
  }
  return M;
}

// JSON layout of the canonical decomposed data. One-forms are listed by
// component, two-forms by canonical (i<j) slot in lexicographic order.
inline json config_to_json(const DecomposedConfig& d) {
  json j;
  j["m"] = d.a.dim();
  j["phi"] = d.phi;
  j["a"] = form_to_json(d.a);
  j["h"] = matrix_to_json(d.h);
  j["eta"] = form_to_json(d.eta);
  j["mu"] = form_to_json(d.mu);
  return j;
}

inline DecomposedConfig config_from_json(const json& j) {
  const int m = j.at("m").get<int>();
  if (m < 1 || m > kMaxBaseDim) throw std::invalid_argument("m out of range");
  DecomposedConfig d;
  d.phi = j.at("phi").get<double>();
  if (d.phi <= 0.0) throw std::runtime_error("degenerate fiber");
  d.a = form_from_json(j.at("a"), m, 1);
  d.h = matrix_from_json(j.at("h"));
  if (static_cast<int>(d.h.rows()) != m)
    throw std::invalid_argument("h dimension mismatch");
  d.eta = form_from_json(j.at("eta"), m, 1);
  d.mu = form_from_json(j.at("mu"), m, 2);
  return d;
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace grflow
