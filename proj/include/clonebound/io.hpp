// Copyright 2026 The clonebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON reading of families and tasks, and JSON/text/CSV rendering of
// reports.
//
// Family schema, Gram form:
//   {"n": 2, "priors": [0.5, 0.5],
//    "gram": [[{"re": 1, "im": 0}, {"re": 0.5, "im": 0}], ...]}
// Vector form:
//   {"vectors": [[{"re": 1, "im": 0}, {"re": 0, "im": 0}], ...],
//    "priors": [0.5, 0.5]}
// A task adds "M": <int> and "N": <int> | "inf". Plain numbers are accepted
// wherever a complex entry is expected.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clonebound/bounds.hpp"
#include "clonebound/error.hpp"
#include "clonebound/oracle.hpp"
#include "clonebound/states.hpp"

namespace clonebound::io {

using nlohmann::json;

/// Parsed task file: N is absent when the file omits it.
struct TaskSpec {
  PureStateFamily family;
  std::optional<int> m_copies;
  std::optional<CopyCount> n_copies;

  CloneTask clone_task() const {
    if (!m_copies) throw Error(ErrorKind::InvalidTask, "task needs \"M\"");
    if (!n_copies) throw Error(ErrorKind::InvalidTask, "task needs \"N\"");
    CloneTask t{family, *m_copies, *n_copies};
    t.validate();
    return t;
  }
};

namespace detail {

[[noreturn]] inline void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidInput, what);
}

inline Scalar to_scalar(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_object() && j.contains("re")) {
    const double re = j.at("re").get<double>();
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    return {re, im};
  }
  bad("expected a number or {\"re\": .., \"im\": ..}");
}

inline int to_positive_int(const json& j, const char* name) {
  if (!j.is_number_integer() && !(j.is_number() && std::floor(j.get<double>()) == j.get<double>())) {
    throw Error(ErrorKind::InvalidTask, std::string(name) + " must be an integer");
  }
  const auto v = j.get<long long>();
  if (v < 1 || v > 1'000'000) {
    throw Error(ErrorKind::InvalidTask, std::string(name) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline json to_json(Scalar z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) detail::bad("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) detail::bad("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = detail::to_scalar(j[i][k]);
  }
  return m;
}

inline PureStateFamily family_from_json(const json& j) {
  if (!j.is_object()) detail::bad("family must be a JSON object");
  if (!j.contains("priors")) throw Error(ErrorKind::BadPriors, "family needs \"priors\"");
  const auto priors = j.at("priors").get<std::vector<double>>();
  if (j.contains("vectors")) {
    std::vector<StateVector> vectors;
    for (const auto& v : j.at("vectors")) {
      StateVector sv;
      for (const auto& x : v) sv.push_back(detail::to_scalar(x));
      vectors.push_back(std::move(sv));
    }
    return family_from_vectors(std::move(vectors), priors);
  }
  if (j.contains("gram")) {
    const Mat gram = matrix_from_json(j.at("gram"));
    if (j.contains("n") && j.at("n").get<std::size_t>() != gram.rows()) {
      detail::bad("\"n\" does not match the gram matrix size");
    }
    return family_from_gram(gram, priors);
  }
  detail::bad("family needs \"gram\" or \"vectors\"");
}

inline json to_json(const PureStateFamily& f) {
  json j;
  j["n"] = f.size();
  j["priors"] = f.priors();
  if (f.has_vectors()) {
    json vs = json::array();
    for (const auto& v : *f.vectors()) {
      json row = json::array();
      for (const auto& x : v) row.push_back(to_json(x));
      vs.push_back(std::move(row));
    }
    j["vectors"] = std::move(vs);
  }
  j["gram"] = to_json(f.gram());
  return j;
}

inline TaskSpec task_from_json(const json& j) {
  TaskSpec t{family_from_json(j), std::nullopt, std::nullopt};
  if (j.contains("M")) t.m_copies = detail::to_positive_int(j.at("M"), "M");
  if (j.contains("N")) {
    const json& n = j.at("N");
    if (n.is_string()) {
      if (n.get<std::string>() != "inf") {
        throw Error(ErrorKind::InvalidTask, "N must be an integer or \"inf\"");
      }
      t.n_copies = CopyCount::infinite();
    } else {
      t.n_copies = CopyCount::finite(detail::to_positive_int(n, "N"));
    }
  }
  return t;
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline json signs_json(const SignPattern& p) { return p.signs; }

inline json diagnostics_json(const std::vector<LambdaDiagnostic>& diags) {
  json out = json::array();
  for (const auto& d : diags) {
    out.push_back({{"lambda", d.lambda.signs}, {"trace_norm", d.trace_norm},
                   {"feasible", d.feasible}});
  }
  return out;
}

inline json to_json(const BoundReport& r) {
  const Mat gram_out = column_gram(output_states(r));
  const Mat gram_in = column_gram(r.a_tilde);
  return json{
      {"fprime_opt", r.fprime_opt},
      {"fidelity_lower_bound", r.fidelity_lower_bound},
      {"lambda", signs_json(r.lambda_chosen)},
      {"feasible", r.feasible},
      {"coefficients", to_json(r.coeffs)},
      {"v_opt", to_json(r.v_opt)},
      {"output_gram_residual", frobenius_norm(gram_out - gram_in)},
      {"rank_inputs", r.rank_inputs},
      {"rank_targets", r.rank_targets},
      {"diagnostics", diagnostics_json(r.diagnostics)},
  };
}

inline json to_json(const EstimationReport& r) {
  return json{
      {"p_lower_bound", r.p_lower_bound},
      {"fprime_opt", r.fprime_opt},
      {"lambda", signs_json(r.lambda_chosen)},
      {"feasible", r.feasible},
      {"correct_probs", r.correct_probs},
      {"achieved_p", r.achieved_p},
      {"e_matrix", to_json(r.e_mat)},
      {"e_residual", r.e_residual},
      {"diagnostics", diagnostics_json(r.diagnostics)},
  };
}

inline json to_json(const oracle::OracleResult& r) {
  return json{
      {"f_opt_numeric", r.f_opt_numeric},
      {"restarts_used", r.restarts_used},
      {"converged", r.converged},
      {"best_restart_index", r.best_restart_index},
      {"v_best", to_json(r.v_best)},
  };
}

/// %.<digits>g rendering.
inline std::string format_number(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Flat "key: value" rendering of the scalar and vector fields of a report;
/// matrices are skipped.
inline std::string to_text(const json& report, int digits = 9) {
  std::ostringstream out;
  for (const auto& [key, value] : report.items()) {
    if (value.is_number_float()) {
      out << key << ": " << format_number(value.get<double>(), digits) << '\n';
    } else if (value.is_boolean() || value.is_number_integer() || value.is_string()) {
      out << key << ": " << value.dump() << '\n';
    } else if (value.is_array() && !value.empty() && value.front().is_number()) {
      out << key << ":";
      for (const auto& x : value) {
        out << ' '
            << (x.is_number_float() ? format_number(x.get<double>(), digits) : x.dump());
      }
      out << '\n';
    } else if (value.is_object()) {
      out << key << ":\n";
      std::istringstream nested(to_text(value, digits));
      for (std::string line; std::getline(nested, line);) out << "  " << line << '\n';
    }
  }
  return out.str();
}

}  // namespace clonebound::io
