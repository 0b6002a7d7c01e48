#pragma once

// A job: one JSON document describing the field, the matrix and the
// parameters of a command.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "phimod/canonical.hpp"
#include "phimod/errors.hpp"
#include "phimod/literal.hpp"
#include "phimod/phimodule.hpp"

namespace phimod {

struct JobSpec {
  FieldSpec field{2};
  int d = 0;
  std::optional<SeriesMatrix> A, B, h;
  std::optional<Exp> n;
  Exp precision = kDefaultPrecision;
  std::optional<Coweight> nu;
  std::optional<Exp> e, height;
  int ext = 1;
  std::optional<Exp> radius;
  std::optional<std::string> mode, format;
  std::optional<double> box_limit;
  std::optional<int> depth;
  std::optional<Exp> threshold;
};

namespace detail {

inline const std::set<std::string>& job_keys() {
  static const std::set<std::string> keys{"p",      "r",     "modulus", "coeff_frobenius", "d",      "A",
                                          "B",      "h",     "n",       "precision",       "nu",     "e",
                                          "height", "ext",   "radius",  "mode",            "format", "box_limit",
                                          "depth",  "threshold"};
  return keys;
}

// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + key + "': wrong type");
  }
}

inline SeriesMatrix parse_matrix(const FieldSpec& f, const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string("field '") + key + "': expected a non-empty array of rows");
  const std::size_t d = j.size();
  std::vector<std::vector<LaurentSeries>> rows;
  for (std::size_t i = 0; i < d; ++i) {
    if (!j[i].is_array() || j[i].size() != d)
      throw ParseError(std::string("field '") + key + "': row " + std::to_string(i) + " must have " + std::to_string(d) +
                       " entries");
    rows.emplace_back();
    for (std::size_t k = 0; k < d; ++k) {
      const auto& x = j[i][k];
      std::string lit;
      if (x.is_string())
        lit = x.get<std::string>();
      else if (x.is_number_integer())
        lit = std::to_string(x.get<long long>());
      else
        throw ParseError(std::string("field '") + key + "'[" + std::to_string(i) + "][" + std::to_string(k) +
                         "]: expected a series literal");
      try {
        rows.back().push_back(parse_series(f, lit));
      } catch (const ParseError& err) {
        throw ParseError(std::string("field '") + key + "'[" + std::to_string(i) + "][" + std::to_string(k) +
                         "]: " + err.what());
      }
    }
  }
  return SeriesMatrix::from_rows(f, rows);
}

}  // namespace detail

inline JobSpec parse_job(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    const auto [line, col] = detail::line_col(text, err.byte == 0 ? 0 : err.byte - 1);
    throw ParseError("invalid JSON", line, col);
  }
  if (!j.is_object()) throw ParseError("job must be a JSON object");
  for (const auto& item : j.items())
    if (!detail::job_keys().count(item.key())) throw ParseError("unknown key '" + item.key() + "'");
  if (!j.contains("p")) throw ValidationError("missing key 'p'");

  JobSpec job;
  const int p = detail::get_field<int>(j, "p");
  const int r = j.contains("r") ? detail::get_field<int>(j, "r") : 1;
  const bool cf = j.contains("coeff_frobenius") && detail::get_field<bool>(j, "coeff_frobenius");
  if (r < 1) throw ValidationError("r must be >= 1");
  std::vector<int> modulus;
  if (j.contains("modulus")) modulus = detail::get_field<std::vector<int>>(j, "modulus");
  if (r > 1 && modulus.empty()) {
    if (!detail::is_prime(p)) throw ValidationError("p must be prime");
    throw ValidationError("modulus required for r>1");
  }
  job.field = FieldSpec(p, modulus, cf);
  if (job.field.r() != r) throw ValidationError("modulus degree does not match r");

  if (j.contains("precision")) job.precision = detail::get_field<Exp>(j, "precision");
  if (job.precision < 1) throw ValidationError("precision must be positive");
  if (j.contains("A")) job.A = detail::parse_matrix(job.field, j["A"], "A");
  if (j.contains("B")) job.B = detail::parse_matrix(job.field, j["B"], "B");
  if (j.contains("h")) job.h = detail::parse_matrix(job.field, j["h"], "h");
  if (j.contains("d")) {
    job.d = detail::get_field<int>(j, "d");
    if (job.d < 1) throw ValidationError("d must be >= 1");
  }
  for (const auto* m : {&job.A, &job.B, &job.h}) {
    if (!*m) continue;
    if (job.d == 0) job.d = (*m)->d();
    if ((*m)->d() != job.d) throw ValidationError("matrix size does not match d = " + std::to_string(job.d));
  }
  for (const auto* m : {&job.A, &job.B, &job.h}) {
    if (!*m) continue;
    const LaurentSeries dt = det(**m);
    if (dt.is_zero()) throw ValidationError("matrix is not invertible at the stated precision");
  }

  if (j.contains("n")) job.n = detail::get_field<Exp>(j, "n");
  if (j.contains("nu")) {
    const auto& x = j["nu"];
    try {
      if (x.is_string())
        job.nu = Coweight::parse(x.get<std::string>());
      else
        job.nu = Coweight(x.get<std::vector<Exp>>());
    } catch (const nlohmann::json::exception&) {
      throw ParseError("field 'nu': expected \"a,b,...\" or an integer array");
    }
  }
  if (j.contains("e")) job.e = detail::get_field<Exp>(j, "e");
  if (j.contains("height")) job.height = detail::get_field<Exp>(j, "height");
  if (j.contains("ext")) job.ext = detail::get_field<int>(j, "ext");
  if (job.ext < 1) throw ValidationError("ext must be >= 1");
  if (j.contains("radius")) job.radius = detail::get_field<Exp>(j, "radius");
  if (j.contains("mode")) {
    job.mode = detail::get_field<std::string>(j, "mode");
    if (*job.mode != "open" && *job.mode != "closed") throw ValidationError("mode must be open or closed");
  }
  if (j.contains("format")) {
    job.format = detail::get_field<std::string>(j, "format");
    if (*job.format != "dot" && *job.format != "json") throw ValidationError("format must be dot or json");
  }
  if (j.contains("box_limit")) job.box_limit = detail::get_field<double>(j, "box_limit");
  if (j.contains("depth")) job.depth = detail::get_field<int>(j, "depth");
  if (j.contains("threshold")) job.threshold = detail::get_field<Exp>(j, "threshold");
  return job;
}

}  // namespace phimod
