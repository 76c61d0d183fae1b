#pragma once

// JSON tuple documents.
//   {"scalar": "float64", "r": 2, "matrices": [[[[1,0],[0,0]], [[0,0],[-1,0]]], ...]}
// Float entries are [re, im] pairs, exact entries {"re": "p/q", "im": "p/q"}.
// The canonical text is the compact dump with keys in the order above.

#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "mat2gen/errors.hpp"
#include "mat2gen/mat2.hpp"
#include "mat2gen/random.hpp"

namespace mat2gen {

inline constexpr std::string_view document_schema_version = "1.0.0";

struct TupleDocument {
  AnyTuple tuple;

  Backend backend() const { return std::holds_alternative<FTuple>(tuple) ? Backend::floating : Backend::exact; }
  std::size_t r() const {
    return std::visit([](const auto& t) { return t.r(); }, tuple);
  }
  friend bool operator==(const TupleDocument& a, const TupleDocument& b) { return a.tuple == b.tuple; }
};

namespace detail {

// + 0.0 folds negative zero so canonical text has a single zero
inline nlohmann::ordered_json entry_json(const Cplx& z) {
  return nlohmann::ordered_json::array({z.real() + 0.0, z.imag() + 0.0});
}

inline nlohmann::ordered_json entry_json(const GaussRational& z) {
  nlohmann::ordered_json j;
  j["re"] = z.real().get_str();
  j["im"] = z.imag().get_str();
  return j;
}

[[noreturn]] inline void doc_fail(const std::string& path, const std::string& what) {
  throw document_error("invalid tuple document at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline Cplx parse_float_entry(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) doc_fail(path, "expected a [re, im] number pair");
  if (!j[0].is_number() || !j[1].is_number()) doc_fail(path, "entries of a [re, im] pair must be numbers");
  const Cplx z{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) doc_fail(path, "non-finite entry");
  return z;
}

inline GaussRational parse_exact_entry(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 2 || !j.contains("re") || !j.contains("im"))
    doc_fail(path, R"(expected {"re": "p/q", "im": "p/q"})");
  mpq_class parts[2];
  const char* keys[2] = {"re", "im"};
  for (int k = 0; k < 2; ++k) {
    const auto& v = j[keys[k]];
    if (!v.is_string()) doc_fail(path + "/" + keys[k], "rational must be a string \"p\" or \"p/q\"");
    try {
      parts[k] = parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      doc_fail(path + "/" + keys[k], e.what());
    }
  }
  return {parts[0], parts[1]};
}

template <class S, class F>
MatTuple<S> parse_matrices(const nlohmann::json& ms, std::size_t r, F entry) {
  std::vector<Mat2<S>> out;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string p = "/matrices/" + std::to_string(i);
    const auto& m = ms[i];
    if (!m.is_array() || m.size() != 2) doc_fail(p, "expected a 2x2 array of rows");
    S e[4];
    for (std::size_t row = 0; row < 2; ++row) {
      const std::string pr = p + "/" + std::to_string(row);
      if (!m[row].is_array() || m[row].size() != 2) doc_fail(pr, "expected a row of two entries");
      for (std::size_t col = 0; col < 2; ++col) e[2 * row + col] = entry(m[row][col], pr + "/" + std::to_string(col));
    }
    out.push_back({e[0], e[1], e[2], e[3]});
  }
  if (out.size() != r) doc_fail("/matrices", "length " + std::to_string(out.size()) + " does not match r = " + std::to_string(r));
  return MatTuple<S>(std::move(out));
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const TupleDocument& d) {
  nlohmann::ordered_json j;
  j["scalar"] = std::string(to_string(d.backend()));
  j["r"] = d.r();
  auto ms = nlohmann::ordered_json::array();
  std::visit(
      [&](const auto& t) {
        for (const auto& m : t)
          ms.push_back({{detail::entry_json(m.a), detail::entry_json(m.b)}, {detail::entry_json(m.c), detail::entry_json(m.d)}});
      },
      d.tuple);
  j["matrices"] = std::move(ms);
  return j;
}

inline std::string serialize(const TupleDocument& d) { return to_json(d).dump(); }

inline TupleDocument document_from_json(const nlohmann::json& j) {
  using detail::doc_fail;
  if (!j.is_object()) doc_fail("", "expected an object");
  for (const auto& [key, _] : j.items())
    if (key != "scalar" && key != "r" && key != "matrices") doc_fail("/" + key, "unknown field");
  if (!j.contains("scalar") || !j["scalar"].is_string()) doc_fail("/scalar", "missing or not a string");
  if (!j.contains("r") || !j["r"].is_number_integer()) doc_fail("/r", "missing or not an integer");
  if (!j.contains("matrices") || !j["matrices"].is_array()) doc_fail("/matrices", "missing or not an array");
  const auto r = j["r"].get<long long>();
  if (r < 1) doc_fail("/r", "r must be at least 1");
  const std::string scalar = j["scalar"].get<std::string>();
  if (scalar == to_string(Backend::floating))
    return {detail::parse_matrices<Cplx>(j["matrices"], static_cast<std::size_t>(r), detail::parse_float_entry)};
  if (scalar == to_string(Backend::exact))
    return {detail::parse_matrices<GaussRational>(j["matrices"], static_cast<std::size_t>(r), detail::parse_exact_entry)};
  doc_fail("/scalar", "unknown scalar '" + scalar + "' (expected float64 or gaussian-rational)");
}

/// Parse a document; syntax errors report line and column.
inline TupleDocument parse_document(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw document_error(std::string("malformed JSON: ") + e.what());
  }
  return document_from_json(j);
}

}  // namespace mat2gen
