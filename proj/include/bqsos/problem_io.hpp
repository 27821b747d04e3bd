#pragma once

// JSON problem and SOS files.
//
// Problem:  {"format_version": "1", "m": 2, "n": 2,
//            "convention": "interleaved" | "blockwise",
//            "entry_mode": "terms" | "symmetric",
//            "entries": [[i, j, k, l, value], ...]}       (1-based indices)
//        or {"format_version": "1", "m": 2, "n": 2, "named_2x2": {"a11": ..., "cy2": ...}}
// Optional "name" and "provenance" strings are carried along.
//
// SOS:      {"m": 2, "n": 2, "terms": [[mn reals], ...]}

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bqsos/biquad.hpp"

namespace bqsos {

inline constexpr const char* kFormatVersion = "1";

struct Problem {
  std::string format_version = kFormatVersion;
  int m = 0;
  int n = 0;
  Convention convention = Convention::Interleaved;
  EntryMode entry_mode = EntryMode::Terms;
  std::vector<Entry> entries;
  std::optional<Quartic2x2> named_2x2;
  std::string name;
  std::string provenance;

  BiquadraticForm form() const;
};

/// Throws ParseError on malformed input (and the biquad_core errors on bad entries).
Problem problem_from_json(const nlohmann::json& j);
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);
nlohmann::json problem_to_json(const Problem& p);

SosDecomposition sos_from_json(const nlohmann::json& j);
SosDecomposition load_sos(const std::string& path);
nlohmann::json sos_to_json(const SosDecomposition& d);

nlohmann::json quartic_to_json(const Quartic2x2& q);
nlohmann::json vector_to_json(const Vector& v);
nlohmann::json matrix_to_json(const Matrix& m);

std::string read_file(const std::string& path);

}  // namespace bqsos
