#include "bqsos/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bqsos/errors.hpp"

namespace bqsos {

using nlohmann::json;

namespace {

const std::set<std::string> kProblemKeys = {"format_version", "m", "n", "convention", "entry_mode",
                                            "entries", "named_2x2", "name", "provenance"};
const char* kNamed[] = {"a11", "a12", "a21", "a22", "b", "cx1", "cx2", "cy1", "cy2"};

double* named_slot(Quartic2x2& q, const std::string& key) {
  if (key == "a11") return &q.a11;
  if (key == "a12") return &q.a12;
  if (key == "a21") return &q.a21;
  if (key == "a22") return &q.a22;
  if (key == "b") return &q.b;
  if (key == "cx1") return &q.cx1;
  if (key == "cx2") return &q.cx2;
  if (key == "cy1") return &q.cy1;
  if (key == "cy2") return &q.cy2;
  return nullptr;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidCoefficient(what + " is not finite");
  return v;
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ParseError(what + " must be an integer");
  return j.get<int>();
}

}  // namespace

BiquadraticForm Problem::form() const {
  if (named_2x2) return from_quartic2x2(*named_2x2);
  return from_entries(m, n, entries, convention, entry_mode);
}

Problem problem_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("problem must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kProblemKeys.count(key)) throw ParseError("unknown problem field \"" + key + "\"");
  Problem p;
  if (j.contains("format_version")) {
    if (!j["format_version"].is_string()) throw ParseError("format_version must be a string");
    p.format_version = j["format_version"].get<std::string>();
    if (p.format_version != kFormatVersion)
      throw ParseError("unsupported format_version \"" + p.format_version + "\"");
  }
  if (j.contains("name")) p.name = j["name"].get<std::string>();
  if (j.contains("provenance")) p.provenance = j["provenance"].get<std::string>();

  const bool has_entries = j.contains("entries"), has_named = j.contains("named_2x2");
  if (has_entries == has_named) throw ParseError("exactly one of entries / named_2x2 is required");

  if (has_named) {
    p.m = j.contains("m") ? integer(j["m"], "m") : 2;
    p.n = j.contains("n") ? integer(j["n"], "n") : 2;
    if (p.m != 2 || p.n != 2) throw DimensionError("named_2x2 requires m = n = 2");
    const json& nj = j["named_2x2"];
    if (!nj.is_object()) throw ParseError("named_2x2 must be an object");
    Quartic2x2 q;
    for (const auto& [key, value] : nj.items()) {
      double* slot = named_slot(q, key);
      if (!slot) throw ParseError("unknown named_2x2 coefficient \"" + key + "\"");
      *slot = number(value, "named_2x2." + key);
    }
    p.named_2x2 = q;
    return p;
  }

  if (!j.contains("m") || !j.contains("n")) throw ParseError("m and n are required");
  p.m = integer(j["m"], "m");
  p.n = integer(j["n"], "n");
  if (p.m < 1 || p.n < 1) throw DimensionError("m and n must be positive");
  if (j.contains("convention")) {
    const std::string c = j["convention"].get<std::string>();
    if (c == "interleaved") p.convention = Convention::Interleaved;
    else if (c == "blockwise") p.convention = Convention::Blockwise;
    else throw ParseError("convention must be \"interleaved\" or \"blockwise\"");
  }
  if (j.contains("entry_mode")) {
    const std::string e = j["entry_mode"].get<std::string>();
    if (e == "terms") p.entry_mode = EntryMode::Terms;
    else if (e == "symmetric") p.entry_mode = EntryMode::SymmetricTensor;
    else throw ParseError("entry_mode must be \"terms\" or \"symmetric\"");
  }
  const json& ej = j["entries"];
  if (!ej.is_array()) throw ParseError("entries must be an array");
  for (std::size_t s = 0; s < ej.size(); ++s) {
    const json& e = ej[s];
    const std::string where = "entries[" + std::to_string(s) + "]";
    if (!e.is_array() || e.size() != 5) throw ParseError(where + " must be [i, j, k, l, value]");
    p.entries.push_back(Entry{integer(e[0], where), integer(e[1], where), integer(e[2], where),
                              integer(e[3], where), number(e[4], where)});
  }
  p.form();  // validates indices and values
  return p;
}

Problem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed problem: ") + e.what());
  }
}

Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

json problem_to_json(const Problem& p) {
  json j;
  j["format_version"] = p.format_version;
  if (!p.name.empty()) j["name"] = p.name;
  if (!p.provenance.empty()) j["provenance"] = p.provenance;
  j["m"] = p.m;
  j["n"] = p.n;
  if (p.named_2x2) {
    j["named_2x2"] = quartic_to_json(*p.named_2x2);
    return j;
  }
  j["convention"] = p.convention == Convention::Interleaved ? "interleaved" : "blockwise";
  j["entry_mode"] = p.entry_mode == EntryMode::Terms ? "terms" : "symmetric";
  json entries = json::array();
  for (const Entry& e : p.entries) entries.push_back({e.i, e.j, e.k, e.l, e.value});
  j["entries"] = entries;
  return j;
}

SosDecomposition sos_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("terms"))
      throw ParseError("SOS file needs m, n and terms");
    SosDecomposition d;
    d.m = integer(j["m"], "m");
    d.n = integer(j["n"], "n");
    if (d.m < 1 || d.n < 1) throw DimensionError("m and n must be positive");
    const json& tj = j["terms"];
    if (!tj.is_array()) throw ParseError("terms must be an array");
    for (std::size_t s = 0; s < tj.size(); ++s) {
      const json& t = tj[s];
      if (!t.is_array() || static_cast<int>(t.size()) != d.m * d.n)
        throw DimensionError("terms[" + std::to_string(s) + "] must have m*n entries");
      Vector v(d.m * d.n);
      for (int k = 0; k < d.m * d.n; ++k) v(k) = number(t[k], "terms[" + std::to_string(s) + "]");
      d.terms.push_back(v);
    }
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed SOS file: ") + e.what());
  }
}

SosDecomposition load_sos(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return sos_from_json(j);
}

json sos_to_json(const SosDecomposition& d) {
  json terms = json::array();
  for (const Vector& t : d.terms) terms.push_back(vector_to_json(t));
  return {{"m", d.m}, {"n", d.n}, {"terms", terms}};
}

json quartic_to_json(const Quartic2x2& q) {
  Quartic2x2 copy = q;
  json j = json::object();
  for (const char* key : kNamed) j[key] = *named_slot(copy, key);
  return j;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_to_json(const Matrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i).transpose()));
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bqsos
