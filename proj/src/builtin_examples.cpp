#include "bqsos/builtin_examples.hpp"

namespace bqsos {

namespace {

Problem named(const std::string& name, const std::string& provenance, const Quartic2x2& q) {
  Problem p;
  p.name = name;
  p.provenance = provenance;
  p.m = p.n = 2;
  p.named_2x2 = q;
  return p;
}

Problem listed(const std::string& name, const std::string& provenance, int m, int n, EntryMode mode,
               std::vector<Entry> entries) {
  Problem p;
  p.name = name;
  p.provenance = provenance;
  p.m = m;
  p.n = n;
  p.entry_mode = mode;
  p.entries = std::move(entries);
  return p;
}

std::vector<BuiltinExample> make() {
  std::vector<BuiltinExample> out;
  out.push_back({"qi-page-358",
                 "2x2 SOS form whose flattening B has a negative eigenvalue; M(gamma = -3) is positive definite",
                 listed("qi-page-358", "published worked example (2x2 tensor, listed by symmetric-orbit representatives)",
                        2, 2, EntryMode::SymmetricTensor,
                        {{1, 1, 1, 1, 1}, {1, 1, 1, 2, 2}, {1, 1, 2, 2, 4}, {1, 2, 1, 2, 12},
                         {2, 1, 2, 1, 12}, {1, 2, 2, 2, 1}, {1, 1, 2, 1, 2}, {2, 1, 2, 2, 1},
                         {2, 2, 2, 2, 2}})});
  {
    Quartic2x2 q;
    q.a11 = 1.2;
    q.a12 = 1;
    q.a21 = 1;
    q.a22 = 6;
    q.cx1 = -2;
    q.cy1 = -2;
    out.push_back({"case3-example",
                   "two neighbor half-cross terms, no full-cross term; a22 = 6 above the threshold 5",
                   named("case3-example", "published worked example (two half-cross terms)", q)});
  }
  out.push_back({"choi-3x3",
                 "sum x_i^2 y_i^2 - 2 sum_{i<j} x_i x_j y_i y_j + 2 (x1^2 y2^2 + x2^2 y3^2 + x3^2 y1^2): "
                 "positive semidefinite but not a sum of squares",
                 listed("choi-3x3", "literature: M.-D. Choi, Positive semidefinite biquadratic forms, Linear Algebra Appl. 12 (1975)",
                        3, 3, EntryMode::Terms,
                        {{1, 1, 1, 1, 1}, {2, 2, 2, 2, 1}, {3, 3, 3, 3, 1},
                         {1, 1, 2, 2, -2}, {2, 2, 3, 3, -2}, {1, 1, 3, 3, -2},
                         {1, 2, 1, 2, 2}, {2, 3, 2, 3, 2}, {3, 1, 3, 1, 2}})});
  {
    Quartic2x2 q;
    q.a11 = q.a12 = q.a21 = q.a22 = 1;
    q.b = -4;
    out.push_back({"case1-boundary", "no half-cross terms, sqrt(a11 a22) + sqrt(a12 a21) = |b|/2 exactly",
                   named("case1-boundary", "generated regression instance", q)});
    q.b = -5;
    out.push_back({"case1-not-psd", "no half-cross terms, sqrt(a11 a22) + sqrt(a12 a21) < |b|/2",
                   named("case1-not-psd", "generated regression instance", q)});
  }
  {
    Quartic2x2 q;
    q.a11 = -1;
    q.a12 = q.a21 = q.a22 = 1;
    out.push_back({"negative-diagonal", "a11 = -1: refuted at x = y = e1",
                   named("negative-diagonal", "generated regression instance", q)});
  }
  {
    Quartic2x2 q;
    q.a12 = q.a21 = q.a22 = 1;
    out.push_back({"missing-corner", "a1111 = 0, so pivot (1, 1) gives a tripartite form with h0 = 0",
                   named("missing-corner", "generated regression instance", q)});
  }
  return out;
}

}  // namespace

const std::vector<BuiltinExample>& builtin_examples() {
  static const std::vector<BuiltinExample> examples = make();
  return examples;
}

const BuiltinExample* find_builtin(const std::string& name) {
  const std::string& key = name == "indefinite-flattening" ? std::string("qi-page-358") : name;
  for (const auto& e : builtin_examples())
    if (e.name == key) return &e;
  return nullptr;
}

}  // namespace bqsos
