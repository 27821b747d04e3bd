#pragma once

// Tripartite quartics: substitute x_p ← z, y_q ← z in an m x n biquadratic
// form and collect by powers of z,
//   h(x, y, z) = h0 z⁴ + h1(w) z³ + h2(w) z² + h3(w) z + h4(x, y),  w = (x, y),
// where x, y are the remaining m-1 and n-1 variables.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bqsos/biquad.hpp"

namespace bqsos {

struct TripartiteQuartic {
  int p = 0;  ///< x-block size (m - 1)
  int q = 0;  ///< y-block size (n - 1)
  /// 1-based positions the flexible variable occupies in the biquadratic form.
  int pivot_i = 0;
  int pivot_j = 0;

  double h0 = 0.0;
  Vector h1;  ///< length p + q, coefficients of w_s z³
  Matrix h2;  ///< symmetric (p+q) x (p+q); h2(w) = wᵀ h2 w
  Matrix h3x;  ///< p x q(q+1)/2: x_a y_b y_c z with b <= c (column = sym_pair(b, c, q))
  Matrix h3y;  ///< p(p+1)/2 x q: x_a x_b y_c z with a <= b (row = sym_pair(a, b, p))
  BiquadraticForm h4{1, 1};

  double h2_value(const Vector& x, const Vector& y) const;
  double h3_value(const Vector& x, const Vector& y) const;
};

/// Pivots are 1-based; defaults (0) mean the last index.
TripartiteQuartic to_tripartite(const BiquadraticForm& f, int pivot_i = 0, int pivot_j = 0);

/// Homogenizes back, putting x_{pivot_i} and y_{pivot_j} where they came from.
BiquadraticForm from_tripartite(const TripartiteQuartic& h);

double evaluate(const TripartiteQuartic& h, const Vector& x, const Vector& y, double z);

enum class TripartiteTag { Nondegenerate, Degenerate, RefutedPsd, Indeterminate };

const char* tag_name(TripartiteTag tag);

struct TripartiteWitness {
  Vector x;
  Vector y;
  double z = 0.0;
  double value = 0.0;
};

enum class CheckState { Passed, Failed, NoCounterexampleFound, Skipped };

const char* state_name(CheckState state);

struct ConditionCheck {
  std::string name;  ///< "h0", "h1_zero", "h2_psd", "h4_psd", "composite_psd"
  CheckState state = CheckState::Skipped;
  std::optional<TripartiteWitness> witness;
  std::string note;
};

struct TripartiteClass {
  TripartiteTag tag = TripartiteTag::Indeterminate;
  std::vector<ConditionCheck> details;
};

struct ClassifyOptions {
  std::size_t budget = 100000;
  std::uint64_t seed = 0;
  double abs_tol = 1e-10;
  unsigned threads = 1;
};

TripartiteClass classify(const TripartiteQuartic& h, const ClassifyOptions& opts = {});

/// 1-based pivots (i, j) with a_ijij = 0, i.e. the choices giving h0 = 0.
std::vector<std::pair<int, int>> h0_zero_criterion(const BiquadraticForm& f);

}  // namespace bqsos
