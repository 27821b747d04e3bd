#pragma once

// Independent checks: polynomial reconstruction from an SOS decomposition,
// coefficient comparison, and a sampling oracle that can refute (never prove)
// positive semidefiniteness. Points are always sampled on the bilinear manifold
// z = x ⊗ y with x and y on their unit spheres.

#include <cstdint>
#include <optional>

#include "bqsos/biquad.hpp"

namespace bqsos {

/// Expands Σ_t (c_tᵀ(x⊗y))² into the canonical coefficient tensor.
BiquadraticForm reconstruct(const SosDecomposition& d);

struct FormComparison {
  bool equal = false;
  double max_abs_diff = 0.0;
};

/// Compares polynomial (monomial) coefficients, so forms differing only in how
/// full-cross coefficients are spread over tensor slots compare equal.
FormComparison compare_forms(const BiquadraticForm& f, const BiquadraticForm& g, double tol);

enum class PsdTag { NoCounterexampleFound, Refuted };

struct Counterexample {
  Vector x;
  Vector y;
  double value = 0.0;
};

struct PsdVerdict {
  PsdTag tag = PsdTag::NoCounterexampleFound;
  std::size_t samples_used = 0;
  std::optional<Counterexample> counterexample;
};

enum SampleStrategy : unsigned {
  kStructured = 1u << 0,  ///< basis vectors, ±1 patterns, pairwise combinations (+ angle grid for 2x2)
  kUniform = 1u << 1,     ///< independent uniform points on the two unit spheres
  kPolish = 1u << 2,      ///< alternating minimization from the lowest samples
  kAllStrategies = kStructured | kUniform | kPolish,
};

struct SampleOptions {
  std::size_t budget = 100000;
  double abs_tol = 1e-10;
  unsigned strategies = kAllStrategies;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Refuted only with a point whose value, recomputed by evaluate(), is below -abs_tol.
PsdVerdict sample_psd_check(const BiquadraticForm& f, const SampleOptions& opts = {});

/// Re-evaluates a candidate with evaluate() on the normalized point; returns it
/// if the value is below -abs_tol.
std::optional<Counterexample> confirm_counterexample(const BiquadraticForm& f, const Vector& x,
                                                     const Vector& y, double abs_tol);

}  // namespace bqsos
