#pragma once

// SOS membership through the max-min eigenvalue criterion: f is SOS iff some
// Γ makes M(Γ) = B + P(Γ) positive semidefinite. λ_min(M(Γ)) is concave in Γ,
// so it is maximized by supergradient ascent, optionally finished by a
// log-barrier Newton refinement when the ascent stalls.

#include <vector>

#include "bqsos/biquad.hpp"

namespace bqsos {

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

/// Algebraically smallest eigenpair of a symmetric matrix.
/// Throws NotSymmetric when the skew part exceeds 1e-12 * max(1, |M|_max).
EigenPair min_eig(const Matrix& m);

enum class SolveStatus { SosCertified, Inconclusive };

enum class StepRule {
  Polyak,             ///< supergradient ascent only
  PolyakThenBarrier,  ///< ascent, then barrier Newton refinement from the best iterate
};

struct SolveOptions {
  int max_iters = 5000;
  /// Certification threshold on λ_min, relative to |B|_max (absolute for B = 0).
  double psd_tol = 1e-9;
  /// Eigenvalues within this (relative) distance of λ_min share the supergradient.
  double eigengap_tol = 1e-8;
  StepRule step_rule = StepRule::PolyakThenBarrier;
};

struct HistoryPoint {
  int iteration = 0;
  double lambda_min = 0.0;  ///< best value seen so far
};

struct SolveResult {
  GammaMatrix gamma{1, 1};
  double lambda_min = 0.0;
  SolveStatus status = SolveStatus::Inconclusive;
  int iterations = 0;
  int ascent_iterations = 0;
  int newton_iterations = 0;
  /// Upper bound on max_Γ λ_min from the barrier's duality gap (+inf if unknown).
  double lambda_upper_bound = 0.0;
  double scale = 1.0;
  std::vector<HistoryPoint> history;
};

SolveResult solve_gamma(const BiquadraticForm& f, const SolveOptions& opts = {});

enum class Factorization {
  Spectral,         ///< eigen-decomposition, mutually orthogonal terms
  PivotedCholesky,  ///< diagonally pivoted triangular factor
};

/// M ≈ Σ_t c_t c_tᵀ with at most mn terms. Throws NotPsd when
/// λ_min(M) < -psd_tol * |M|_max.
SosDecomposition extract_sos(const Matrix& m, int rows, int cols, double psd_tol,
                             Factorization route = Factorization::Spectral);

/// extract_sos on M(result.gamma), with the certification threshold of the solve
/// (relative to |B|_max) carried over to M.
SosDecomposition extract_certified(const BiquadraticForm& f, const SolveResult& result,
                                   double psd_tol, Factorization route = Factorization::Spectral);

/// Number of terms with max-norm above 1e-12.
int sos_rank(const SosDecomposition& d);

}  // namespace bqsos
