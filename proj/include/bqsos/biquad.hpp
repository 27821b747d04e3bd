#pragma once

// Biquadratic forms f(x, y) = Σ a_ijkl x_i y_j x_k y_l over x ∈ R^m, y ∈ R^n.
//
// The coefficient tensor is stored flattened: a_ijkl sits at row i*n + j,
// column k*n + l of an mn x mn matrix B, so f(x, y) = zᵀ B z with z = x ⊗ y.
// Pair symmetry a_ijkl = a_klij is exactly the symmetry of B.
//
// Indices in this header are 0-based except where noted (Entry, pair_index),
// which follow the 1-based convention of problem files.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace bqsos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Index layout of a coefficient entry supplied by the caller.
enum class Convention {
  Interleaved,  ///< (i, j, k, l) multiplies x_i y_j x_k y_l
  Blockwise,    ///< (i, j, k, l) multiplies x_i x_j y_k y_l
};

/// How a list of entries is turned into a tensor.
enum class EntryMode {
  /// Each entry adds value * monomial to the polynomial; the tensor is then
  /// pair-symmetrized by averaging a_ijkl with a_klij.
  Terms,
  /// Entries describe a fully symmetric tensor by orbit representatives
  /// (a_ijkl = a_klij = a_kjil = a_ilkj). Every slot of an orbit receives the
  /// mean of the listed values in that orbit.
  SymmetricTensor,
};

/// One coefficient, 1-based indices.
struct Entry {
  int i, j, k, l;
  double value;
};

class BiquadraticForm {
 public:
  BiquadraticForm() : BiquadraticForm(1, 1) {}
  /// Zero form.
  BiquadraticForm(int m, int n);

  /// Wraps a flattened matrix, averaging it with its transpose.
  static BiquadraticForm from_flattened(int m, int n, const Matrix& b);

  int m() const { return m_; }
  int n() const { return n_; }
  int dim() const { return m_ * n_; }

  /// a_ijkl, 0-based.
  double operator()(int i, int j, int k, int l) const { return b_(i * n_ + j, k * n_ + l); }

  /// The flattened mn x mn matrix B (exactly symmetric).
  const Matrix& flattened() const { return b_; }

  double max_abs_coefficient() const;

  bool operator==(const BiquadraticForm& other) const;

 private:
  int m_;
  int n_;
  Matrix b_;
};

BiquadraticForm from_entries(int m, int n, std::span<const Entry> entries,
                             Convention convention = Convention::Interleaved,
                             EntryMode mode = EntryMode::Terms);

/// Exact polynomial value via the four-index sum.
double evaluate(const BiquadraticForm& f, std::span<const double> x, std::span<const double> y);
double evaluate(const BiquadraticForm& f, const Vector& x, const Vector& y);

Vector kron(const Vector& x, const Vector& y);

/// B = the flattened coefficient tensor.
Matrix flatten_b(const BiquadraticForm& f);

/// 1-based index t_{ab} of the unordered pair {a, b}, a != b, among C(size, 2) pairs.
int pair_index(int a, int b);

inline int choose2(int k) { return k * (k - 1) / 2; }

/// Free parameters redistributing the full-cross coefficients, shape C(m,2) x C(n,2).
class GammaMatrix {
 public:
  /// All-zero Γ for an m x n form.
  GammaMatrix(int m, int n);
  GammaMatrix(int m, int n, const Matrix& values);

  int m() const { return m_; }
  int n() const { return n_; }
  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  int size() const { return rows() * cols(); }

  /// γ for x-pair (i1, i2) and y-pair (j1, j2); 0-based, i1 != i2, j1 != j2.
  double at(int i1, int i2, int j1, int j2) const;
  double& at(int i1, int i2, int j1, int j2);

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

 private:
  int m_;
  int n_;
  Matrix values_;
};

/// Unit perturbation E for the parameter at (row, col) of Γ: P(Γ) = Σ γ_rc E_rc.
/// Returns the four affected flat positions with their signs.
struct GammaStencil {
  int plus_row, plus_col;    // +γ at (plus_row, plus_col) and transpose
  int minus_row, minus_col;  // -γ at (minus_row, minus_col) and transpose
};
GammaStencil gamma_stencil(int m, int n, int row, int col);

Matrix build_p(int m, int n, const GammaMatrix& gamma);

/// M(Γ) = B + P(Γ).
Matrix build_m(const BiquadraticForm& f, const GammaMatrix& gamma);

/// Coefficients of the nine monomials of a 2x2 biquadratic form.
struct Quartic2x2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;  // x1²y1², x1²y2², x2²y1², x2²y2²
  double b = 0;                               // x1x2y1y2
  double cx1 = 0, cx2 = 0;                    // x1²y1y2, x2²y1y2
  double cy1 = 0, cy2 = 0;                    // x1x2y1², x1x2y2²

  double max_abs() const;
  bool operator==(const Quartic2x2&) const = default;
};

Quartic2x2 to_quartic2x2(const BiquadraticForm& f);
/// The full-cross coefficient is split evenly over its four tensor slots.
BiquadraticForm from_quartic2x2(const Quartic2x2& q);
double evaluate(const Quartic2x2& q, double x1, double x2, double y1, double y2);

/// Polynomial coefficients, one per monomial x_i x_k y_j y_l with i <= k, j <= l.
/// Row index enumerates x-pairs (i, k), column index y-pairs (j, l), both in
/// the order (0,0), (0,1), ..., (0,m-1), (1,1), ...
class MonomialCoefficients {
 public:
  MonomialCoefficients(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  double& at(int i, int k, int j, int l);
  double at(int i, int k, int j, int l) const;
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  static int sym_pair(int a, int b, int size);

 private:
  int m_;
  int n_;
  Matrix values_;
};

MonomialCoefficients monomial_coefficients(const BiquadraticForm& f);

/// The canonical tensor for a polynomial: fully symmetric, every monomial's
/// coefficient spread evenly over its distinct tensor slots.
BiquadraticForm from_monomials(const MonomialCoefficients& c);

/// Full symmetrization (same polynomial, canonical tensor).
BiquadraticForm canonicalize(const BiquadraticForm& f);

/// f = Σ_t (c_tᵀ z)² over z = x ⊗ y. The rank is the number of terms.
struct SosDecomposition {
  int m = 0;
  int n = 0;
  std::vector<Vector> terms;
};

}  // namespace bqsos
