#include "bqsos/biquad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bqsos/errors.hpp"

namespace bqsos {

namespace {

void require_dims(int m, int n) {
  if (m < 1 || n < 1)
    throw DimensionError("biquadratic form needs m >= 1 and n >= 1, got " + std::to_string(m) +
                         "x" + std::to_string(n));
}

// Distinct tensor slots (interleaved, 0-based) sharing the monomial of (i, j, k, l).
int orbit(int i, int j, int k, int l, std::array<std::array<int, 4>, 4>& out) {
  const std::array<std::array<int, 4>, 4> all{{{i, j, k, l}, {k, l, i, j}, {k, j, i, l}, {i, l, k, j}}};
  int count = 0;
  for (const auto& s : all) {
    if (std::find(out.begin(), out.begin() + count, s) == out.begin() + count) out[count++] = s;
  }
  return count;
}

}  // namespace

BiquadraticForm::BiquadraticForm(int m, int n) : m_(m), n_(n) {
  require_dims(m, n);
  b_ = Matrix::Zero(m * n, m * n);
}

BiquadraticForm BiquadraticForm::from_flattened(int m, int n, const Matrix& b) {
  BiquadraticForm f(m, n);
  if (b.rows() != m * n || b.cols() != m * n)
    throw DimensionError("flattened matrix must be " + std::to_string(m * n) + "x" +
                         std::to_string(m * n));
  if (!b.allFinite()) throw InvalidCoefficient("flattened matrix has non-finite entries");
  f.b_ = 0.5 * (b + b.transpose());
  return f;
}

double BiquadraticForm::max_abs_coefficient() const { return b_.cwiseAbs().maxCoeff(); }

bool BiquadraticForm::operator==(const BiquadraticForm& other) const {
  return m_ == other.m_ && n_ == other.n_ && b_ == other.b_;
}

BiquadraticForm from_entries(int m, int n, std::span<const Entry> entries, Convention convention,
                             EntryMode mode) {
  require_dims(m, n);
  const int d = m * n;
  Matrix acc = Matrix::Zero(d, d);
  Matrix listed = Matrix::Zero(d, d);  // 1 where a slot was supplied (SymmetricTensor mode)

  for (const Entry& e : entries) {
    if (!std::isfinite(e.value))
      throw InvalidCoefficient("non-finite coefficient at (" + std::to_string(e.i) + "," +
                               std::to_string(e.j) + "," + std::to_string(e.k) + "," +
                               std::to_string(e.l) + ")");
    // Interleaved (i, j, k, l) ranges: i,k over x; j,l over y.
    int xi, yj, xk, yl;
    if (convention == Convention::Interleaved) {
      xi = e.i, yj = e.j, xk = e.k, yl = e.l;
    } else {
      xi = e.i, xk = e.j, yj = e.k, yl = e.l;
    }
    if (xi < 1 || xi > m || xk < 1 || xk > m || yj < 1 || yj > n || yl < 1 || yl > n)
      throw InvalidIndex("entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                         std::to_string(e.k) + "," + std::to_string(e.l) + ") out of range for " +
                         std::to_string(m) + "x" + std::to_string(n));
    const int s = (xi - 1) * n + (yj - 1);
    const int t = (xk - 1) * n + (yl - 1);
    acc(s, t) += e.value;
    listed(s, t) = 1.0;
  }

  if (mode == EntryMode::Terms) return BiquadraticForm::from_flattened(m, n, acc);

  Matrix out = Matrix::Zero(d, d);
  std::array<std::array<int, 4>, 4> slots{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l) {
          const int count = orbit(i, j, k, l, slots);
          double sum = 0.0;
          int supplied = 0;
          for (int c = 0; c < count; ++c) {
            const int s = slots[c][0] * n + slots[c][1];
            const int t = slots[c][2] * n + slots[c][3];
            if (listed(s, t) != 0.0) {
              sum += acc(s, t);
              ++supplied;
            }
          }
          if (supplied > 0) out(i * n + j, k * n + l) = sum / supplied;
        }
  return BiquadraticForm::from_flattened(m, n, out);
}

double evaluate(const BiquadraticForm& f, std::span<const double> x, std::span<const double> y) {
  const int m = f.m(), n = f.n();
  if (static_cast<int>(x.size()) != m || static_cast<int>(y.size()) != n)
    throw DimensionError("evaluate: expected x of length " + std::to_string(m) + " and y of length " +
                         std::to_string(n));
  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double xy = x[i] * y[j];
      if (xy == 0.0) continue;
      double inner = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l) inner += f(i, j, k, l) * x[k] * y[l];
      total += xy * inner;
    }
  return total;
}

double evaluate(const BiquadraticForm& f, const Vector& x, const Vector& y) {
  return evaluate(f, std::span<const double>(x.data(), x.size()),
                  std::span<const double>(y.data(), y.size()));
}

Vector kron(const Vector& x, const Vector& y) {
  Vector z(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = 0; j < y.size(); ++j) z(i * y.size() + j) = x(i) * y(j);
  return z;
}

Matrix flatten_b(const BiquadraticForm& f) { return f.flattened(); }

int pair_index(int a, int b) {
  if (a == b || a < 1 || b < 1) throw InvalidIndex("pair_index needs two distinct 1-based indices");
  if (a > b) return (a - 1) * (a - 2) / 2 + b;
  return (b - 1) * (b - 2) / 2 + a;
}

GammaMatrix::GammaMatrix(int m, int n) : m_(m), n_(n) {
  require_dims(m, n);
  values_ = Matrix::Zero(choose2(m), choose2(n));
}

GammaMatrix::GammaMatrix(int m, int n, const Matrix& values) : GammaMatrix(m, n) {
  if (values.rows() != choose2(m) || values.cols() != choose2(n))
    throw DimensionError("Γ must be " + std::to_string(choose2(m)) + "x" +
                         std::to_string(choose2(n)) + " for a " + std::to_string(m) + "x" +
                         std::to_string(n) + " form");
  values_ = values;
}

double GammaMatrix::at(int i1, int i2, int j1, int j2) const {
  return values_(pair_index(i1 + 1, i2 + 1) - 1, pair_index(j1 + 1, j2 + 1) - 1);
}

double& GammaMatrix::at(int i1, int i2, int j1, int j2) {
  return values_(pair_index(i1 + 1, i2 + 1) - 1, pair_index(j1 + 1, j2 + 1) - 1);
}

namespace {

// Inverse of pair_index: 0-based row -> (lo, hi) with lo < hi, 0-based.
std::pair<int, int> pair_of(int index0) {
  int hi = 1;
  while (choose2(hi + 1) <= index0) ++hi;
  return {index0 - choose2(hi), hi};
}

}  // namespace

GammaStencil gamma_stencil(int m, int n, int row, int col) {
  if (row < 0 || row >= choose2(m) || col < 0 || col >= choose2(n))
    throw InvalidIndex("Γ position out of range");
  const auto [i1, i2] = pair_of(row);
  const auto [j1, j2] = pair_of(col);
  return GammaStencil{i1 * n + j1, i2 * n + j2, i2 * n + j1, i1 * n + j2};
}

Matrix build_p(int m, int n, const GammaMatrix& gamma) {
  require_dims(m, n);
  if (gamma.rows() != choose2(m) || gamma.cols() != choose2(n))
    throw DimensionError("build_p: Γ has shape " + std::to_string(gamma.rows()) + "x" +
                         std::to_string(gamma.cols()) + ", expected " +
                         std::to_string(choose2(m)) + "x" + std::to_string(choose2(n)));
  Matrix p = Matrix::Zero(m * n, m * n);
  for (int r = 0; r < gamma.rows(); ++r)
    for (int c = 0; c < gamma.cols(); ++c) {
      const double g = gamma.values()(r, c);
      if (g == 0.0) continue;
      const GammaStencil st = gamma_stencil(m, n, r, c);
      p(st.plus_row, st.plus_col) += g;
      p(st.plus_col, st.plus_row) += g;
      p(st.minus_row, st.minus_col) -= g;
      p(st.minus_col, st.minus_row) -= g;
    }
  return p;
}

Matrix build_m(const BiquadraticForm& f, const GammaMatrix& gamma) {
  if (gamma.m() != f.m() || gamma.n() != f.n())
    throw DimensionError("build_m: Γ dimensions do not match the form");
  return f.flattened() + build_p(f.m(), f.n(), gamma);
}

double Quartic2x2::max_abs() const {
  return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22), std::abs(b),
                   std::abs(cx1), std::abs(cx2), std::abs(cy1), std::abs(cy2)});
}

// z = (x1y1, x1y2, x2y1, x2y2): monomial coefficients read off B.
Quartic2x2 to_quartic2x2(const BiquadraticForm& f) {
  if (f.m() != 2 || f.n() != 2) throw DimensionError("to_quartic2x2 needs a 2x2 form");
  const Matrix& b = f.flattened();
  Quartic2x2 q;
  q.a11 = b(0, 0);
  q.a12 = b(1, 1);
  q.a21 = b(2, 2);
  q.a22 = b(3, 3);
  q.b = 2.0 * (b(0, 3) + b(1, 2));
  q.cx1 = 2.0 * b(0, 1);
  q.cx2 = 2.0 * b(2, 3);
  q.cy1 = 2.0 * b(0, 2);
  q.cy2 = 2.0 * b(1, 3);
  return q;
}

BiquadraticForm from_quartic2x2(const Quartic2x2& q) {
  Matrix b = Matrix::Zero(4, 4);
  b(0, 0) = q.a11;
  b(1, 1) = q.a12;
  b(2, 2) = q.a21;
  b(3, 3) = q.a22;
  b(0, 3) = b(3, 0) = q.b / 4.0;
  b(1, 2) = b(2, 1) = q.b / 4.0;
  b(0, 1) = b(1, 0) = q.cx1 / 2.0;
  b(2, 3) = b(3, 2) = q.cx2 / 2.0;
  b(0, 2) = b(2, 0) = q.cy1 / 2.0;
  b(1, 3) = b(3, 1) = q.cy2 / 2.0;
  return BiquadraticForm::from_flattened(2, 2, b);
}

double evaluate(const Quartic2x2& q, double x1, double x2, double y1, double y2) {
  return q.a11 * x1 * x1 * y1 * y1 + q.a12 * x1 * x1 * y2 * y2 + q.a21 * x2 * x2 * y1 * y1 +
         q.a22 * x2 * x2 * y2 * y2 + q.b * x1 * x2 * y1 * y2 + q.cx1 * x1 * x1 * y1 * y2 +
         q.cx2 * x2 * x2 * y1 * y2 + q.cy1 * x1 * x2 * y1 * y1 + q.cy2 * x1 * x2 * y2 * y2;
}

MonomialCoefficients::MonomialCoefficients(int m, int n) : m_(m), n_(n) {
  require_dims(m, n);
  values_ = Matrix::Zero(m * (m + 1) / 2, n * (n + 1) / 2);
}

int MonomialCoefficients::sym_pair(int a, int b, int size) {
  if (a > b) std::swap(a, b);
  // Rows (0,0..size-1), (1,1..size-1), ...
  return a * size - a * (a - 1) / 2 + (b - a);
}

double& MonomialCoefficients::at(int i, int k, int j, int l) {
  return values_(sym_pair(i, k, m_), sym_pair(j, l, n_));
}

double MonomialCoefficients::at(int i, int k, int j, int l) const {
  return values_(sym_pair(i, k, m_), sym_pair(j, l, n_));
}

MonomialCoefficients monomial_coefficients(const BiquadraticForm& f) {
  MonomialCoefficients c(f.m(), f.n());
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.n(); ++j)
      for (int k = 0; k < f.m(); ++k)
        for (int l = 0; l < f.n(); ++l) c.at(i, k, j, l) += f(i, j, k, l);
  return c;
}

BiquadraticForm from_monomials(const MonomialCoefficients& c) {
  const int m = c.m(), n = c.n();
  Matrix b = Matrix::Zero(m * n, m * n);
  std::array<std::array<int, 4>, 4> slots{};
  for (int i = 0; i < m; ++i)
    for (int k = i; k < m; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) {
          const double v = c.at(i, k, j, l);
          if (v == 0.0) continue;
          const int count = orbit(i, j, k, l, slots);
          for (int s = 0; s < count; ++s)
            b(slots[s][0] * n + slots[s][1], slots[s][2] * n + slots[s][3]) += v / count;
        }
  return BiquadraticForm::from_flattened(m, n, b);
}

BiquadraticForm canonicalize(const BiquadraticForm& f) {
  return from_monomials(monomial_coefficients(f));
}

}  // namespace bqsos
