#pragma once

// Oracles and generators shared by the test binaries. Nothing here calls into
// the library's numerics: eigenvalues come from a cyclic Jacobi sweep, polynomial
// values from the explicit monomial formulas.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bqsos/biquad.hpp"

namespace testing_support {

using bqsos::Matrix;
using bqsos::Vector;

/// Eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// f(x, y) from the nine named coefficients, written out term by term.
inline double quartic_value(const bqsos::Quartic2x2& q, double x1, double x2, double y1, double y2) {
  return q.a11 * x1 * x1 * y1 * y1 + q.a12 * x1 * x1 * y2 * y2 + q.a21 * x2 * x2 * y1 * y1 +
         q.a22 * x2 * x2 * y2 * y2 + q.b * x1 * x2 * y1 * y2 + q.cx1 * x1 * x1 * y1 * y2 +
         q.cx2 * x2 * x2 * y1 * y2 + q.cy1 * x1 * x2 * y1 * y1 + q.cy2 * x1 * x2 * y2 * y2;
}

/// Σ_t (c_tᵀ (x⊗y))² computed directly.
inline double sos_value(const std::vector<Vector>& terms, const Vector& x, const Vector& y) {
  double total = 0.0;
  for (const Vector& c : terms) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i)
      for (int j = 0; j < y.size(); ++j) s += c(i * y.size() + j) * x(i) * y(j);
    total += s * s;
  }
  return total;
}

/// Polynomial coefficient of x_i x_k y_j y_l (i <= k, j <= l) by summing tensor slots.
inline double monomial_coefficient(const bqsos::BiquadraticForm& f, int i, int k, int j, int l) {
  double c = 0.0;
  const int xs[2][2] = {{i, k}, {k, i}};
  const int ys[2][2] = {{j, l}, {l, j}};
  for (int a = 0; a < (i == k ? 1 : 2); ++a)
    for (int b = 0; b < (j == l ? 1 : 2); ++b) c += f(xs[a][0], ys[b][0], xs[a][1], ys[b][1]);
  return c;
}

/// Largest coefficient difference between the polynomials of f and g.
inline double polynomial_diff(const bqsos::BiquadraticForm& f, const bqsos::BiquadraticForm& g) {
  double d = 0.0;
  for (int i = 0; i < f.m(); ++i)
    for (int k = i; k < f.m(); ++k)
      for (int j = 0; j < f.n(); ++j)
        for (int l = j; l < f.n(); ++l)
          d = std::max(d, std::abs(monomial_coefficient(f, i, k, j, l) - monomial_coefficient(g, i, k, j, l)));
  return d;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double normal() { return std::normal_distribution<double>()(gen); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Vector normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Matrix symmetric(int n) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal();
    return (a + a.transpose()) / 2.0;
  }
};

inline bqsos::BiquadraticForm random_form(Rng& rng, int m, int n) {
  return bqsos::BiquadraticForm::from_flattened(m, n, rng.symmetric(m * n));
}

inline bqsos::SosDecomposition random_sos(Rng& rng, int m, int n, int rank) {
  bqsos::SosDecomposition d;
  d.m = m;
  d.n = n;
  for (int t = 0; t < rank; ++t) d.terms.push_back(rng.normal_vector(m * n));
  return d;
}

/// B with b_st = Σ_t c_t(s) c_t(t), the Gram matrix of the decomposition.
inline bqsos::BiquadraticForm gram_form(const bqsos::SosDecomposition& d) {
  Matrix g = Matrix::Zero(d.m * d.n, d.m * d.n);
  for (const Vector& c : d.terms) g += c * c.transpose();
  return bqsos::BiquadraticForm::from_flattened(d.m, d.n, g);
}

inline bqsos::Quartic2x2 example32() {
  bqsos::Quartic2x2 q;
  q.a11 = 1; q.a12 = 12; q.a21 = 12; q.a22 = 2;
  q.b = 16; q.cx1 = 4; q.cx2 = 2; q.cy1 = 4; q.cy2 = 2;
  return q;
}

inline bqsos::Quartic2x2 example49() {
  bqsos::Quartic2x2 q;
  q.a11 = 1.2; q.a12 = 1; q.a21 = 1; q.a22 = 6;
  q.cx1 = -2; q.cy1 = -2;
  return q;
}

/// Printed four-square decomposition of the Example 3.2 polynomial, z = (x1y1, x1y2, x2y1, x2y2).
inline bqsos::SosDecomposition printed_sos_32() {
  bqsos::SosDecomposition d;
  d.m = d.n = 2;
  d.terms = {Vector{{1, 2, 2, 1}}, Vector{{0, 2.8284, 1.0607, -0.3536}},
             Vector{{0, 0, 2.6220, -0.2384}}, Vector{{0, 0, 0, 0.9045}}};
  return d;
}

/// Printed four-square decomposition of the Case III worked example.
inline bqsos::SosDecomposition printed_sos_49() {
  bqsos::SosDecomposition d;
  d.m = d.n = 2;
  d.terms = {Vector{{-0.4876, 0.1140, 0.1140, 2.4326}}, Vector{{0.9781, -0.9685, -0.9685, 0.2869}},
             Vector{{0, 0.2181, -0.2181, 0}}, Vector{{0.0739, 0.0390, 0.0390, 0.0112}}};
  return d;
}

}  // namespace testing_support
