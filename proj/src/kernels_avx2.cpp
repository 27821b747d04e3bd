#include "bqsos/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#define BQSOS_AVX2 __attribute__((target("avx2,fma")))

namespace bqsos::kernels {

namespace {

BQSOS_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

BQSOS_AVX2 double avx2_dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

BQSOS_AVX2 double avx2_quad_form(const double* m, const double* z, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += z[i] * avx2_dot(m + i * dim, z, dim);
  return acc;
}

// Four samples per step: the row-dot products of sample s are accumulated in
// lane s, so the matrix entries are broadcast instead of the samples gathered.
BQSOS_AVX2 void avx2_quad_form_batch(const double* m, std::size_t dim, const double* zs,
                                     std::size_t count, double* out) {
  std::size_t s = 0;
  alignas(32) double lane[4];
  for (; s + 4 <= count; s += 4) {
    const double* z0 = zs + (s + 0) * dim;
    const double* z1 = zs + (s + 1) * dim;
    const double* z2 = zs + (s + 2) * dim;
    const double* z3 = zs + (s + 3) * dim;
    __m256d total = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dim; ++i) {
      const double* row = m + i * dim;
      __m256d r = _mm256_setzero_pd();
      for (std::size_t j = 0; j < dim; ++j) {
        __m256d zj = _mm256_set_pd(z3[j], z2[j], z1[j], z0[j]);
        r = _mm256_fmadd_pd(_mm256_set1_pd(row[j]), zj, r);
      }
      __m256d zi = _mm256_set_pd(z3[i], z2[i], z1[i], z0[i]);
      total = _mm256_fmadd_pd(zi, r, total);
    }
    _mm256_store_pd(lane, total);
    out[s + 0] = lane[0];
    out[s + 1] = lane[1];
    out[s + 2] = lane[2];
    out[s + 3] = lane[3];
  }
  for (; s < count; ++s) out[s] = avx2_quad_form(m, zs + s * dim, dim);
}

BQSOS_AVX2 void avx2_kron(const double* x, std::size_t nx, const double* y, std::size_t ny,
                          double* z) {
  for (std::size_t i = 0; i < nx; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    double* zi = z + i * ny;
    std::size_t j = 0;
    for (; j + 4 <= ny; j += 4) _mm256_storeu_pd(zi + j, _mm256_mul_pd(xi, _mm256_loadu_pd(y + j)));
    for (; j < ny; ++j) zi[j] = x[i] * y[j];
  }
}

const KernelTable kAvx2{avx2_dot, avx2_quad_form, avx2_quad_form_batch, avx2_kron};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace bqsos::kernels

#else

namespace bqsos::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace bqsos::kernels

#endif
