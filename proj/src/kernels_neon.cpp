#include "bqsos/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace bqsos::kernels {

namespace {

double neon_dot(const double* a, const double* b, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= len; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

double neon_quad_form(const double* m, const double* z, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += z[i] * neon_dot(m + i * dim, z, dim);
  return acc;
}

void neon_quad_form_batch(const double* m, std::size_t dim, const double* zs, std::size_t count,
                          double* out) {
  for (std::size_t s = 0; s < count; ++s) out[s] = neon_quad_form(m, zs + s * dim, dim);
}

void neon_kron(const double* x, std::size_t nx, const double* y, std::size_t ny, double* z) {
  for (std::size_t i = 0; i < nx; ++i) {
    const float64x2_t xi = vdupq_n_f64(x[i]);
    double* zi = z + i * ny;
    std::size_t j = 0;
    for (; j + 2 <= ny; j += 2) vst1q_f64(zi + j, vmulq_f64(xi, vld1q_f64(y + j)));
    for (; j < ny; ++j) zi[j] = x[i] * y[j];
  }
}

const KernelTable kNeon{neon_dot, neon_quad_form, neon_quad_form_batch, neon_kron};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace bqsos::kernels

#else

namespace bqsos::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace bqsos::kernels

#endif
