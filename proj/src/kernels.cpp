#include "bqsos/kernels.hpp"

#include <atomic>

#include "bqsos/errors.hpp"

namespace bqsos::kernels {

namespace {

double scalar_dot(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

double scalar_quad_form(const double* m, const double* z, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double* row = m + i * dim;
    double r = 0.0;
    for (std::size_t j = 0; j < dim; ++j) r += row[j] * z[j];
    acc += z[i] * r;
  }
  return acc;
}

void scalar_quad_form_batch(const double* m, std::size_t dim, const double* zs, std::size_t count,
                            double* out) {
  for (std::size_t s = 0; s < count; ++s) out[s] = scalar_quad_form(m, zs + s * dim, dim);
}

void scalar_kron(const double* x, std::size_t nx, const double* y, std::size_t ny, double* z) {
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) z[i * ny + j] = x[i] * y[j];
}

const KernelTable kScalar{scalar_dot, scalar_quad_form, scalar_quad_form_batch, scalar_kron};

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
      return neon_table() != nullptr;
  }
  return false;
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &kScalar;
    case Isa::Avx2:
      return avx2_table();
    case Isa::Neon:
      return neon_table();
  }
  return nullptr;
}

struct Dispatch {
  std::atomic<const KernelTable*> table;
  std::atomic<Isa> isa;
  Dispatch() : table(table_for(detected_isa())), isa(detected_isa()) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

const KernelTable& active() { return *dispatch().table.load(std::memory_order_relaxed); }

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

Isa detected_isa() {
  if (cpu_has(Isa::Avx2)) return Isa::Avx2;
  if (cpu_has(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return dispatch().isa.load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
  if (!cpu_has(isa)) return false;
  dispatch().table.store(table_for(isa), std::memory_order_relaxed);
  dispatch().isa.store(isa, std::memory_order_relaxed);
  return true;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (cpu_has(isa)) out.push_back(isa);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw_dimension("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

double quad_form(std::span<const double> m, std::span<const double> z) {
  if (m.size() != z.size() * z.size()) throw_dimension("quad_form: matrix is not dim x dim");
  return active().quad_form(m.data(), z.data(), z.size());
}

void quad_form_batch(std::span<const double> m, std::size_t dim, std::span<const double> zs,
                     std::span<double> out) {
  if (m.size() != dim * dim) throw_dimension("quad_form_batch: matrix is not dim x dim");
  if (zs.size() != out.size() * dim) throw_dimension("quad_form_batch: batch size mismatch");
  active().quad_form_batch(m.data(), dim, zs.data(), out.size(), out.data());
}

void kron(std::span<const double> x, std::span<const double> y, std::span<double> z) {
  if (z.size() != x.size() * y.size()) throw_dimension("kron: output length mismatch");
  active().kron(x.data(), x.size(), y.data(), y.size(), z.data());
}

}  // namespace bqsos::kernels
