#pragma once

// Dense arithmetic kernels used on the hot paths (sampling oracle, Gram
// evaluation). Each kernel has a scalar reference implementation and, where
// the target supports it, an AVX2+FMA (x86-64) or NEON (AArch64) variant.
// The variant is picked once at startup from the running CPU; tests pin the
// choice with set_active_isa() to check every variant against the scalar one.

#include <cstddef>
#include <span>
#include <vector>

namespace bqsos::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);

/// Best variant supported by the running CPU.
Isa detected_isa();

/// Variant currently used by the dispatched entry points below.
Isa active_isa();

/// Returns false (and leaves the selection unchanged) if the CPU lacks `isa`.
bool set_active_isa(Isa isa);

/// Every variant usable on this machine, scalar first.
std::vector<Isa> available_isas();

double dot(std::span<const double> a, std::span<const double> b);

/// zᵀ M z for a dense symmetric `dim x dim` matrix (either storage order).
double quad_form(std::span<const double> m, std::span<const double> z);

/// out[s] = z_sᵀ M z_s where z_s is row s of the row-major `count x dim` block `zs`.
void quad_form_batch(std::span<const double> m, std::size_t dim, std::span<const double> zs,
                     std::span<double> out);

/// z = x ⊗ y, z[i*|y| + j] = x[i] * y[j].
void kron(std::span<const double> x, std::span<const double> y, std::span<double> z);

// Raw variants. These skip the size checks done by the dispatched wrappers.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t len);
  double (*quad_form)(const double* m, const double* z, std::size_t dim);
  void (*quad_form_batch)(const double* m, std::size_t dim, const double* zs, std::size_t count,
                          double* out);
  void (*kron)(const double* x, std::size_t nx, const double* y, std::size_t ny, double* z);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace bqsos::kernels
