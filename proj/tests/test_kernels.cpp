#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bqsos/kernels.hpp"
#include "support.hpp"

using namespace bqsos;
using namespace testing_support;
namespace k = bqsos::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

std::vector<double> random_sym(Rng& rng, std::size_t n) {
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m[i * n + j] = m[j * n + i] = rng.normal();
  return m;
}

double naive_quad(const std::vector<double>& m, const double* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += z[i] * m[i * n + j] * z[j];
  return s;
}

double abs_quad(const std::vector<double>& m, const double* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += std::abs(z[i] * m[i * n + j] * z[j]);
  return s;
}

std::vector<const k::KernelTable*> tables() {
  std::vector<const k::KernelTable*> out{&k::scalar_table()};
  if (k::avx2_table() && k::set_active_isa(k::Isa::Avx2)) out.push_back(k::avx2_table());
  if (k::neon_table() && k::set_active_isa(k::Isa::Neon)) out.push_back(k::neon_table());
  k::set_active_isa(k::detected_isa());
  return out;
}

}  // namespace

TEST_CASE("isa bookkeeping") {
  const auto isas = k::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == k::Isa::Scalar);
  CHECK(k::set_active_isa(k::Isa::Scalar));
  CHECK(k::active_isa() == k::Isa::Scalar);
  CHECK(k::set_active_isa(k::detected_isa()));
  CHECK(k::active_isa() == k::detected_isa());
  MESSAGE("detected kernel variant: " << k::isa_name(k::detected_isa()));
}

TEST_CASE("every variant agrees with a naive loop") {
  Rng rng(99);
  for (const k::KernelTable* t : tables()) {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 12u, 16u, 17u, 25u, 36u}) {
      const auto a = random_vec(rng, n), b = random_vec(rng, n);
      double ref = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i], mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref) <= 1e-13 * mag);

      const auto m = random_sym(rng, n);
      CHECK(std::abs(t->quad_form(m.data(), a.data(), n) - naive_quad(m, a.data(), n)) <=
            1e-13 * abs_quad(m, a.data(), n));

      const std::size_t count = 13;
      const auto zs = random_vec(rng, n * count);
      std::vector<double> out(count);
      t->quad_form_batch(m.data(), n, zs.data(), count, out.data());
      for (std::size_t s = 0; s < count; ++s)
        CHECK(std::abs(out[s] - naive_quad(m, zs.data() + s * n, n)) <= 1e-13 * abs_quad(m, zs.data() + s * n, n));
    }
    for (std::size_t nx : {1u, 2u, 3u, 4u, 5u})
      for (std::size_t ny : {1u, 2u, 3u, 4u, 5u, 8u}) {
        const auto x = random_vec(rng, nx), y = random_vec(rng, ny);
        std::vector<double> z(nx * ny);
        t->kron(x.data(), nx, y.data(), ny, z.data());
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < ny; ++j) CHECK(z[i * ny + j] == x[i] * y[j]);
      }
  }
}

TEST_CASE("dispatched entry points match scalar for each selected variant") {
  Rng rng(5);
  const auto m = random_sym(rng, 9);
  const auto z = random_vec(rng, 9);
  const double ref = k::scalar_table().quad_form(m.data(), z.data(), 9);
  for (k::Isa isa : k::available_isas()) {
    REQUIRE(k::set_active_isa(isa));
    CHECK(k::quad_form(m, z) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(k::dot(z, z) == doctest::Approx(k::scalar_table().dot(z.data(), z.data(), 9)).epsilon(1e-14));
  }
  k::set_active_isa(k::detected_isa());
}
