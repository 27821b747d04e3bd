#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqsos/builtin_examples.hpp"
#include "bqsos/errors.hpp"
#include "bqsos/gamma_solver.hpp"
#include "bqsos/verification.hpp"
#include "support.hpp"

using namespace bqsos;
using namespace testing_support;

namespace {

Matrix m_gamma3() {
  GammaMatrix g(2, 2);
  g.values()(0, 0) = -3;
  return build_m(from_quartic2x2(example32()), g);
}

double residual(const Matrix& m, const SosDecomposition& d) {
  Matrix r = m;
  for (const Vector& c : d.terms) r -= c * c.transpose();
  return r.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("min_eig") {
  const Matrix b = flatten_b(from_quartic2x2(example32()));
  const EigenPair e = min_eig(b);
  CHECK(std::abs(e.value - (-2.6110)) <= 1e-3);
  CHECK(std::abs(min_eig(m_gamma3()).value - 0.2069) <= 1e-3);

  const EigenPair id = min_eig(Matrix::Identity(4, 4));
  CHECK(id.value == doctest::Approx(1.0));
  CHECK(id.vector.norm() == doctest::Approx(1.0));

  Matrix skew = Matrix::Identity(3, 3);
  skew(0, 1) = 1e-6;
  CHECK_THROWS_AS(min_eig(skew), NotSymmetric);

  Rng rng(42);
  for (int n : {1, 2, 4, 6, 9, 16}) {
    for (int t = 0; t < 10; ++t) {
      const Matrix a = rng.symmetric(n) * std::pow(10.0, rng.uniform(-3, 3));
      const EigenPair p = min_eig(a);
      const double oracle = jacobi_eigenvalues(a).front();
      const double norm = a.cwiseAbs().maxCoeff();
      CHECK(std::abs(p.value - oracle) <= 1e-12 * n * norm);
      CHECK(std::abs(p.vector.norm() - 1.0) <= 1e-12);
      CHECK((a * p.vector - p.value * p.vector).cwiseAbs().maxCoeff() <= 1e-9 * norm);
    }
  }
}

TEST_CASE("solve_gamma on small known cases") {
  SUBCASE("form with indefinite flattening") {
    const SolveResult r = solve_gamma(from_quartic2x2(example32()));
    CHECK(r.status == SolveStatus::SosCertified);
    CHECK(r.lambda_min >= -1e-9);
    CHECK(r.lambda_min == doctest::Approx(min_eig(build_m(from_quartic2x2(example32()), r.gamma)).value));
  }
  SUBCASE("zero form") {
    const SolveResult r = solve_gamma(BiquadraticForm(3, 2));
    CHECK(r.status == SolveStatus::SosCertified);
    CHECK(r.lambda_min == 0.0);
    CHECK(r.gamma.values().isZero(0.0));
  }
  SUBCASE("diagonal form") {
    const Matrix id = Matrix::Identity(9, 9);
    const SolveResult r = solve_gamma(BiquadraticForm::from_flattened(3, 3, id));
    CHECK(r.status == SolveStatus::SosCertified);
    CHECK(r.lambda_min == doctest::Approx(1.0));
    CHECK(r.gamma.values().isZero(0.0));
  }
  SUBCASE("psd-but-not-SOS 3x3 instance stays inconclusive") {
    const BiquadraticForm f = find_builtin("choi-3x3")->problem.form();
    const SolveResult r = solve_gamma(f);
    CHECK(r.status == SolveStatus::Inconclusive);
    CHECK(r.lambda_min < -0.05);
    CHECK(r.lambda_upper_bound < 0.0);
    CHECK(r.lambda_min <= r.lambda_upper_bound + 1e-9);
  }
  SUBCASE("ascent alone also certifies the 2x2 example") {
    const SolveResult r = solve_gamma(from_quartic2x2(example32()), {.step_rule = StepRule::Polyak});
    CHECK(r.status == SolveStatus::SosCertified);
    CHECK(r.newton_iterations == 0);
  }
}

TEST_CASE("history is non-decreasing") {
  Rng rng(9);
  std::vector<BiquadraticForm> forms = {find_builtin("choi-3x3")->problem.form(),
                                        from_quartic2x2(example32())};
  for (int t = 0; t < 5; ++t) forms.push_back(random_form(rng, 3, 3));
  for (const BiquadraticForm& f : forms) {
    const SolveResult r = solve_gamma(f, {.max_iters = 400});
    REQUIRE(!r.history.empty());
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      CHECK(r.history[i].lambda_min >= r.history[i - 1].lambda_min - 1e-12);
      CHECK(r.history[i].iteration > r.history[i - 1].iteration);
    }
    CHECK(r.history.back().lambda_min == doctest::Approx(r.lambda_min));
    CHECK(r.iterations <= 400);
  }
}

TEST_CASE("SOS-by-construction instances are certified soundly") {
  Rng rng(31337);
  const std::vector<std::pair<int, int>> shapes = {{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 2}};
  for (int t = 0; t < 50; ++t) {
    const auto [m, n] = shapes[t % shapes.size()];
    const int rank = rng.integer(1, m * n);
    const SosDecomposition d = random_sos(rng, m, n, rank);
    // canonical tensor, not the Gram matrix, so Γ = 0 is usually not a solution
    const BiquadraticForm f = reconstruct(d);
    const SolveResult r = solve_gamma(f);
    INFO("instance " << t << " (" << m << "x" << n << ", rank " << rank << ")");
    REQUIRE(r.status == SolveStatus::SosCertified);

    const SosDecomposition e = extract_certified(f, r, 1e-9);
    CHECK(sos_rank(e) <= m * n);
    const double scale = f.max_abs_coefficient();
    CHECK(compare_forms(f, reconstruct(e), 100 * 1e-9 * scale).equal);

    const Matrix mg = build_m(f, r.gamma);
    for (int s = 0; s < 100; ++s) {
      const Vector x = rng.normal_vector(m), y = rng.normal_vector(n);
      const Vector z = kron(x, y);
      const double mag = (mg.cwiseAbs() * z.cwiseAbs()).dot(z.cwiseAbs());
      CHECK(std::abs(z.dot(mg * z) - evaluate(f, x, y)) <= 1e-10 * mag);
    }
  }
}

TEST_CASE("extract_sos") {
  SUBCASE("printed M(gamma) of the 2x2 example has four terms") {
    const Matrix m = m_gamma3();
    for (Factorization route : {Factorization::Spectral, Factorization::PivotedCholesky}) {
      const SosDecomposition d = extract_sos(m, 2, 2, 1e-9, route);
      CHECK(sos_rank(d) == 4);
      CHECK(residual(m, d) <= 10 * 1e-9 * m.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("identity gives the basis vectors") {
    const SosDecomposition d = extract_sos(Matrix::Identity(4, 4), 2, 2, 1e-9);
    CHECK(sos_rank(d) == 4);
    Matrix c(4, 4);
    for (int t = 0; t < 4; ++t) c.col(t) = d.terms[t].cwiseAbs();
    CHECK((c.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((c.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("rank one") {
    const Vector u{{1, -2, 0.5, 3, 0, 1}};
    for (Factorization route : {Factorization::Spectral, Factorization::PivotedCholesky}) {
      const SosDecomposition d = extract_sos(u * u.transpose(), 3, 2, 1e-9, route);
      REQUIRE(sos_rank(d) == 1);
      const Vector c = d.terms[0];
      CHECK(std::min((c - u).cwiseAbs().maxCoeff(), (c + u).cwiseAbs().maxCoeff()) <= 1e-12);
    }
  }
  SUBCASE("spectral terms are mutually orthogonal") {
    Rng rng(6);
    const SosDecomposition g = random_sos(rng, 3, 3, 9);
    const Matrix m = gram_form(g).flattened();
    const SosDecomposition d = extract_sos(m, 3, 3, 1e-9);
    for (std::size_t a = 0; a < d.terms.size(); ++a)
      for (std::size_t b = a + 1; b < d.terms.size(); ++b)
        CHECK(std::abs(d.terms[a].dot(d.terms[b])) <= 1e-10 * m.cwiseAbs().maxCoeff());
  }
  SUBCASE("indefinite input is rejected") {
    CHECK_THROWS_AS(extract_sos(flatten_b(from_quartic2x2(example32())), 2, 2, 1e-9), NotPsd);
    Matrix tiny = Matrix::Identity(4, 4);
    tiny(3, 3) = -1e-12;  // within tolerance: clamped
    CHECK(sos_rank(extract_sos(tiny, 2, 2, 1e-9)) == 3);
  }
}

TEST_CASE("sos_rank") {
  CHECK(sos_rank(SosDecomposition{2, 2, {}}) == 0);
  CHECK(sos_rank(SosDecomposition{2, 2, {Vector::Zero(4), Vector{{1e-13, 0, 0, 0}}, Vector{{0, 1, 0, 0}}}}) == 1);
  CHECK(sos_rank(extract_sos(Matrix::Identity(4, 4), 2, 2, 1e-9)) == 4);
}

TEST_CASE("rank bound over random instances") {
  Rng rng(1234);
  for (int t = 0; t < 30; ++t) {
    const int m = rng.integer(2, 4), n = rng.integer(2, 4);
    const SosDecomposition d = random_sos(rng, m, n, rng.integer(m * n, m * n + 5));
    const Matrix g = gram_form(d).flattened();
    for (Factorization route : {Factorization::Spectral, Factorization::PivotedCholesky}) {
      const SosDecomposition e = extract_sos(g, m, n, 1e-9, route);
      CHECK(sos_rank(e) <= m * n);
      CHECK(residual(g, e) <= 10 * 1e-9 * g.cwiseAbs().maxCoeff());
    }
  }
}
