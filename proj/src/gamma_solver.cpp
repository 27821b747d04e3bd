#include "bqsos/gamma_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bqsos/errors.hpp"

namespace bqsos {

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  const double skew = max_abs(m - m.transpose());
  if (skew > 1e-12 * std::max(1.0, max_abs(m)))
    throw NotSymmetric("matrix skew part " + std::to_string(skew) + " exceeds tolerance");
}

std::vector<GammaStencil> stencils(int m, int n) {
  std::vector<GammaStencil> out;
  for (int c = 0; c < choose2(n); ++c)
    for (int r = 0; r < choose2(m); ++r) out.push_back(gamma_stencil(m, n, r, c));
  return out;
}

// Parameter vector ↔ Γ, column-major to match Eigen's storage.
GammaMatrix to_gamma(int m, int n, const Vector& v) {
  return GammaMatrix(m, n, Eigen::Map<const Matrix>(v.data(), choose2(m), choose2(n)));
}

Matrix assemble(const Matrix& b, const std::vector<GammaStencil>& st, const Vector& g) {
  Matrix out = b;
  for (std::size_t p = 0; p < st.size(); ++p) {
    const auto& s = st[p];
    out(s.plus_row, s.plus_col) += g(p);
    out(s.plus_col, s.plus_row) += g(p);
    out(s.minus_row, s.minus_col) -= g(p);
    out(s.minus_col, s.minus_row) -= g(p);
  }
  return out;
}

double smallest(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct Tracker {
  SolveResult& result;
  Vector best_g;
  double best = -std::numeric_limits<double>::infinity();

  void record(const Vector& g, double lambda) {
    ++result.iterations;
    if (lambda > best) {
      best = lambda;
      best_g = g;
    }
    result.history.push_back({result.iterations, best});
  }
};

// Polyak supergradient ascent with target value 0. Returns when certified,
// stalled, or out of iterations.
void ascent(const Matrix& b, const std::vector<GammaStencil>& st, Vector g, double certify,
            double gap, int max_iters, Tracker& tr) {
  const int dim = static_cast<int>(b.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  double last_best = tr.best;
  int since_improved = 0;
  for (int it = 0; it < max_iters; ++it) {
    es.compute(assemble(b, st, g));
    const Vector& w = es.eigenvalues();
    const double lambda = w(0);
    tr.record(g, lambda);
    ++tr.result.ascent_iterations;
    if (lambda >= certify || st.empty()) return;

    int k = 1;
    while (k < dim && w(k) <= lambda + gap) ++k;
    Vector sg = Vector::Zero(static_cast<int>(st.size()));
    for (int r = 0; r < k; ++r) {
      const auto v = es.eigenvectors().col(r);
      for (std::size_t p = 0; p < st.size(); ++p)
        sg(p) += 2.0 * (v(st[p].plus_row) * v(st[p].plus_col) -
                        v(st[p].minus_row) * v(st[p].minus_col));
    }
    sg /= k;
    const double nn = sg.squaredNorm();
    if (!(nn > 1e-30)) return;
    g += (-lambda / nn) * sg;

    if (tr.best > last_best + 1e-9 * std::abs(last_best) + 1e-15) {
      last_best = tr.best;
      since_improved = 0;
    } else if (++since_improved >= 50) {
      return;
    }
  }
}

// Maximizes t + μ·logdet(M(Γ) - tI) along a decreasing μ path.
void barrier(const Matrix& b, const std::vector<GammaStencil>& st, double scale, double certify,
             int max_iters, Tracker& tr) {
  const int dim = static_cast<int>(b.rows());
  const int d = static_cast<int>(st.size());
  if (d == 0 || max_iters <= 0) return;
  Vector x(d + 1);
  x.head(d) = tr.best_g;
  x(d) = tr.best - 1e-2 * scale;
  double mu = 1e-2 * scale;

  auto slack = [&](const Vector& v) {
    Matrix s = assemble(b, st, v.head(d));
    s.diagonal().array() -= v(d);
    return s;
  };
  auto objective = [&](const Vector& v) {
    Eigen::LLT<Matrix> llt(slack(v));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (!std::isfinite(logdet)) return -std::numeric_limits<double>::infinity();
    return v(d) + mu * logdet;
  };

  int used = 0;
  while (used < max_iters) {
    for (int inner = 0; inner < 50 && used < max_iters; ++inner) {
      Eigen::LLT<Matrix> llt(slack(x));
      if (llt.info() != Eigen::Success) return;
      const Matrix si = llt.solve(Matrix::Identity(dim, dim));

      Vector grad(d + 1);
      Matrix h(d + 1, d + 1);
      // Products S⁻¹E_p for each direction; E_d = -I.
      std::vector<Matrix> se(d + 1);
      for (int p = 0; p < d; ++p) {
        const auto& s = st[p];
        grad(p) = 2.0 * mu * (si(s.plus_row, s.plus_col) - si(s.minus_row, s.minus_col));
        Matrix e = Matrix::Zero(dim, dim);
        e.col(s.plus_col) += si.col(s.plus_row);
        e.col(s.plus_row) += si.col(s.plus_col);
        e.col(s.minus_col) -= si.col(s.minus_row);
        e.col(s.minus_row) -= si.col(s.minus_col);
        se[p] = e;
      }
      grad(d) = 1.0 - mu * si.trace();
      se[d] = -si;
      for (int p = 0; p <= d; ++p)
        for (int q = p; q <= d; ++q) {
          const double v = -mu * (se[p].cwiseProduct(se[q].transpose())).sum();
          h(p, q) = h(q, p) = v;
        }
      const Vector dx = h.ldlt().solve(-grad);
      const double dec = grad.dot(dx);
      if (!std::isfinite(dec)) return;

      const double f0 = objective(x);
      double step = 1.0;
      while (objective(x + step * dx) < f0 + 0.25 * step * dec && step > 1e-12) step *= 0.5;
      x += step * dx;
      ++used;
      ++tr.result.newton_iterations;

      const double lambda = smallest(assemble(b, st, x.head(d)));
      tr.record(x.head(d), lambda);
      if (lambda >= certify) return;
      if (dec < 1e-10 * scale) break;
    }
    // On the central path the optimum is at most t + dim·μ.
    tr.result.lambda_upper_bound = std::min(tr.result.lambda_upper_bound, x(d) + dim * mu);
    mu *= 0.2;
    if (mu < 1e-16 * scale) return;
  }
}

}  // namespace

EigenPair min_eig(const Matrix& m) {
  check_symmetric(m);
  if (m.rows() == 0) throw DimensionError("min_eig of an empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigen-decomposition did not converge");
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

SolveResult solve_gamma(const BiquadraticForm& f, const SolveOptions& opts) {
  if (opts.max_iters < 1) throw Error("solve_gamma: max_iters must be >= 1");
  if (!(opts.psd_tol > 0.0)) throw Error("solve_gamma: psd_tol must be positive");
  const int m = f.m(), n = f.n();
  const Matrix& b = f.flattened();
  const double norm = max_abs(b);
  const double scale = norm > 0.0 ? norm : 1.0;
  const double certify = -opts.psd_tol * scale;
  const auto st = stencils(m, n);

  SolveResult result;
  result.scale = scale;
  result.lambda_upper_bound = std::numeric_limits<double>::infinity();
  Tracker tr{result, Vector::Zero(static_cast<int>(st.size()))};

  const int ascent_budget =
      opts.step_rule == StepRule::Polyak ? opts.max_iters : std::max(1, opts.max_iters / 2);
  ascent(b, st, Vector::Zero(static_cast<int>(st.size())), certify, opts.eigengap_tol * scale,
         ascent_budget, tr);
  if (tr.best < certify && opts.step_rule == StepRule::PolyakThenBarrier)
    barrier(b, st, scale, certify, opts.max_iters - result.iterations, tr);

  result.gamma = to_gamma(m, n, tr.best_g);
  result.lambda_min = tr.best;
  result.status = tr.best >= certify ? SolveStatus::SosCertified : SolveStatus::Inconclusive;
  return result;
}

SosDecomposition extract_sos(const Matrix& mat, int rows, int cols, double psd_tol,
                             Factorization route) {
  check_symmetric(mat);
  const int dim = rows * cols;
  if (mat.rows() != dim) throw DimensionError("extract_sos: matrix size is not m*n");
  const double norm = max_abs(mat);
  const double tol = psd_tol * (norm > 0.0 ? norm : 1.0);
  SosDecomposition out{rows, cols, {}};
  if (dim == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> es(mat);
  if (es.eigenvalues()(0) < -tol)
    throw NotPsd("extract_sos: smallest eigenvalue " + std::to_string(es.eigenvalues()(0)) +
                 " is below -psd_tol");

  if (route == Factorization::Spectral) {
    for (int k = dim - 1; k >= 0; --k) {
      const double w = es.eigenvalues()(k);
      if (w <= tol) break;
      out.terms.push_back(std::sqrt(w) * es.eigenvectors().col(k));
    }
    return out;
  }

  // Outer-product Cholesky with complete diagonal pivoting; stops once every
  // remaining pivot is within tolerance of zero.
  Matrix r = 0.5 * (mat + mat.transpose());
  for (int t = 0; t < dim; ++t) {
    int p = 0;
    const double pivot = r.diagonal().maxCoeff(&p);
    if (pivot <= tol) break;
    Vector c = r.col(p) / std::sqrt(pivot);
    r.noalias() -= c * c.transpose();
    r.col(p).setZero();
    r.row(p).setZero();
    out.terms.push_back(std::move(c));
  }
  return out;
}

SosDecomposition extract_certified(const BiquadraticForm& f, const SolveResult& result,
                                   double psd_tol, Factorization route) {
  const Matrix m = build_m(f, result.gamma);
  const double norm = max_abs(m);
  const double tol = norm > 0.0 ? psd_tol * std::max(1.0, result.scale / norm) * (1.0 + 1e-12) : psd_tol;
  return extract_sos(m, f.m(), f.n(), tol, route);
}

int sos_rank(const SosDecomposition& d) {
  int rank = 0;
  for (const Vector& t : d.terms)
    if (t.size() > 0 && t.cwiseAbs().maxCoeff() > 1e-12) ++rank;
  return rank;
}

}  // namespace bqsos
