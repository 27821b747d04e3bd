#include "bqsos/verification.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "bqsos/errors.hpp"
#include "bqsos/kernels.hpp"

namespace bqsos {

BiquadraticForm reconstruct(const SosDecomposition& d) {
  const int m = d.m, n = d.n, dim = m * n;
  MonomialCoefficients c(m, n);
  for (const Vector& term : d.terms) {
    if (term.size() != dim) throw DimensionError("reconstruct: term length differs from m*n");
    for (int s = 0; s < dim; ++s) {
      if (term(s) == 0.0) continue;
      for (int t = 0; t < dim; ++t) c.at(s / n, t / n, s % n, t % n) += term(s) * term(t);
    }
  }
  return from_monomials(c);
}

FormComparison compare_forms(const BiquadraticForm& f, const BiquadraticForm& g, double tol) {
  if (f.m() != g.m() || f.n() != g.n()) throw DimensionError("compare_forms: dimensions differ");
  const Matrix diff = monomial_coefficients(f).values() - monomial_coefficients(g).values();
  FormComparison out;
  out.max_abs_diff = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
  out.equal = out.max_abs_diff <= tol;
  return out;
}

std::optional<Counterexample> confirm_counterexample(const BiquadraticForm& f, const Vector& x,
                                                     const Vector& y, double abs_tol) {
  const double nx = x.norm(), ny = y.norm();
  if (!(nx > 0.0) || !(ny > 0.0) || !std::isfinite(nx) || !std::isfinite(ny)) return std::nullopt;
  Counterexample c{x / nx, y / ny, 0.0};
  c.value = evaluate(f, c.x, c.y);
  if (!(c.value < -abs_tol)) return std::nullopt;
  return c;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Candidate {
  double value;
  Vector x;
  Vector y;
};

// Keeps the k lowest-valued candidates.
class Lowest {
 public:
  explicit Lowest(std::size_t k) : k_(k) {}

  void offer(double value, const double* x, int m, const double* y, int n) {
    if (best_.size() == k_ && value >= best_.back().value) return;
    Candidate c{value, Eigen::Map<const Vector>(x, m), Eigen::Map<const Vector>(y, n)};
    auto pos = std::upper_bound(best_.begin(), best_.end(), value,
                                [](double v, const Candidate& e) { return v < e.value; });
    best_.insert(pos, std::move(c));
    if (best_.size() > k_) best_.pop_back();
  }

  void merge(const Lowest& other) {
    for (const Candidate& c : other.best_)
      offer(c.value, c.x.data(), static_cast<int>(c.x.size()), c.y.data(),
            static_cast<int>(c.y.size()));
  }

  const std::vector<Candidate>& items() const { return best_; }

 private:
  std::size_t k_;
  std::vector<Candidate> best_;
};

// Evaluates a block of (x, y) pairs through the dispatched kernels.
class BatchEvaluator {
 public:
  explicit BatchEvaluator(const BiquadraticForm& f)
      : m_(f.m()), n_(f.n()), dim_(f.dim()), b_(f.flattened()) {}

  void push(const double* x, const double* y) {
    xs_.insert(xs_.end(), x, x + m_);
    ys_.insert(ys_.end(), y, y + n_);
  }

  std::size_t pending() const { return xs_.size() / m_; }

  // Evaluates everything pushed so far into `best`; returns the number evaluated.
  std::size_t flush(Lowest& best) {
    const std::size_t count = pending();
    if (count == 0) return 0;
    zs_.resize(count * dim_);
    vals_.resize(count);
    for (std::size_t s = 0; s < count; ++s)
      kernels::kron({xs_.data() + s * m_, static_cast<std::size_t>(m_)},
                    {ys_.data() + s * n_, static_cast<std::size_t>(n_)},
                    {zs_.data() + s * dim_, static_cast<std::size_t>(dim_)});
    kernels::quad_form_batch({b_.data(), static_cast<std::size_t>(dim_ * dim_)},
                             static_cast<std::size_t>(dim_), zs_, vals_);
    for (std::size_t s = 0; s < count; ++s)
      best.offer(vals_[s], xs_.data() + s * m_, m_, ys_.data() + s * n_, n_);
    xs_.clear();
    ys_.clear();
    return count;
  }

 private:
  int m_, n_, dim_;
  Matrix b_;
  std::vector<double> xs_, ys_, zs_, vals_;
};

std::vector<Vector> structured_directions(int size) {
  std::vector<Vector> out;
  for (int i = 0; i < size; ++i) out.push_back(Vector::Unit(size, i));
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j)
      for (double sign : {1.0, -1.0}) {
        Vector v = Vector::Zero(size);
        v(i) = 1.0;
        v(j) = sign;
        out.push_back(v / std::sqrt(2.0));
      }
  if (size >= 3 && size <= 10) {
    // Sign patterns with first entry +1 (the form is even in x and in y).
    for (int mask = 0; mask < (1 << (size - 1)); ++mask) {
      Vector v(size);
      v(0) = 1.0;
      for (int i = 1; i < size; ++i) v(i) = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      out.push_back(v / std::sqrt(static_cast<double>(size)));
    }
  }
  return out;
}

// Minimizes f over the sphere product by alternating exact minimization:
// for fixed y, f is the quadratic form xᵀ A(y) x, minimized by the bottom eigenvector.
Candidate polish(const BiquadraticForm& f, Candidate c, int max_sweeps = 200) {
  const int m = f.m(), n = f.n();
  const Matrix& b = f.flattened();
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = c.value;
    Matrix a = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) s += b(i * n + j, k * n + l) * c.y(j) * c.y(l);
        a(i, k) = s;
      }
    es.compute(a);
    c.x = es.eigenvectors().col(0);
    Matrix cy = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
          for (int k = 0; k < m; ++k) s += b(i * n + j, k * n + l) * c.x(i) * c.x(k);
        cy(j, l) = s;
      }
    es.compute(cy);
    c.y = es.eigenvectors().col(0);
    c.value = es.eigenvalues()(0);
    if (!(before - c.value > 1e-15 * (1.0 + std::abs(before)))) break;
  }
  return c;
}

struct ChunkResult {
  Lowest best{8};
  std::size_t used = 0;
};

constexpr std::size_t kChunk = 4096;

ChunkResult uniform_chunk(const BiquadraticForm& f, std::uint64_t seed, std::size_t chunk,
                          std::size_t count) {
  ChunkResult r;
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(chunk + 1)));
  std::normal_distribution<double> normal;
  BatchEvaluator eval(f);
  const int m = f.m(), n = f.n();
  std::vector<double> x(m), y(n);
  for (std::size_t s = 0; s < count; ++s) {
    double nx = 0.0, ny = 0.0;
    do {
      nx = 0.0;
      for (double& v : x) {
        v = normal(rng);
        nx += v * v;
      }
    } while (nx == 0.0);
    do {
      ny = 0.0;
      for (double& v : y) {
        v = normal(rng);
        ny += v * v;
      }
    } while (ny == 0.0);
    nx = 1.0 / std::sqrt(nx);
    ny = 1.0 / std::sqrt(ny);
    for (double& v : x) v *= nx;
    for (double& v : y) v *= ny;
    eval.push(x.data(), y.data());
    if (eval.pending() == 1024) r.used += eval.flush(r.best);
  }
  r.used += eval.flush(r.best);
  return r;
}

}  // namespace

PsdVerdict sample_psd_check(const BiquadraticForm& f, const SampleOptions& opts) {
  if (opts.budget < 1) throw Error("sample_psd_check: budget must be >= 1");
  const int m = f.m(), n = f.n();
  PsdVerdict verdict;
  Lowest best(8);

  auto try_refute = [&](const std::vector<Candidate>& cands) {
    for (const Candidate& c : cands) {
      if (!(c.value < -opts.abs_tol)) break;
      if (auto ce = confirm_counterexample(f, c.x, c.y, opts.abs_tol)) {
        verdict.tag = PsdTag::Refuted;
        verdict.counterexample = std::move(ce);
        return true;
      }
    }
    return false;
  };

  std::size_t remaining = opts.budget;
  if (opts.strategies & kStructured) {
    BatchEvaluator eval(f);
    std::vector<Vector> dx = structured_directions(m), dy = structured_directions(n);
    if (m == 2 && n == 2) {
      // Angle grid on the torus; f is π-periodic in each angle.
      const int g = static_cast<int>(std::clamp(std::sqrt(static_cast<double>(opts.budget) / 4.0), 8.0, 256.0));
      dx.clear();
      for (int a = 0; a < g; ++a) {
        const double t = std::numbers::pi * a / g;
        Vector v(2);
        v << std::cos(t), std::sin(t);
        dx.push_back(v);
      }
      dy = dx;
    }
    for (const Vector& x : dx) {
      for (const Vector& y : dy) {
        if (remaining == 0) break;
        eval.push(x.data(), y.data());
        --remaining;
        if (eval.pending() == 1024) verdict.samples_used += eval.flush(best);
      }
    }
    verdict.samples_used += eval.flush(best);
    if (try_refute(best.items())) return verdict;
  }

  if ((opts.strategies & kUniform) && remaining > 0) {
    const std::size_t chunks = (remaining + kChunk - 1) / kChunk;
    const unsigned threads = std::max(1u, opts.threads);
    for (std::size_t first = 0; first < chunks; first += threads) {
      const std::size_t group = std::min<std::size_t>(threads, chunks - first);
      std::vector<ChunkResult> results(group);
      auto run = [&](std::size_t g) {
        const std::size_t chunk = first + g;
        const std::size_t count = std::min(kChunk, remaining - chunk * kChunk);
        results[g] = uniform_chunk(f, opts.seed, chunk, count);
      };
      if (group == 1) {
        run(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t g = 0; g < group; ++g) pool.emplace_back(run, g);
        for (auto& t : pool) t.join();
      }
      for (const ChunkResult& r : results) {
        best.merge(r.best);
        verdict.samples_used += r.used;
      }
      if (try_refute(best.items())) return verdict;
    }
  }

  if (opts.strategies & kPolish) {
    std::vector<Candidate> polished;
    for (const Candidate& c : best.items()) polished.push_back(polish(f, c));
    std::sort(polished.begin(), polished.end(),
              [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    if (try_refute(polished)) return verdict;
  }
  return verdict;
}

}  // namespace bqsos
