#include "bqsos/tripartite.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bqsos/errors.hpp"
#include "bqsos/verification.hpp"

namespace bqsos {

namespace {

// Position of original index `v` among the non-pivot indices, or -1 for the pivot.
int tail_index(int v, int pivot) { return v == pivot ? -1 : (v < pivot ? v : v - 1); }
int original_index(int t, int pivot) { return t < pivot ? t : t + 1; }

void add_h2(Matrix& h2, int s, int t, double c) {
  if (s == t) {
    h2(s, s) += c;
  } else {
    h2(s, t) += 0.5 * c;
    h2(t, s) += 0.5 * c;
  }
}

}  // namespace

double TripartiteQuartic::h2_value(const Vector& x, const Vector& y) const {
  Vector w(p + q);
  w << x, y;
  return w.dot(h2 * w);
}

double TripartiteQuartic::h3_value(const Vector& x, const Vector& y) const {
  double s = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = b; c < q; ++c)
        s += h3x(a, MonomialCoefficients::sym_pair(b, c, q)) * x(a) * y(b) * y(c);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b)
      for (int c = 0; c < q; ++c)
        s += h3y(MonomialCoefficients::sym_pair(a, b, p), c) * x(a) * x(b) * y(c);
  return s;
}

TripartiteQuartic to_tripartite(const BiquadraticForm& f, int pivot_i, int pivot_j) {
  const int m = f.m(), n = f.n();
  if (m < 2 || n < 2) throw DimensionError("to_tripartite needs m >= 2 and n >= 2");
  if (pivot_i == 0) pivot_i = m;
  if (pivot_j == 0) pivot_j = n;
  if (pivot_i < 1 || pivot_i > m || pivot_j < 1 || pivot_j > n)
    throw InvalidIndex("pivot out of range");

  TripartiteQuartic h;
  h.p = m - 1;
  h.q = n - 1;
  h.pivot_i = pivot_i;
  h.pivot_j = pivot_j;
  const int p = h.p, q = h.q;
  h.h1 = Vector::Zero(p + q);
  h.h2 = Matrix::Zero(p + q, p + q);
  h.h3x = Matrix::Zero(p, q * (q + 1) / 2);
  h.h3y = Matrix::Zero(p * (p + 1) / 2, q);
  MonomialCoefficients h4(p, q);

  const MonomialCoefficients c = monomial_coefficients(f);
  const int pi = pivot_i - 1, pj = pivot_j - 1;
  for (int i = 0; i < m; ++i)
    for (int k = i; k < m; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) {
          const double v = c.at(i, k, j, l);
          if (v == 0.0) continue;
          // Tail indices with the pivot removed; x parts sorted so the pivot comes last.
          int xs[2] = {tail_index(i, pi), tail_index(k, pi)};
          int ys[2] = {tail_index(j, pj), tail_index(l, pj)};
          if (xs[0] < 0) std::swap(xs[0], xs[1]);
          if (ys[0] < 0) std::swap(ys[0], ys[1]);
          const int zx = (xs[0] < 0) + (xs[1] < 0);
          const int zy = (ys[0] < 0) + (ys[1] < 0);
          switch (zx + zy) {
            case 4:
              h.h0 += v;
              break;
            case 3:
              if (zx == 2) h.h1(p + ys[0]) += v;
              else h.h1(xs[0]) += v;
              break;
            case 2:
              if (zx == 2) add_h2(h.h2, p + ys[0], p + ys[1], v);
              else if (zy == 2) add_h2(h.h2, xs[0], xs[1], v);
              else add_h2(h.h2, xs[0], p + ys[0], v);
              break;
            case 1:
              if (zx == 1) h.h3x(xs[0], MonomialCoefficients::sym_pair(ys[0], ys[1], q)) += v;
              else h.h3y(MonomialCoefficients::sym_pair(xs[0], xs[1], p), ys[0]) += v;
              break;
            default:
              h4.at(xs[0], xs[1], ys[0], ys[1]) += v;
          }
        }
  h.h4 = from_monomials(h4);
  return h;
}

BiquadraticForm from_tripartite(const TripartiteQuartic& h) {
  const int p = h.p, q = h.q, m = p + 1, n = q + 1;
  if (p < 1 || q < 1) throw DimensionError("from_tripartite: empty block");
  if (h.h1.size() != p + q || h.h2.rows() != p + q || h.h2.cols() != p + q ||
      h.h3x.rows() != p || h.h3x.cols() != q * (q + 1) / 2 || h.h3y.rows() != p * (p + 1) / 2 ||
      h.h3y.cols() != q || h.h4.m() != p || h.h4.n() != q)
    throw DimensionError("from_tripartite: component shapes are inconsistent");
  const int pi = h.pivot_i - 1, pj = h.pivot_j - 1;
  if (pi < 0 || pi >= m || pj < 0 || pj >= n) throw InvalidIndex("pivot out of range");

  auto xi = [&](int s) { return s < 0 ? pi : original_index(s, pi); };
  auto yj = [&](int s) { return s < 0 ? pj : original_index(s, pj); };
  MonomialCoefficients c(m, n);
  auto add = [&](int x1, int x2, int y1, int y2, double v) {
    if (v != 0.0) c.at(xi(x1), xi(x2), yj(y1), yj(y2)) += v;
  };

  add(-1, -1, -1, -1, h.h0);
  for (int s = 0; s < p; ++s) add(s, -1, -1, -1, h.h1(s));
  for (int s = 0; s < q; ++s) add(-1, -1, s, -1, h.h1(p + s));
  for (int s = 0; s < p + q; ++s)
    for (int t = s; t < p + q; ++t) {
      const double v = s == t ? h.h2(s, s) : h.h2(s, t) + h.h2(t, s);
      if (t < p) add(s, t, -1, -1, v);
      else if (s >= p) add(-1, -1, s - p, t - p, v);
      else add(s, -1, t - p, -1, v);
    }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b)
      for (int d = b; d < q; ++d) add(a, -1, b, d, h.h3x(a, MonomialCoefficients::sym_pair(b, d, q)));
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b)
      for (int d = 0; d < q; ++d) add(a, b, d, -1, h.h3y(MonomialCoefficients::sym_pair(a, b, p), d));
  const MonomialCoefficients c4 = monomial_coefficients(h.h4);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b)
      for (int d = 0; d < q; ++d)
        for (int e = d; e < q; ++e) add(a, b, d, e, c4.at(a, b, d, e));
  return from_monomials(c);
}

double evaluate(const TripartiteQuartic& h, const Vector& x, const Vector& y, double z) {
  if (x.size() != h.p || y.size() != h.q) throw DimensionError("tripartite evaluate: length mismatch");
  Vector w(h.p + h.q);
  w << x, y;
  const double z2 = z * z;
  return h.h0 * z2 * z2 + h.h1.dot(w) * z2 * z + h.h2_value(x, y) * z2 + h.h3_value(x, y) * z +
         evaluate(h.h4, x, y);
}

const char* tag_name(TripartiteTag tag) {
  switch (tag) {
    case TripartiteTag::Nondegenerate: return "Nondegenerate";
    case TripartiteTag::Degenerate: return "Degenerate";
    case TripartiteTag::RefutedPsd: return "RefutedPsd";
    case TripartiteTag::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* state_name(CheckState state) {
  switch (state) {
    case CheckState::Passed: return "passed";
    case CheckState::Failed: return "failed";
    case CheckState::NoCounterexampleFound: return "no_counterexample_found";
    case CheckState::Skipped: return "skipped";
  }
  return "?";
}

namespace {

double component_scale(const TripartiteQuartic& h) {
  double s = std::abs(h.h0);
  if (h.h1.size()) s = std::max(s, h.h1.cwiseAbs().maxCoeff());
  if (h.h2.size()) s = std::max(s, h.h2.cwiseAbs().maxCoeff());
  if (h.h3x.size()) s = std::max(s, h.h3x.cwiseAbs().maxCoeff());
  if (h.h3y.size()) s = std::max(s, h.h3y.cwiseAbs().maxCoeff());
  return std::max(s, h.h4.max_abs_coefficient());
}

// Walks z outward (doubling) from a direction w along which h → -∞, and
// returns the first confirmed negative point.
std::optional<TripartiteWitness> push_z(const TripartiteQuartic& h, const Vector& w, double sign,
                                        double abs_tol) {
  const Vector x = w.head(h.p), y = w.tail(h.q);
  for (double z = 1.0; z < 1e150; z *= 2.0) {
    const double v = evaluate(h, x, y, sign * z);
    if (v < -abs_tol) return TripartiteWitness{x, y, sign * z, v};
  }
  return std::nullopt;
}

std::optional<TripartiteWitness> composite_witness(const TripartiteQuartic& h, const Vector& w,
                                                   double abs_tol) {
  const Vector x = w.head(h.p), y = w.tail(h.q);
  const double a = h.h2_value(x, y), b = h.h3_value(x, y), c = evaluate(h.h4, x, y);
  double z;
  if (a > 0.0) z = -b / (2.0 * a);
  else if (b != 0.0) z = -(std::abs(c) + 1.0) / b;
  else return std::nullopt;
  const double v = evaluate(h, x, y, z);
  if (v < -abs_tol) return TripartiteWitness{x, y, z, v};
  return std::nullopt;
}

// Samples 4 h2 h4 - h3² on the unit sphere of w = (x, y); returns the lowest point.
std::pair<double, Vector> sample_composite(const TripartiteQuartic& h, const ClassifyOptions& opts) {
  const int d = h.p + h.q;
  auto comp = [&](const Vector& w) {
    const Vector x = w.head(h.p), y = w.tail(h.q);
    const double h3 = h.h3_value(x, y);
    return 4.0 * h.h2_value(x, y) * evaluate(h.h4, x, y) - h3 * h3;
  };
  double best = std::numeric_limits<double>::infinity();
  Vector best_w = Vector::Unit(d, 0);
  std::size_t used = 0;
  auto offer = [&](const Vector& w) {
    ++used;
    const double v = comp(w);
    if (v < best) {
      best = v;
      best_w = w;
    }
  };
  for (int s = 0; s < d && used < opts.budget; ++s) offer(Vector::Unit(d, s));
  for (int s = 0; s < d; ++s)
    for (int t = s + 1; t < d && used < opts.budget; ++t)
      for (double sg : {1.0, -1.0}) {
        Vector w = Vector::Zero(d);
        w(s) = 1.0;
        w(t) = sg;
        offer(w / std::sqrt(2.0));
      }
  std::mt19937_64 rng(opts.seed ^ 0x7472697061727469ull);
  std::normal_distribution<double> normal;
  Vector w(d);
  while (used < opts.budget) {
    for (int s = 0; s < d; ++s) w(s) = normal(rng);
    const double nw = w.norm();
    if (nw == 0.0) continue;
    offer(w / nw);
  }
  return {best, best_w};
}

}  // namespace

TripartiteClass classify(const TripartiteQuartic& h, const ClassifyOptions& opts) {
  if (opts.budget < 1) throw Error("classify: budget must be >= 1");
  TripartiteClass out;
  const double scale = std::max(component_scale(h), 1e-300);
  const double tol = opts.abs_tol;
  auto fail = [&](ConditionCheck check) {
    out.details.push_back(std::move(check));
    out.tag = TripartiteTag::RefutedPsd;
    return out;
  };

  ConditionCheck h0;
  h0.name = "h0";
  if (h.h0 < 0.0) {
    h0.state = CheckState::Failed;
    h0.witness = TripartiteWitness{Vector::Zero(h.p), Vector::Zero(h.q), 1.0, h.h0};
    return fail(h0);
  }
  h0.state = CheckState::Passed;
  h0.note = h.h0 > 0.0 ? "h0 > 0" : "h0 = 0";
  out.details.push_back(h0);

  SampleOptions so;
  so.budget = opts.budget;
  so.abs_tol = tol;
  so.seed = opts.seed;
  so.threads = opts.threads;

  auto check_h4 = [&]() -> std::optional<ConditionCheck> {
    ConditionCheck c;
  c.name = "h4_psd";
    const PsdVerdict v = sample_psd_check(h.h4, so);
    if (v.tag == PsdTag::Refuted) {
      c.state = CheckState::Failed;
      const auto& ce = *v.counterexample;
      c.witness = TripartiteWitness{ce.x, ce.y, 0.0, evaluate(h, ce.x, ce.y, 0.0)};
      return c;
    }
    c.state = CheckState::NoCounterexampleFound;
    out.details.push_back(c);
    return std::nullopt;
  };

  if (h.h0 > 0.0) {
    if (auto failed = check_h4()) return fail(*failed);
    out.tag = TripartiteTag::Nondegenerate;
    return out;
  }

  ConditionCheck h1;
  h1.name = "h1_zero";
  if ((h.h1.array() != 0.0).any()) {
    h1.state = CheckState::Failed;
    h1.witness = push_z(h, -h.h1 / h.h1.norm(), 1.0, tol);
    if (!h1.witness) {
      h1.note = "no confirmed negative point along -h1";
      out.details.push_back(h1);
      out.tag = TripartiteTag::Indeterminate;
      return out;
    }
    return fail(h1);
  }
  h1.state = CheckState::Passed;
  out.details.push_back(h1);

  ConditionCheck h2;
  h2.name = "h2_psd";
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.h2);
  if (es.eigenvalues()(0) < -1e-12 * scale) {
    h2.state = CheckState::Failed;
    h2.witness = push_z(h, es.eigenvectors().col(0), 1.0, tol);
    if (!h2.witness) {
      h2.note = "no confirmed negative point along the h2 eigenvector";
      out.details.push_back(h2);
      out.tag = TripartiteTag::Indeterminate;
      return out;
    }
    return fail(h2);
  }
  h2.state = CheckState::Passed;
  out.details.push_back(h2);

  if (auto failed = check_h4()) return fail(*failed);

  ConditionCheck comp;
  comp.name = "composite_psd";
  const auto [value, w] = sample_composite(h, opts);
  if (value < -tol * scale * scale) {
    comp.state = CheckState::Failed;
    comp.witness = composite_witness(h, w, tol);
    if (!comp.witness) {
      comp.note = "negative composite value without a confirmed negative point";
      out.details.push_back(comp);
      out.tag = TripartiteTag::Indeterminate;
      return out;
    }
    return fail(comp);
  }
  comp.state = CheckState::NoCounterexampleFound;
  out.details.push_back(comp);
  out.tag = TripartiteTag::Degenerate;
  return out;
}

std::vector<std::pair<int, int>> h0_zero_criterion(const BiquadraticForm& f) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.n(); ++j)
      if (f(i, j, i, j) == 0.0) out.emplace_back(i + 1, j + 1);
  return out;
}

}  // namespace bqsos
