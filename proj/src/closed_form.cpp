#include "bqsos/closed_form.hpp"

#include <cmath>
#include <limits>

#include "bqsos/errors.hpp"

namespace bqsos {

namespace {

using Eigen::Matrix2d;

Vector zvec(double e0, double e1, double e2, double e3) {
  Vector v(4);
  v << e0, e1, e2, e3;
  return v;
}

Vector pt(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

double root(double v) { return std::sqrt(std::max(0.0, v)); }
double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

Matrix2d diag(double a, double b) {
  Matrix2d m = Matrix2d::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

bool is_identity(const SubstitutionRecord& s) {
  return !s.swap_xy && s.lx == Matrix2d::Identity() && s.ly == Matrix2d::Identity();
}

double witness_tol(const Quartic2x2& f) { return 1e-12 * std::max(1.0, f.max_abs()); }

SosDecomposition make_sos(std::vector<Vector> terms) {
  SosDecomposition d{2, 2, {}};
  for (Vector& t : terms)
    if (t.cwiseAbs().maxCoeff() > 0.0) d.terms.push_back(std::move(t));
  return d;
}

// Reconstruction must match f within rel_tol of its largest coefficient.
void require_reconstruction(const Quartic2x2& f, const SosDecomposition& d, double rel_tol,
                            const std::string& where) {
  const double scale = std::max(f.max_abs(), std::numeric_limits<double>::min());
  const FormComparison c = compare_forms(reconstruct(d), from_quartic2x2(f), rel_tol * scale);
  if (!c.equal)
    throw NumericalFailure(where + ": SOS reconstruction differs by " +
                           std::to_string(c.max_abs_diff / scale) + " (relative)");
}

std::pair<Vector, Vector> pull_back_chain(Vector u, Vector v,
                                          const std::vector<SubstitutionRecord>& subs) {
  for (auto it = subs.rbegin(); it != subs.rend(); ++it) std::tie(u, v) = pull_back_point(u, v, *it);
  return {u, v};
}

std::optional<Counterexample> sample_refute(const Quartic2x2& f, const SampleOptions& sampler) {
  const PsdVerdict v = sample_psd_check(from_quartic2x2(f), sampler);
  return v.counterexample;
}

ClosedFormCertificate not_psd(Counterexample w, std::string branch) {
  ClosedFormCertificate c;
  c.tag = CaseTag::NotPsdWitness;
  c.branch = std::move(branch);
  c.witness = std::move(w);
  return c;
}

// Confirms a constructed point (in the variables after `subs`) against f,
// falling back to the sampling refuter. Returns nullopt if neither succeeds.
std::optional<Counterexample> confirm_or_sample(const Quartic2x2& f, const Vector& u,
                                                const Vector& v,
                                                const std::vector<SubstitutionRecord>& subs,
                                                const SampleOptions& sampler) {
  const auto [x, y] = pull_back_chain(u, v, subs);
  if (auto w = confirm_counterexample(from_quartic2x2(f), x, y, witness_tol(f))) return w;
  return sample_refute(f, sampler);
}

ClosedFormCertificate fallback(const Quartic2x2& f, const DispatchOptions& opts, std::string why) {
  ClosedFormCertificate c;
  c.tag = CaseTag::Fallback;
  c.branch = std::move(why);
  const BiquadraticForm form = from_quartic2x2(f);
  SolveResult r = solve_gamma(form, opts.solver);
  if (r.status == SolveStatus::SosCertified) {
    c.sos = extract_certified(form, r, opts.solver.psd_tol);
    require_reconstruction(f, *c.sos, 100.0 * opts.solver.psd_tol, "solver fallback");
  } else if (auto w = sample_refute(f, opts.sampler)) {
    c.tag = CaseTag::NotPsdWitness;
    c.witness = std::move(w);
  }
  c.solve = std::move(r);
  return c;
}

// Terms for A11 x1²y1² + A12 x1²y2² + A21 x2²y1² + A22 x2²y2² - 4 x1x2y1y2,
// assuming sqrt(A11 A22) + sqrt(A12 A21) >= 2 (tiny negative remainders are clamped).
std::vector<Vector> cross4_terms(double a11, double a12, double a21, double a22,
                                 std::string& branch) {
  const double p = root(a11 * a22), r = root(a12 * a21);
  if (p >= 2.0 || (r < 2.0 && !(a21 > 0.0))) {
    branch = "diagonal pair x1y1/x2y2 dominates";
    return {zvec(root(a11 - 4.0 / a22), 0, 0, 0), zvec(0, root(a12), 0, 0),
            zvec(0, 0, root(a21), 0), zvec(2.0 / std::sqrt(a22), 0, 0, -std::sqrt(a22))};
  }
  if (r >= 2.0) {
    branch = "anti-diagonal pair x1y2/x2y1 dominates";
    return {zvec(root(a11), 0, 0, 0), zvec(0, root(a12 - 4.0 / a21), 0, 0),
            zvec(0, 2.0 / std::sqrt(a21), -std::sqrt(a21), 0), zvec(0, 0, 0, root(a22))};
  }
  branch = "both pairs share the cross term";
  const double s = 2.0 - p;
  return {zvec(root(a11), 0, 0, -root(a22)), zvec(0, s / std::sqrt(a21), -std::sqrt(a21), 0),
          zvec(0, root(a12 - s * s / a21), 0, 0)};
}

// Scaling x2, y2 by sqrt(4/|b|) with a sign on x2 so the cross coefficient becomes -4.
SubstitutionRecord cross_normalization(double b, double& t) {
  t = std::sqrt(4.0 / std::abs(b));
  SubstitutionRecord s;
  s.tag = SubstitutionTag::Normalize;
  s.lx = diag(1.0, (b > 0.0 ? -1.0 : 1.0) / t);
  s.ly = diag(1.0, 1.0 / t);
  return s;
}

int bisect_steps(double& lo, double& hi, const auto& positive_at) {
  int it = 0;
  for (; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi)) && it > 60) break;
    if (positive_at(mid)) lo = mid;
    else hi = mid;
  }
  return it;
}

}  // namespace

const char* substitution_name(SubstitutionTag tag) {
  switch (tag) {
    case SubstitutionTag::Prop41Shear: return "Prop41Shear";
    case SubstitutionTag::Prop42Shear: return "Prop42Shear";
    case SubstitutionTag::Scale: return "Scale";
    case SubstitutionTag::SignFlip: return "SignFlip";
    case SubstitutionTag::Normalize: return "Normalize";
    case SubstitutionTag::SwapXY: return "SwapXY";
  }
  return "?";
}

const char* case_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::CaseI: return "CaseI";
    case CaseTag::CaseII: return "CaseII";
    case CaseTag::CaseIII: return "CaseIII";
    case CaseTag::NotPsdWitness: return "NotPsdWitness";
    case CaseTag::Fallback: return "Fallback";
  }
  return "?";
}

Eigen::Matrix4d SubstitutionRecord::z_map() const {
  Eigen::Matrix4d t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) t(i * 2 + j, k * 2 + l) = lx(i, k) * ly(j, l);
  if (swap_xy) {
    Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) p(a * 2 + b, b * 2 + a) = 1.0;
    t = p * t;
  }
  return t;
}

namespace {

void require_invertible(const SubstitutionRecord& s) {
  const double dx = s.lx.determinant(), dy = s.ly.determinant();
  if (!(std::isfinite(dx) && std::isfinite(dy)) || dx == 0.0 || dy == 0.0)
    throw InvalidSubstitution(std::string("singular substitution (") + substitution_name(s.tag) + ")");
}

}  // namespace

Quartic2x2 apply_substitution(const Quartic2x2& f, const SubstitutionRecord& s) {
  require_invertible(s);
  const Matrix tinv = s.z_map().inverse();
  const Matrix b = tinv.transpose() * from_quartic2x2(f).flattened() * tinv;
  return to_quartic2x2(BiquadraticForm::from_flattened(2, 2, b));
}

std::pair<Vector, Vector> pull_back_point(const Vector& u, const Vector& v,
                                          const SubstitutionRecord& s) {
  require_invertible(s);
  if (u.size() != 2 || v.size() != 2) throw DimensionError("pull_back_point expects 2-vectors");
  const Vector& xs = s.swap_xy ? v : u;
  const Vector& ys = s.swap_xy ? u : v;
  return {s.lx.inverse() * xs, s.ly.inverse() * ys};
}

SosDecomposition pull_back(const SosDecomposition& sos, const std::vector<SubstitutionRecord>& subs) {
  if (sos.m != 2 || sos.n != 2) throw DimensionError("pull_back expects a 2x2 decomposition");
  SosDecomposition out = sos;
  for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
    require_invertible(*it);
    const Eigen::Matrix4d tt = it->z_map().transpose();
    for (Vector& c : out.terms) {
      if (c.size() != 4) throw DimensionError("pull_back: term length is not 4");
      c = tt * c;
    }
  }
  return out;
}

NecessaryCheck psd_necessary(const Quartic2x2& f) {
  NecessaryCheck out;
  const BiquadraticForm form = from_quartic2x2(f);
  // A violation only counts once its witness is negative beyond rounding; low-rank
  // SOS inputs sit exactly on these boundaries.
  auto violated = [&](std::string what, const Vector& x, const Vector& y) {
    const double v = evaluate(form, x, y);
    if (v >= -witness_tol(f)) return false;
    out.pass = false;
    out.violated = std::move(what);
    out.witness = Counterexample{x, y, v};
    return true;
  };
  const Vector e1 = pt(1, 0), e2 = pt(0, 1);
  if (f.a11 < 0.0 && violated("a11 >= 0", e1, e1)) return out;
  if (f.a12 < 0.0 && violated("a12 >= 0", e1, e2)) return out;
  if (f.a21 < 0.0 && violated("a21 >= 0", e2, e1)) return out;
  if (f.a22 < 0.0 && violated("a22 >= 0", e2, e2)) return out;

  // Restricting one side to a basis vector leaves a binary quadratic form.
  auto bottom = [](double p, double c, double q) {
    Eigen::Matrix2d m;
    m << p, 0.5 * c, 0.5 * c, q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    return Vector(es.eigenvectors().col(0));
  };
  if (4.0 * f.a11 * f.a12 < f.cx1 * f.cx1 &&
      violated("4*a11*a12 >= cx1^2", e1, bottom(f.a11, f.cx1, f.a12)))
    return out;
  if (4.0 * f.a11 * f.a21 < f.cy1 * f.cy1 &&
      violated("4*a11*a21 >= cy1^2", bottom(f.a11, f.cy1, f.a21), e1))
    return out;
  if (4.0 * f.a12 * f.a22 < f.cy2 * f.cy2 &&
      violated("4*a12*a22 >= cy2^2", bottom(f.a12, f.cy2, f.a22), e2))
    return out;
  if (4.0 * f.a21 * f.a22 < f.cx2 * f.cx2 &&
      violated("4*a21*a22 >= cx2^2", e2, bottom(f.a21, f.cx2, f.a22)))
    return out;
  return out;
}

std::pair<Quartic2x2, SubstitutionRecord> reduce_prop41(const Quartic2x2& f) {
  const NecessaryCheck nc = psd_necessary(f);
  if (!nc.pass) throw NotPsdInput("reduce_prop41: " + nc.violated + " fails");
  SubstitutionRecord s;
  s.tag = SubstitutionTag::Prop41Shear;
  if (f.cx2 == 0.0 || f.a21 == 0.0) return {f, s};
  const double k = f.cx2 / (2.0 * f.a21);
  s.ly(0, 1) = k;
  Quartic2x2 g = f;
  g.a12 = f.a11 * k * k + f.a12 - f.cx1 * k;
  g.a22 = f.a22 - f.cx2 * f.cx2 / (4.0 * f.a21);
  g.b = f.b - f.cy1 * f.cx2 / f.a21;
  g.cx1 = f.cx1 - f.a11 * f.cx2 / f.a21;
  g.cy2 = f.cy2 + f.cy1 * f.cx2 * f.cx2 / (4.0 * f.a21 * f.a21) - f.b * f.cx2 / (2.0 * f.a21);
  g.cx2 = 0.0;
  return {g, s};
}

std::pair<Quartic2x2, SubstitutionRecord> reduce_prop42(const Quartic2x2& g) {
  if (g.cx2 != 0.0) throw WrongCase("reduce_prop42 expects cx2 = 0");
  const NecessaryCheck nc = psd_necessary(g);
  if (!nc.pass) throw NotPsdInput("reduce_prop42: " + nc.violated + " fails");
  SubstitutionRecord s;
  s.tag = SubstitutionTag::Prop42Shear;
  if (g.cy2 == 0.0 || g.a22 == 0.0) return {g, s};
  const double mu = g.cy2 / (2.0 * g.a22);
  s.lx(1, 0) = mu;
  Quartic2x2 h = g;
  h.a11 = g.a11 + g.a21 * mu * mu - g.cy1 * mu;
  h.a12 = g.a12 - g.cy2 * g.cy2 / (4.0 * g.a22);
  h.cx1 = g.cx1 - g.b * mu;
  h.cy1 = g.cy1 - g.a21 * g.cy2 / g.a22;
  h.cy2 = 0.0;
  return {h, s};
}

ClosedFormCertificate case1_decompose(const Quartic2x2& f, const SampleOptions& sampler) {
  if (f.cx1 != 0.0 || f.cx2 != 0.0 || f.cy1 != 0.0 || f.cy2 != 0.0)
    throw WrongCase("case1_decompose expects no half-cross terms");
  const NecessaryCheck nc = psd_necessary(f);
  if (!nc.pass) return not_psd(*nc.witness, "necessary condition " + nc.violated);

  ClosedFormCertificate c;
  c.tag = CaseTag::CaseI;
  if (f.b == 0.0) {
    c.branch = "diagonal";
    c.sos = make_sos({zvec(root(f.a11), 0, 0, 0), zvec(0, root(f.a12), 0, 0),
                      zvec(0, 0, root(f.a21), 0), zvec(0, 0, 0, root(f.a22))});
    require_reconstruction(f, *c.sos, 1e-9, "case I");
    return c;
  }

  double t = 0.0;
  const SubstitutionRecord s = cross_normalization(f.b, t);
  const double a11 = f.a11, a12 = f.a12 * t * t, a21 = f.a21 * t * t, a22 = f.a22 * t * t * t * t;
  const double lhs = root(f.a11 * f.a22) + root(f.a12 * f.a21);
  c.params["sqrt_a11a22_plus_sqrt_a12a21"] = lhs;
  c.params["half_abs_b"] = std::abs(f.b) / 2.0;

  if (lhs >= std::abs(f.b) / 2.0) {
    c.substitutions.push_back(s);
    std::string branch;
    c.sos = pull_back(make_sos(cross4_terms(a11, a12, a21, a22, branch)), {s});
    c.branch = branch;
    require_reconstruction(f, *c.sos, 1e-9, "case I");
    return c;
  }

  // Both squares of the shared-cross reformulation vanish at x2 = y2 = 1 with
  // x1 = sqrt(a21 sqrt(a22) / (sqrt(a11) (2 - s))), y1 = (2 - s) x1 / a21.
  const double p = std::sqrt(a11 * a22);
  std::optional<Counterexample> w;
  if (a11 > 0.0 && a21 > 0.0 && a22 > 0.0) {
    const double x1 = std::sqrt(a21 * std::sqrt(a22) / (std::sqrt(a11) * (2.0 - p)));
    const double y1 = (2.0 - p) * x1 / a21;
    w = confirm_or_sample(f, pt(x1, 1), pt(y1, 1), {s}, sampler);
  } else {
    w = sample_refute(f, sampler);
  }
  if (!w) throw NumericalFailure("case I: inequality fails but no negative point was confirmed");
  auto out = not_psd(*w, "sqrt(a11*a22) + sqrt(a12*a21) < |b|/2");
  out.params = c.params;
  out.substitutions.push_back(s);
  return out;
}

ClosedFormCertificate case2_decompose(const Quartic2x2& f, const SampleOptions& sampler) {
  if (f.cx1 != 0.0 || f.cx2 != 0.0 || f.cy2 != 0.0)
    throw WrongCase("case2_decompose expects cy1 as the only half-cross term");
  if (f.cy1 == 0.0) return case1_decompose(f, sampler);
  const NecessaryCheck nc = psd_necessary(f);
  if (!nc.pass) return not_psd(*nc.witness, "necessary condition " + nc.violated);

  ClosedFormCertificate c;
  c.tag = CaseTag::CaseII;
  if (f.b == 0.0) {
    // y1²(a11 x1² + cy1 x1x2 + a21 x2²) completed to a square; a11 > 0 since 4 a11 a21 >= cy1² > 0.
    c.branch = "no full-cross term";
    const double r = root(f.a11);
    c.sos = make_sos({zvec(r, 0, f.cy1 / (2.0 * r), 0),
                      zvec(0, 0, root(f.a21 - f.cy1 * f.cy1 / (4.0 * f.a11)), 0),
                      zvec(0, root(f.a12), 0, 0), zvec(0, 0, 0, root(f.a22))});
    require_reconstruction(f, *c.sos, 1e-9, "case II");
    return c;
  }

  double t = 0.0;
  const SubstitutionRecord s = cross_normalization(f.b, t);
  const double a11 = f.a11, a12 = f.a12 * t * t, a21 = f.a21 * t * t, a22 = f.a22 * t * t * t * t;
  const double cy = f.cy1 * (f.b > 0.0 ? -1.0 : 1.0) * t;
  const double c2 = cy * cy;
  const double lo0 = c2 / (4.0 * a21), hi0 = a11;

  auto g = [&](double a112) { return root((a11 - a112) * a22) + root(a12 * (a21 - c2 / (4.0 * a112))); };
  double star;
  if (a12 > 0.0 && a22 > 0.0 && hi0 > lo0) {
    auto dg_positive = [&](double a112) {
      const double first = std::sqrt(a22) / (2.0 * std::sqrt(a11 - a112));
      const double second =
          std::sqrt(a12) * c2 / (4.0 * a112 * a112) / (2.0 * root(a21 - c2 / (4.0 * a112)));
      return second > first;
    };
    double lo = lo0, hi = hi0;
    bisect_steps(lo, hi, dg_positive);
    star = 0.5 * (lo + hi);
  } else if (a22 == 0.0) {
    star = hi0;
  } else {
    star = lo0;
  }
  const double gstar = g(star);
  c.substitutions.push_back(s);
  c.params["a112_star"] = star;
  c.params["g_star"] = gstar;
  c.params["cy1_normalized"] = cy;

  if (gstar >= 2.0 - 1e-12) {
    const double a112 = star, a212 = c2 / (4.0 * a112);
    const double a111 = std::max(0.0, a11 - a112), a211 = std::max(0.0, a21 - a212);
    c.params["a111"] = a111;
    c.params["a112"] = a112;
    c.params["a211"] = a211;
    c.params["a212"] = a212;

    // φ from the existence argument; its root η0 is reported, the split uses a112*.
    if (a12 > 0.0 && a22 > 0.0 && hi0 > lo0) {
      auto phi = [&](double e) {
        const double b111 = std::max(0.0, a11 - e), b211 = std::max(0.0, a21 - c2 / (4.0 * e));
        return std::sqrt(b111) * (2.0 - std::sqrt(b111 * a22)) * c2 - 4.0 * b211 * e * e * std::sqrt(a22);
      };
      if (phi(lo0) >= 0.0 && phi(hi0) <= 0.0) {
        double lo = lo0, hi = hi0;
        bisect_steps(lo, hi, [&](double e) { return phi(e) > 0.0; });
        c.params["eta0"] = 0.5 * (lo + hi);
      }
    }

    std::string branch;
    std::vector<Vector> terms = cross4_terms(a111, a12, a211, a22, branch);
    terms.push_back(zvec(std::sqrt(a112), 0, sgn(cy) * std::sqrt(a212), 0));
    c.branch = "split a11, a21; remainder: " + branch;
    c.sos = pull_back(make_sos(std::move(terms)), {s});
    require_reconstruction(f, *c.sos, 1e-9, "case II");
    return c;
  }

  std::optional<Counterexample> w = sample_refute(f, sampler);
  if (!w) {
    DispatchOptions opts;
    opts.sampler = sampler;
    return fallback(f, opts, "case II: g(a112*) < 2 without a sampled witness");
  }
  auto out = not_psd(*w, "g(a112*) < |b|/2");
  out.params = c.params;
  out.substitutions = c.substitutions;
  return out;
}

double case3_omega(double a11, double cx, double cy, double g1) {
  const double u = 1.0 - g1;
  return a11 * g1 * g1 * (2.0 - g1) * (2.0 - g1) - 3.0 * u * u * u * cx * cy +
         2.0 * u * u * (cx * cx + cy * cy) + u * cx * cy - cx * cx - cy * cy;
}

ClosedFormCertificate case3_decompose(const Quartic2x2& f, const SampleOptions& sampler) {
  if (f.b != 0.0 || f.cx2 != 0.0 || f.cy2 != 0.0 || f.cx1 == 0.0 || f.cy1 == 0.0)
    throw WrongCase("case3_decompose expects cx1, cy1 nonzero and no other cross terms");
  const NecessaryCheck nc = psd_necessary(f);
  if (!nc.pass) return not_psd(*nc.witness, "necessary condition " + nc.violated);

  // Necessary conditions with nonzero cx1, cy1 force a11, a12, a21 > 0.
  ClosedFormCertificate c;
  c.tag = CaseTag::CaseIII;
  SubstitutionRecord norm;
  norm.tag = SubstitutionTag::Normalize;
  norm.lx = diag(1.0, std::sqrt(f.a21));
  norm.ly = diag(1.0, std::sqrt(f.a12));
  c.substitutions.push_back(norm);
  const double a11 = f.a11, a22 = f.a22 / (f.a12 * f.a21);
  double cx = f.cx1 / (2.0 * std::sqrt(f.a12)), cy = f.cy1 / (2.0 * std::sqrt(f.a21));

  if (cx < 0.0 || cy < 0.0) {
    SubstitutionRecord flip;
    flip.tag = SubstitutionTag::SignFlip;
    flip.ly = diag(cx < 0.0 ? -1.0 : 1.0, 1.0);
    flip.lx = diag(cy < 0.0 ? -1.0 : 1.0, 1.0);
    c.substitutions.push_back(flip);
    cx = std::abs(cx);
    cy = std::abs(cy);
  }
  if (cx < cy) {
    SubstitutionRecord swap;
    swap.tag = SubstitutionTag::SwapXY;
    swap.swap_xy = true;
    c.substitutions.push_back(swap);
    std::swap(cx, cy);
  }
  c.params["cx"] = cx;
  c.params["cy"] = cy;
  c.params["a11"] = a11;
  c.params["a22_normalized"] = a22;
  auto finish = [&](std::vector<Vector> terms) {
    c.sos = pull_back(make_sos(std::move(terms)), c.substitutions);
    require_reconstruction(f, *c.sos, 1e-9, "case III");
    return c;
  };

  if (a11 >= cx * cx + cy * cy) {
    c.branch = "a11 >= cx^2 + cy^2";
    return finish({zvec(root(a11 - cx * cx - cy * cy), 0, 0, 0), zvec(cx, 1, 0, 0),
                   zvec(cy, 0, 1, 0), zvec(0, 0, 0, std::sqrt(a22))});
  }

  // a11 = cx² (below is excluded by the necessary conditions): y = (1, -cx),
  // x = (-cy, cy² / (1 + a22 cx²)) gives -cy⁴ / (1 + a22 cx²).
  if (4.0 * f.a11 * f.a12 <= f.cx1 * f.cx1 || 4.0 * f.a11 * f.a21 <= f.cy1 * f.cy1) {
    const double x2 = cy * cy / (1.0 + a22 * cx * cx);
    auto w = confirm_or_sample(f, pt(-cy, x2), pt(1.0, -cx), c.substitutions, sampler);
    if (!w) throw NumericalFailure("case III: boundary witness not confirmed");
    auto out = not_psd(*w, "a11 = cx^2");
    out.params = c.params;
    out.substitutions = c.substitutions;
    return out;
  }

  double alpha, beta, g1, g3;
  if (cx - cy <= 1e-12 * cx) {
    cy = cx;
    if (a11 >= 1.25 * cy * cy) {
      c.branch = "cx = cy, 5/4 cy^2 <= a11 <= 2 cy^2";
      alpha = (3.0 * cy - std::sqrt(9.0 * cy * cy - 4.0 * a11)) / 2.0;
      beta = alpha;
      g1 = 2.0 - cy / alpha;
      g3 = cy / (alpha * alpha * alpha) - 1.0 / (alpha * alpha);
    } else {
      c.branch = "cx = cy, cy^2 < a11 < 5/4 cy^2";
      const double disc = root(5.0 * cy * cy - 4.0 * a11);
      alpha = (cy + disc) / 2.0;
      beta = (cy - disc) / 2.0;
      g1 = 0.0;
      g3 = 1.0 / (a11 - cy * cy);
    }
  } else {
    c.branch = "cx > cy";
    double lo = (cx - cy) / cx, hi = 1.0;
    bisect_steps(lo, hi, [&](double g) { return case3_omega(a11, cx, cy, g) > 0.0; });
    g1 = std::abs(case3_omega(a11, cx, cy, lo)) < std::abs(case3_omega(a11, cx, cy, hi)) ? lo : hi;
    c.params["gamma1_star"] = g1;
    c.params["omega_at_root"] = case3_omega(a11, cx, cy, g1);
    alpha = ((g1 - 1.0) * cx + cy) / (g1 * (2.0 - g1));
    beta = (cx + (g1 - 1.0) * cy) / (g1 * (2.0 - g1));
    g3 = (1.0 - g1) / (alpha * beta);
  }
  const double g2 = 1.0 - g1;
  c.params["alpha"] = alpha;
  c.params["beta"] = beta;
  c.params["gamma1"] = g1;
  c.params["gamma2"] = g2;
  c.params["gamma3_star"] = g3;

  if (a22 >= g3) {
    const double r1 = root(g1), r2 = root(g2), r3 = root(g3);
    return finish({zvec(r1 * alpha, 0, r1, 0), zvec(r1 * beta, r1, 0, 0),
                   zvec(r2 * (alpha + beta), r2, r2, 0), zvec(r3 * alpha * beta, 0, 0, -r3),
                   zvec(0, 0, 0, root(a22 - g3))});
  }

  // Every square but the last vanishes at x = (-1/α, 1), y = (-1/β, 1).
  auto w = confirm_or_sample(f, pt(-1.0 / alpha, 1.0), pt(-1.0 / beta, 1.0), c.substitutions, sampler);
  if (!w) throw NumericalFailure("case III: a22 below threshold but no negative point confirmed");
  auto out = not_psd(*w, c.branch + ", a22 < gamma3*");
  out.params = c.params;
  out.substitutions = c.substitutions;
  return out;
}

ClosedFormCertificate dispatch_2x2(const Quartic2x2& f, const DispatchOptions& opts) {
  const NecessaryCheck nc = psd_necessary(f);
  if (!nc.pass) return not_psd(*nc.witness, "necessary condition " + nc.violated);

  auto [g, s41] = reduce_prop41(f);
  if (const NecessaryCheck n = psd_necessary(g); !n.pass) {
    auto w = confirm_or_sample(f, n.witness->x, n.witness->y, {s41}, opts.sampler);
    if (w) return not_psd(*w, "necessary condition after shear: " + n.violated);
    return fallback(f, opts, "necessary condition fails after shear without a confirmed point");
  }
  auto [h, s42] = reduce_prop42(g);
  if (const NecessaryCheck n = psd_necessary(h); !n.pass) {
    auto w = confirm_or_sample(f, n.witness->x, n.witness->y, {s41, s42}, opts.sampler);
    if (w) return not_psd(*w, "necessary condition after shears: " + n.violated);
    return fallback(f, opts, "necessary condition fails after shears without a confirmed point");
  }

  // Coefficients produced by the shears that cancel only up to rounding count as zero.
  const double tiny = 1e-13 * f.max_abs();
  for (double* v : {&h.b, &h.cx1, &h.cy1})
    if (std::abs(*v) <= tiny) *v = 0.0;

  std::vector<SubstitutionRecord> pre;
  for (const auto& s : {s41, s42})
    if (!is_identity(s)) pre.push_back(s);

  ClosedFormCertificate c;
  if (h.cx1 == 0.0 && h.cy1 == 0.0) {
    c = case1_decompose(h, opts.sampler);
  } else if (h.cx1 == 0.0) {
    c = case2_decompose(h, opts.sampler);
  } else if (h.cy1 == 0.0) {
    SubstitutionRecord swap;
    swap.tag = SubstitutionTag::SwapXY;
    swap.swap_xy = true;
    c = case2_decompose(apply_substitution(h, swap), opts.sampler);
    c.substitutions.insert(c.substitutions.begin(), swap);
    if (c.sos) c.sos = pull_back(*c.sos, {swap});
    if (c.witness) std::tie(c.witness->x, c.witness->y) = pull_back_point(c.witness->x, c.witness->y, swap);
  } else if (h.b == 0.0) {
    c = case3_decompose(h, opts.sampler);
  } else {
    return fallback(f, opts, "full-cross term with two neighbor half-cross terms");
  }
  if (c.tag == CaseTag::Fallback) return fallback(f, opts, c.branch);

  c.substitutions.insert(c.substitutions.begin(), pre.begin(), pre.end());
  if (c.sos) {
    c.sos = pull_back(*c.sos, pre);
    require_reconstruction(f, *c.sos, 1e-9, case_name(c.tag));
  }
  if (c.witness) {
    auto [x, y] = pull_back_chain(c.witness->x, c.witness->y, pre);
    auto w = confirm_counterexample(from_quartic2x2(f), x, y, witness_tol(f));
    if (!w) w = sample_refute(f, opts.sampler);
    if (!w) return fallback(f, opts, "witness did not survive the pull-back");
    c.witness = w;
  }
  return c;
}

}  // namespace bqsos
