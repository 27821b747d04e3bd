#pragma once

// Closed-form SOS certificates for 2x2 biquadratic forms
//   f = a11 x1²y1² + a12 x1²y2² + a21 x2²y1² + a22 x2²y2² + b x1x2y1y2
//       + cx1 x1²y1y2 + cx2 x2²y1y2 + cy1 x1x2y1² + cy2 x1x2y2².
//
// Two shears remove cx2 and cy2; what remains is split into
//   Case I   (no half-cross term),
//   Case II  (one half-cross term),
//   Case III (cx1 and cy1, no full-cross term),
// and the remaining configuration (b with both cx1 and cy1) goes to the
// numerical Γ solver.
//
// Square terms are vectors over z = (x1y1, x1y2, x2y1, x2y2).

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bqsos/biquad.hpp"
#include "bqsos/gamma_solver.hpp"
#include "bqsos/verification.hpp"

namespace bqsos {

enum class SubstitutionTag { Prop41Shear, Prop42Shear, Scale, SignFlip, Normalize, SwapXY };

const char* substitution_name(SubstitutionTag tag);

/// New variables (u, v) = (Lx x, Ly y), or (Ly y, Lx x) when swap_xy is set;
/// the transformed form g satisfies g(u, v) = f(x, y).
struct SubstitutionRecord {
  Eigen::Matrix2d lx = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d ly = Eigen::Matrix2d::Identity();
  SubstitutionTag tag = SubstitutionTag::Normalize;
  bool swap_xy = false;

  /// z_new = T z.
  Eigen::Matrix4d z_map() const;
};

/// Coefficients of g with g(u, v) = f(x, y).
Quartic2x2 apply_substitution(const Quartic2x2& f, const SubstitutionRecord& s);

/// Maps a point (u, v) in the new variables back to (x, y).
std::pair<Vector, Vector> pull_back_point(const Vector& u, const Vector& v,
                                          const SubstitutionRecord& s);

/// Rewrites squares in the variables after `subs` (applied in order) as
/// squares in the original variables.
SosDecomposition pull_back(const SosDecomposition& sos, const std::vector<SubstitutionRecord>& subs);

struct NecessaryCheck {
  bool pass = true;
  std::string violated;  ///< e.g. "4*a11*a12 >= cx1^2"
  std::optional<Counterexample> witness;
};

/// Nonnegative diagonal and the four axis-restriction discriminant inequalities.
NecessaryCheck psd_necessary(const Quartic2x2& f);

/// ȳ1 = y1 + cx2/(2 a21) y2; output has cx2 = 0.
std::pair<Quartic2x2, SubstitutionRecord> reduce_prop41(const Quartic2x2& f);
/// x̂2 = x̄2 + cy2/(2 a22) x̄1 on a form with cx2 = 0; output has cy2 = 0.
std::pair<Quartic2x2, SubstitutionRecord> reduce_prop42(const Quartic2x2& g);

enum class CaseTag { CaseI, CaseII, CaseIII, NotPsdWitness, Fallback };

const char* case_name(CaseTag tag);

struct ClosedFormCertificate {
  CaseTag tag = CaseTag::Fallback;
  std::string branch;  ///< which construction inside the case produced the result
  std::map<std::string, double> params;
  std::vector<SubstitutionRecord> substitutions;
  std::optional<SosDecomposition> sos;  ///< in the variables of the input form
  std::optional<Counterexample> witness;
  std::optional<SolveResult> solve;  ///< Fallback only
};

struct DispatchOptions {
  SolveOptions solver;
  SampleOptions sampler;
};

ClosedFormCertificate case1_decompose(const Quartic2x2& f, const SampleOptions& sampler = {});
ClosedFormCertificate case2_decompose(const Quartic2x2& f, const SampleOptions& sampler = {});
ClosedFormCertificate case3_decompose(const Quartic2x2& f, const SampleOptions& sampler = {});

/// Ω(γ1) for the two-half-cross construction (a12 = a21 = 1 normalization).
double case3_omega(double a11, double cx, double cy, double gamma1);

/// Shears, case split, closed form or solver fallback, pull-back and a final
/// reconstruction check against f.
ClosedFormCertificate dispatch_2x2(const Quartic2x2& f, const DispatchOptions& opts = {});

}  // namespace bqsos
