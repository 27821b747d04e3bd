// bqsos: SOS certification for biquadratic forms.
//
//   bqsos analyze <problem> [--budget N] [--psd-tol T] [--max-iters N] [--seed S]
//   bqsos tripartite <problem> [--pivot-i I] [--pivot-j J] [--scan-pivots]
//   bqsos verify <problem> <sos> [--tol T]
//   bqsos examples [name]
//
// <problem> is a JSON file or the name of a built-in example. The report goes
// to stdout as JSON, a one-line summary to stderr.
// Exit codes: 0 certified / equal, 1 refuted / different, 2 inconclusive, 3 usage or IO error.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "bqsos/builtin_examples.hpp"
#include "bqsos/closed_form.hpp"
#include "bqsos/errors.hpp"
#include "bqsos/gamma_solver.hpp"
#include "bqsos/kernels.hpp"
#include "bqsos/problem_io.hpp"
#include "bqsos/tripartite.hpp"
#include "bqsos/verification.hpp"

using nlohmann::json;
using namespace bqsos;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kSchemaVersion = "1";

enum Exit { kCertified = 0, kRefuted = 1, kInconclusive = 2, kUsage = 3 };

struct Flags {
  std::size_t budget = 100000;
  double psd_tol = 1e-9;
  int max_iters = 5000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double tol = 1e-6;
  int pivot_i = 0;
  int pivot_j = 0;
  bool scan_pivots = false;
};

Problem resolve_problem(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_problem(arg);
  if (const BuiltinExample* e = find_builtin(arg)) return e->problem;
  throw Error("no such file or built-in example: " + arg);
}

json witness_json(const Counterexample& w) {
  return {{"x", vector_to_json(w.x)}, {"y", vector_to_json(w.y)}, {"value", w.value}};
}

json substitution_json(const SubstitutionRecord& s) {
  return {{"tag", substitution_name(s.tag)},
          {"lx", matrix_to_json(s.lx)},
          {"ly", matrix_to_json(s.ly)},
          {"swap_xy", s.swap_xy}};
}

json solve_json(const SolveResult& r) {
  json history = json::array();
  for (const auto& h : r.history) history.push_back({h.iteration, h.lambda_min});
  json j = {{"status", r.status == SolveStatus::SosCertified ? "SosCertified" : "Inconclusive"},
            {"lambda_min", r.lambda_min},
            {"iterations", r.iterations},
            {"ascent_iterations", r.ascent_iterations},
            {"newton_iterations", r.newton_iterations},
            {"scale", r.scale},
            {"history", history}};
  j["lambda_upper_bound"] = std::isfinite(r.lambda_upper_bound) ? json(r.lambda_upper_bound) : json(nullptr);
  return j;
}

json base_report(const char* command, const json& input, const json& flags) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"reproduction", {{"input", input}, {"flags", flags}, {"tool_version", kToolVersion}}}};
}

void emit(json report, double elapsed_ms, const std::string& summary) {
  report["timings"] = {{"total_ms", elapsed_ms}};
  std::cout << report.dump(2) << "\n";
  std::cerr << summary << "\n";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_analyze(const std::string& file, const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem = resolve_problem(file);
  const BiquadraticForm f = problem.form();
  const double scale = std::max(f.max_abs_coefficient(), std::numeric_limits<double>::min());

  SolveOptions so;
  so.max_iters = fl.max_iters;
  so.psd_tol = fl.psd_tol;
  SampleOptions sa;
  sa.budget = fl.budget;
  sa.seed = fl.seed;
  sa.threads = fl.threads;

  json report = base_report("analyze", problem_to_json(problem),
                            {{"budget", fl.budget}, {"psd_tol", fl.psd_tol}, {"max_iters", fl.max_iters},
                             {"seed", fl.seed}});
  json cert = json::object(), diag = json::object();
  std::optional<SosDecomposition> sos;
  std::optional<Counterexample> witness;
  double sos_tol = 100.0 * fl.psd_tol;

  if (f.m() == 2 && f.n() == 2) {
    const ClosedFormCertificate c = dispatch_2x2(to_quartic2x2(f), DispatchOptions{so, sa});
    cert["kind"] = c.tag == CaseTag::Fallback || c.solve ? "gamma_solver" : "closed_form";
    cert["case"] = case_name(c.tag);
    cert["branch"] = c.branch;
    cert["params"] = c.params;
    json subs = json::array();
    for (const auto& s : c.substitutions) subs.push_back(substitution_json(s));
    cert["substitutions"] = subs;
    if (c.solve) {
      cert["gamma"] = matrix_to_json(c.solve->gamma.values());
      diag["solver"] = solve_json(*c.solve);
    } else {
      sos_tol = 1e-9;
    }
    sos = c.sos;
    witness = c.witness;
  } else {
    const SolveResult r = solve_gamma(f, so);
    cert["kind"] = "gamma_solver";
    cert["gamma"] = matrix_to_json(r.gamma.values());
    cert["lambda_min"] = r.lambda_min;
    diag["solver"] = solve_json(r);
    if (r.status == SolveStatus::SosCertified) {
      sos = extract_certified(f, r, fl.psd_tol);
    } else {
      const PsdVerdict v = sample_psd_check(f, sa);
      diag["sampler"] = {{"budget", fl.budget}, {"samples_used", v.samples_used}};
      witness = v.counterexample;
    }
  }

  // Cross-check the attached evidence before reporting a verdict.
  std::string verdict = "Inconclusive";
  int code = kInconclusive;
  if (sos) {
    const FormComparison cmp = compare_forms(f, reconstruct(*sos), sos_tol * scale);
    diag["reconstruction_max_abs_diff"] = cmp.max_abs_diff;
    if (!cmp.equal) throw NumericalFailure("certificate does not reconstruct the input");
    cert["sos"] = sos_to_json(*sos);
    cert["rank"] = sos_rank(*sos);
    verdict = "SosCertified";
    code = kCertified;
  } else if (witness) {
    const double v = evaluate(f, witness->x, witness->y);
    if (!(v < 0.0)) throw NumericalFailure("witness does not evaluate negative");
    report["witness"] = witness_json(*witness);
    verdict = "PsdRefuted";
    code = kRefuted;
  }
  diag["kernel_isa"] = kernels::isa_name(kernels::active_isa());
  report["verdict"] = verdict;
  report["certificate"] = cert;
  report["diagnostics"] = diag;
  emit(report, ms_since(t0), "analyze: " + verdict);
  return code;
}

json tripartite_json(const TripartiteQuartic& h) {
  return {{"p", h.p},
          {"q", h.q},
          {"pivot", {h.pivot_i, h.pivot_j}},
          {"h0", h.h0},
          {"h1", vector_to_json(h.h1)},
          {"h2", matrix_to_json(h.h2)},
          {"h3x", matrix_to_json(h.h3x)},
          {"h3y", matrix_to_json(h.h3y)},
          {"h4", matrix_to_json(h.h4.flattened())}};
}

int cmd_tripartite(const std::string& file, const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem = resolve_problem(file);
  const BiquadraticForm f = problem.form();
  const TripartiteQuartic h = to_tripartite(f, fl.pivot_i, fl.pivot_j);
  ClassifyOptions co;
  co.budget = fl.budget;
  co.seed = fl.seed;
  co.threads = fl.threads;
  const TripartiteClass cls = classify(h, co);

  json report = base_report("tripartite", problem_to_json(problem),
                            {{"pivot_i", h.pivot_i}, {"pivot_j", h.pivot_j},
                             {"scan_pivots", fl.scan_pivots}, {"budget", fl.budget}, {"seed", fl.seed}});
  json details = json::array();
  for (const auto& d : cls.details) {
    json dj = {{"condition", d.name}, {"state", state_name(d.state)}};
    if (!d.note.empty()) dj["note"] = d.note;
    if (d.witness)
      dj["witness"] = {{"x", vector_to_json(d.witness->x)}, {"y", vector_to_json(d.witness->y)},
                       {"z", d.witness->z}, {"value", d.witness->value}};
    details.push_back(dj);
  }
  report["verdict"] = tag_name(cls.tag);
  report["tripartite"] = tripartite_json(h);
  report["classification"] = {{"tag", tag_name(cls.tag)}, {"details", details}};
  if (fl.scan_pivots) {
    json pivots = json::array();
    for (const auto& [i, j] : h0_zero_criterion(f)) pivots.push_back({i, j});
    report["h0_zero_pivots"] = pivots;
  }
  emit(report, ms_since(t0), std::string("tripartite: ") + tag_name(cls.tag));
  switch (cls.tag) {
    case TripartiteTag::RefutedPsd: return kRefuted;
    case TripartiteTag::Indeterminate: return kInconclusive;
    default: return kCertified;
  }
}

int cmd_verify(const std::string& file, const std::string& sos_file, const Flags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem = resolve_problem(file);
  const BiquadraticForm f = problem.form();
  const SosDecomposition d = load_sos(sos_file);
  if (d.m != f.m() || d.n != f.n()) throw DimensionError("SOS dimensions do not match the problem");
  const FormComparison cmp = compare_forms(f, reconstruct(d), fl.tol);
  json report = base_report("verify", problem_to_json(problem), {{"tol", fl.tol}});
  report["reproduction"]["sos"] = sos_to_json(d);
  report["verdict"] = cmp.equal ? "Equal" : "Different";
  report["comparison"] = {{"equal", cmp.equal}, {"max_abs_diff", cmp.max_abs_diff}, {"rank", sos_rank(d)}};
  emit(report, ms_since(t0), std::string("verify: ") + (cmp.equal ? "equal" : "different"));
  return cmp.equal ? kCertified : kRefuted;
}

int cmd_examples(const std::string& name) {
  if (name.empty()) {
    json list = json::array();
    for (const auto& e : builtin_examples())
      list.push_back({{"name", e.name}, {"description", e.description}, {"provenance", e.problem.provenance}});
    std::cout << json{{"examples", list}}.dump(2) << "\n";
    return 0;
  }
  const BuiltinExample* e = find_builtin(name);
  if (!e) throw Error("unknown example: " + name);
  std::cout << problem_to_json(e->problem).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SOS certification for biquadratic forms"};
  app.require_subcommand(1);
  Flags fl;
  std::string file, sos_file, example;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--budget", fl.budget, "sampling budget")->capture_default_str();
    sub->add_option("--seed", fl.seed, "random seed")->capture_default_str();
    sub->add_option("--threads", fl.threads, "sampler worker threads")->capture_default_str();
  };

  CLI::App* analyze = app.add_subcommand("analyze", "certify or refute SOS / PSD");
  analyze->add_option("problem", file, "problem file or built-in name")->required();
  common(analyze);
  analyze->add_option("--psd-tol", fl.psd_tol, "certification tolerance")->capture_default_str();
  analyze->add_option("--max-iters", fl.max_iters, "solver iteration budget")->capture_default_str();

  CLI::App* tri = app.add_subcommand("tripartite", "tripartite form and its classification");
  tri->add_option("problem", file, "problem file or built-in name")->required();
  common(tri);
  tri->add_option("--pivot-i", fl.pivot_i, "x index replaced by z (1-based, default m)");
  tri->add_option("--pivot-j", fl.pivot_j, "y index replaced by z (1-based, default n)");
  tri->add_flag("--scan-pivots", fl.scan_pivots, "list pivots giving h0 = 0");

  CLI::App* verify = app.add_subcommand("verify", "compare an SOS decomposition with a form");
  verify->add_option("problem", file, "problem file or built-in name")->required();
  verify->add_option("sos", sos_file, "SOS file")->required();
  verify->add_option("--tol", fl.tol, "coefficient tolerance")->capture_default_str();

  CLI::App* examples = app.add_subcommand("examples", "list or dump built-in examples");
  examples->add_option("name", example, "example to dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(file, fl);
    if (*tri) return cmd_tripartite(file, fl);
    if (*verify) return cmd_verify(file, sos_file, fl);
    if (*examples) return cmd_examples(example);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
