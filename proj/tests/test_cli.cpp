#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "bqsos/builtin_examples.hpp"
#include "bqsos/problem_io.hpp"
#include "bqsos/verification.hpp"
#include "support.hpp"

#ifndef BQSOS_CLI_PATH
#error "BQSOS_CLI_PATH must point at the bqsos executable"
#endif

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BQSOS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json run_json(const std::string& args, int expect_code) {
  const Run r = run(args);
  INFO("bqsos " << args);
  CHECK(r.code == expect_code);
  return json::parse(r.out);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bqsos-cli-test-" + std::to_string(getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

}  // namespace

TEST_CASE("examples") {
  const json list = run_json("examples", 0);
  CHECK(list["examples"].size() >= 4);
  const json qi = run_json("examples qi-page-358", 0);
  CHECK(qi["m"] == 2);
  CHECK(qi["entries"].size() == 9);
  CHECK(run_json("examples indefinite-flattening", 0) == qi);
  const json choi = run_json("examples choi-3x3", 0);
  CHECK(choi["m"] == 3);
  CHECK(choi["provenance"].get<std::string>().find("Choi") != std::string::npos);
  CHECK(run("examples no-such-example").code == 3);
}

TEST_CASE("analyze") {
  SUBCASE("indefinite-flattening example is certified") {
    const json r = run_json("analyze qi-page-358", 0);
    CHECK(r["verdict"] == "SosCertified");
    CHECK(r["schema_version"] == "1");
    CHECK(r["certificate"]["rank"].get<int>() >= 1);
    CHECK(r["certificate"]["rank"].get<int>() <= 4);
    CHECK(r["diagnostics"]["reconstruction_max_abs_diff"].get<double>() <= 1e-7);
    CHECK(r["reproduction"]["tool_version"] == "0.1.0");
  }
  SUBCASE("two-half-cross example goes through the closed form") {
    const json r = run_json("analyze case3-example", 0);
    CHECK(r["certificate"]["case"] == "CaseIII");
    CHECK(r["certificate"]["kind"] == "closed_form");
    CHECK(r["certificate"]["params"]["gamma3_star"].get<double>() == doctest::Approx(5.0));
  }
  SUBCASE("negative diagonal is refuted with a witness") {
    TempDir dir;
    const std::string file = dir.write("neg.json", R"({"format_version": "1", "m": 2, "n": 2,
        "entries": [[1, 1, 1, 1, -1], [2, 2, 2, 2, 1], [1, 2, 1, 2, 1], [2, 1, 2, 1, 1]]})");
    const json r = run_json("analyze " + file, 1);
    CHECK(r["verdict"] == "PsdRefuted");
    CHECK(r["witness"]["value"].get<double>() < 0.0);
  }
  SUBCASE("psd-but-not-SOS instance is inconclusive") {
    const json r = run_json("analyze choi-3x3 --budget 20000", 2);
    CHECK(r["verdict"] == "Inconclusive");
    CHECK(r["diagnostics"]["solver"]["lambda_min"].get<double>() < -0.05);
  }
  SUBCASE("verdicts for the remaining built-ins") {
    CHECK(run("analyze case1-boundary").code == 0);
    CHECK(run("analyze case1-not-psd").code == 1);
    CHECK(run("analyze negative-diagonal").code == 1);
    CHECK(run("analyze missing-corner").code == 0);
  }
  SUBCASE("usage and input errors exit 3") {
    TempDir dir;
    CHECK(run("analyze /nonexistent/file.json").code == 3);
    CHECK(run("analyze " + dir.write("bad.json", "{not json")).code == 3);
    CHECK(run("analyze " + dir.write("both.json", R"({"format_version": "1", "m": 2, "n": 2,
        "entries": [], "named_2x2": {"a11": 1}})")).code == 3);
    CHECK(run("analyze indefinite-flattening --budget notanumber").code == 3);
    CHECK(run("frobnicate").code == 3);
    CHECK(run("").code == 3);
  }
}

TEST_CASE("reports are deterministic apart from timings") {
  for (const std::string args : {"analyze indefinite-flattening --seed 7", "analyze case1-not-psd --seed 7",
                                 "analyze choi-3x3 --budget 5000 --seed 3", "tripartite indefinite-flattening"}) {
    json a = json::parse(run(args).out), b = json::parse(run(args).out);
    a.erase("timings");
    b.erase("timings");
    CHECK_MESSAGE(a.dump() == b.dump(), args);
  }
}

TEST_CASE("every certified report verifies against its input") {
  TempDir dir;
  testing_support::Rng rng(21);
  std::vector<std::string> problems;
  for (const auto& e : bqsos::builtin_examples()) problems.push_back(e.name);
  for (int t = 0; t < 4; ++t) {
    const int m = 2 + t % 2, n = 2 + t / 2;
    const bqsos::BiquadraticForm f = bqsos::reconstruct(testing_support::random_sos(rng, m, n, m * n - 1));
    json entries = json::array();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < n; ++l) entries.push_back({i + 1, j + 1, k + 1, l + 1, f(i, j, k, l)});
    const json p = {{"format_version", "1"}, {"m", m}, {"n", n}, {"entries", entries}};
    problems.push_back(dir.write("random" + std::to_string(t) + ".json", p.dump()));
  }
  int certified = 0;
  for (const std::string& p : problems) {
    const Run r = run("analyze " + p + " --budget 5000");
    const json report = json::parse(r.out);
    INFO(p);
    CHECK((r.code == 0) == (report["verdict"] == "SosCertified"));
    CHECK((r.code == 1) == (report["verdict"] == "PsdRefuted"));
    CHECK((r.code == 2) == (report["verdict"] == "Inconclusive"));
    if (r.code != 0) continue;
    ++certified;
    const std::string sos = dir.write("cert.json", report["certificate"]["sos"].dump());
    const json v = run_json("verify " + p + " " + sos, 0);
    CHECK(v["comparison"]["equal"] == true);
  }
  CHECK(certified >= 7);
}

TEST_CASE("tripartite") {
  SUBCASE("indefinite-flattening example") {
    const json r = run_json("tripartite indefinite-flattening", 0);
    CHECK(r["verdict"] == "Nondegenerate");
    CHECK(r["tripartite"]["h0"].get<double>() == 2.0);
  }
  SUBCASE("zero form") {
    TempDir dir;
    const std::string file = dir.write("zero.json", R"({"format_version": "1", "m": 3, "n": 2, "entries": []})");
    const json r = run_json("tripartite " + file, 0);
    CHECK(r["verdict"] == "Degenerate");
  }
  SUBCASE("pivot scan") {
    const json r = run_json("tripartite missing-corner --scan-pivots", 0);
    REQUIRE(r["h0_zero_pivots"].size() == 1);
    CHECK(r["h0_zero_pivots"][0] == json::array({1, 1}));
    const json at = run_json("tripartite missing-corner --pivot-i 1 --pivot-j 1", 0);
    CHECK(at["tripartite"]["h0"].get<double>() == 0.0);
    CHECK(at["verdict"] == "Degenerate");
  }
  SUBCASE("refuted") {
    const json r = run_json("tripartite negative-diagonal --pivot-i 1 --pivot-j 1", 1);
    CHECK(r["verdict"] == "RefutedPsd");
  }
  SUBCASE("bad pivot") { CHECK(run("tripartite indefinite-flattening --pivot-i 5").code == 3); }
}

TEST_CASE("verify") {
  TempDir dir;
  SUBCASE("printed factors within the printing precision") {
    const std::string sos = dir.write("printed.json", bqsos::sos_to_json(testing_support::printed_sos_32()).dump());
    const json r = run_json("verify indefinite-flattening " + sos + " --tol 2e-3", 0);
    CHECK(r["comparison"]["max_abs_diff"].get<double>() <= 2e-3);
    CHECK(run("verify indefinite-flattening " + sos).code == 1);  // default tolerance is tighter
  }
  SUBCASE("empty decomposition matches the zero form") {
    const std::string zero = dir.write("zero.json", R"({"format_version": "1", "m": 2, "n": 2, "entries": []})");
    const std::string sos = dir.write("empty.json", R"({"m": 2, "n": 2, "terms": []})");
    CHECK(run("verify " + zero + " " + sos).code == 0);
  }
  SUBCASE("mismatched dimensions") {
    const std::string sos = dir.write("wide.json", R"({"m": 2, "n": 3, "terms": []})");
    CHECK(run("verify indefinite-flattening " + sos).code == 3);
    CHECK(run("verify indefinite-flattening /nonexistent/sos.json").code == 3);
  }
}
