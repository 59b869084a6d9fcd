#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using testsup::run_cli;

namespace {

const std::string kCli = PNET_CLI_PATH;

std::string write_temp(const std::string& name, const std::string& content) {
  fs::create_directories("cli_tmp");
  const std::string path = "cli_tmp/" + name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("validate summarizes a good file and flags a bad one") {
  const auto good = run_cli(
      kCli, "validate " + testsup::fixture_path("paass_s3.pnet"), "v1");
  CHECK(good.status == 0);
  CHECK(good.out.find("variables: 5 (1 hidden)") != std::string::npos);
  CHECK(good.out.find("rules: 2") != std::string::npos);
  CHECK(good.out.find("links: 3") != std::string::npos);

  const auto bad_path = write_temp("bad.pnet", "var a ;\nrule P(zz) = 0.5 n=4 ;\n");
  const auto bad = run_cli(kCli, "validate " + bad_path, "v2");
  CHECK(bad.status == 1);
  CHECK(bad.err.find("unknown-variable") != std::string::npos);
  CHECK(bad.err.find(":2:") != std::string::npos);

  const auto missing = run_cli(kCli, "validate cli_tmp/nonexistent.pnet", "v3");
  CHECK(missing.status == 1);
}

TEST_CASE("fit writes a reproducible artifact directory") {
  const std::string spec = testsup::fixture_path("paass_s3.pnet");
  const std::string base =
      " --max-iter 12 --replication 2 --out cli_tmp/fit_";
  const auto a = run_cli(kCli, "--seed 7 fit " + spec + base + "a", "f1");
  const auto b = run_cli(kCli, "--seed 7 fit " + spec + base + "b", "f2");
  // 12 iterations will not reach stationarity; 2 signals exactly that
  CHECK(a.status == 2);
  CHECK(b.status == 2);

  for (const std::string name :
       {"report.json", "model.json", "traces.csv", "lambda_trajectory.csv",
        "evidence.csv", "manifest.json"}) {
    CHECK(fs::exists("cli_tmp/fit_a/" + name));
    const auto one = testsup::slurp("cli_tmp/fit_a/" + name);
    auto two = testsup::slurp("cli_tmp/fit_b/" + name);
    if (name == "manifest.json") continue;  // argv differs by --out
    CHECK(one == two);
  }

  const auto manifest = json::parse(testsup::slurp("cli_tmp/fit_a/manifest.json"));
  CHECK(manifest["seed"].get<std::uint64_t>() == 7);
  CHECK(manifest["command"] == "fit");
  CHECK(manifest["fit_config"]["max_iterations"] == 12);

  const auto c = run_cli(kCli, "--seed 8 fit " + spec + base + "c", "f3");
  CHECK(c.status == 2);
  CHECK(testsup::slurp("cli_tmp/fit_a/report.json") !=
        testsup::slurp("cli_tmp/fit_c/report.json"));

  const auto report = json::parse(testsup::slurp("cli_tmp/fit_a/report.json"));
  CHECK(report["converged"] == false);
  CHECK(report["iterations_used"] == 12);
}

TEST_CASE("omitting the seed still announces one") {
  const std::string spec = testsup::fixture_path("paass_s3.pnet");
  const auto res = run_cli(kCli, "validate " + spec, "s0");
  CHECK(res.err.find("seed not given") != std::string::npos);
}

TEST_CASE("fit-exact solves the one-variable logit in closed form") {
  const auto spec = write_temp("logit.pnet", "var x1 ;\nrule P(x1) = 0.8 n=5 ;\n");
  const auto res =
      run_cli(kCli, "--seed 1 fit-exact " + spec + " --out cli_tmp/fx", "x1");
  CHECK(res.status == 0);

  const auto model = json::parse(testsup::slurp("cli_tmp/fx/model.json"));
  const double lambda = model["lambda"][0].get<double>();
  CHECK(std::fabs(lambda - std::log(4.0)) < 1e-4);

  const auto report = json::parse(testsup::slurp("cli_tmp/fx/report.json"));
  CHECK(report["max_residual"].get<double>() < 1e-6);
  CHECK(report["converged"] == true);
}

TEST_CASE("fit-exact drops link terms with a note") {
  const std::string spec = testsup::fixture_path("paass_s3.pnet");
  const auto res =
      run_cli(kCli, "--seed 1 fit-exact " + spec + " --out cli_tmp/fx2", "x2");
  CHECK(res.status == 0);
  CHECK(res.err.find("dropping 3 link term(s)") != std::string::npos);
  const auto report = json::parse(testsup::slurp("cli_tmp/fx2/report.json"));
  CHECK(report["dropped_link_terms"] == 3);
}

TEST_CASE("query agrees with itself across exact and sampled modes") {
  const auto spec = write_temp("logit.pnet", "var x1 ;\nrule P(x1) = 0.8 n=5 ;\n");
  run_cli(kCli, "--seed 1 fit-exact " + spec + " --out cli_tmp/fx", "q0");

  const auto exact = run_cli(kCli, "query cli_tmp/fx/model.json x1", "q1");
  CHECK(exact.status == 0);
  // bounded by the exact fit's residual target
  CHECK(std::fabs(std::stod(exact.out) - 0.8) < 1e-6);

  const auto mc = run_cli(
      kCli, "--seed 3 query cli_tmp/fx/model.json x1 --mc --mc-samples 50000",
      "q2");
  CHECK(mc.status == 0);
  // binomial band at three sigma
  CHECK(std::fabs(std::stod(mc.out) - 0.8) <
        3.0 * std::sqrt(0.8 * 0.2 / 50000.0) + 1e-9);

  const auto bad = run_cli(kCli, "query cli_tmp/fx/model.json \"x1 and\"", "q3");
  CHECK(bad.status == 1);
}

TEST_CASE("query handles conjunctions and conditioning") {
  const auto spec = write_temp(
      "two.pnet", "var a b ;\nrule P(a) = 0.5 n=4 ;\nrule P(b | a) = 0.25 n=4 ;\n");
  const auto fit =
      run_cli(kCli, "--seed 1 fit-exact " + spec + " --out cli_tmp/fx3", "qc0");
  REQUIRE(fit.status == 0);
  const auto cond = run_cli(
      kCli, "query cli_tmp/fx3/model.json b --given a", "qc1");
  CHECK(cond.status == 0);
  CHECK(std::fabs(std::stod(cond.out) - 0.25) < 1e-5);

  const auto joint =
      run_cli(kCli, "query cli_tmp/fx3/model.json \"a and !b\"", "qc2");
  CHECK(joint.status == 0);
  CHECK(std::fabs(std::stod(joint.out) - 0.5 * 0.75) < 1e-5);
}

TEST_CASE("sample writes clamped deterministic CSV") {
  const auto spec = write_temp(
      "two.pnet", "var a b ;\nrule P(a) = 0.5 n=4 ;\nrule P(b | a) = 0.25 n=4 ;\n");
  run_cli(kCli, "--seed 1 fit-exact " + spec + " --out cli_tmp/fx3", "sm0");

  const auto res = run_cli(kCli,
                           "--seed 11 sample cli_tmp/fx3/model.json --n 200 "
                           "--clamp a=1 --out cli_tmp/smp",
                           "sm1");
  CHECK(res.status == 0);
  const auto csv = testsup::slurp("cli_tmp/smp/samples.csv");
  CHECK(csv.rfind("a,b\n", 0) == 0);
  std::size_t rows = 0, clamped = 0;
  for (std::size_t pos = csv.find('\n'); pos + 1 < csv.size();) {
    const auto next = csv.find('\n', pos + 1);
    if (next == std::string::npos) break;
    ++rows;
    if (csv[pos + 1] == '1') ++clamped;
    pos = next;
  }
  CHECK(rows == 200);
  CHECK(clamped == 200);

  const auto again = run_cli(kCli,
                             "--seed 11 sample cli_tmp/fx3/model.json --n 200 "
                             "--clamp a=1 --out cli_tmp/smp2",
                             "sm2");
  CHECK(again.status == 0);
  CHECK(testsup::slurp("cli_tmp/smp2/samples.csv") == csv);

  const auto bad = run_cli(kCli,
                           "--seed 11 sample cli_tmp/fx3/model.json --n 5 "
                           "--clamp zz=1 --out cli_tmp/smp3",
                           "sm3");
  CHECK(bad.status == 1);
}

TEST_CASE("gradcheck passes its own gate") {
  const auto res = run_cli(kCli, "--seed 5 gradcheck --instances 8", "g1");
  CHECK(res.status == 0);
  CHECK(res.out.find("pseudo_max_rel_err") != std::string::npos);
  CHECK(res.out.find("full_max_rel_err") != std::string::npos);
}

TEST_CASE("compare emits both sides of the story") {
  const std::string spec = testsup::fixture_path("paass_s3.pnet");
  const auto res = run_cli(
      kCli, "--seed 9 compare " + spec + " --max-iter 80 --out cli_tmp/cmp",
      "c1");
  CHECK(res.status == 0);
  CHECK(res.out.find("rule,q_observed,p_soft,p_hard") != std::string::npos);
  CHECK(res.out.find("tv_visible,") != std::string::npos);

  const auto summary = json::parse(testsup::slurp("cli_tmp/cmp/compare.json"));
  REQUIRE(summary["rules"].size() == 2);
  CHECK(summary["rules"][0]["q_observed"].get<double>() == doctest::Approx(0.8));
  CHECK(summary["rules"][1]["q_observed"].get<double>() == doctest::Approx(0.3));
  CHECK(summary["hard_max_residual"].get<double>() < 1e-6);
  CHECK(fs::exists("cli_tmp/cmp/soft_distribution.csv"));
  CHECK(fs::exists("cli_tmp/cmp/hardwired_distribution.csv"));
  CHECK(fs::exists("cli_tmp/cmp/manifest.json"));
}

TEST_CASE("bad usage is an error exit") {
  const auto res = run_cli(kCli, "frobnicate", "u1");
  CHECK(res.status != 0);
  const auto none = run_cli(kCli, "", "u2");
  CHECK(none.status != 0);
}
