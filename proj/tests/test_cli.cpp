#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::path(MINGRAPH_TEST_TMP) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& cfg) {
  const fs::path p = dir / name;
  std::ofstream(p) << cfg.dump(2);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(MINGRAPH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_with(const fs::path& config, const fs::path& out, const std::string& command, const std::string& extra = "") {
  return run(command + " --config " + config.string() + " --out " + out.string() + " " + extra);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

const json kSmallAlgebra = {
    {"mu123", {{"step", 0.1}}},
    {"mu123_lambda", {{"step", 0.1}}},
    {"sqrt2", {{"samples", 2000}}},
    {"lambda_inequality", {{"samples", 2000}}},
    {"app1", {{"samples", 1000}}},
};

}  // namespace

TEST(Cli, ZooListAndUsageErrors) {
  EXPECT_EQ(run("zoo list"), 0);
  EXPECT_EQ(run(""), 3);
  EXPECT_EQ(run("solve"), 3);  // --config is required
  EXPECT_EQ(run("no-such-command"), 3);
}

TEST(Cli, InvariantsWriteJunitAndCatchInjectedFault) {
  const fs::path dir = workdir("invariants");
  EXPECT_EQ(run("invariants --out " + (dir / "clean").string()), 0);
  const std::string xml = slurp(dir / "clean" / "invariants.xml");
  EXPECT_NE(xml.find("<testsuites"), std::string::npos);
  EXPECT_NE(xml.find("failures=\"0\""), std::string::npos);
  EXPECT_EQ(run("invariants --inject-fault slope-sign --out " + (dir / "fault").string()), 1);
}

TEST(Cli, VerifyAlgebraIsCleanAndDeterministic) {
  const fs::path dir = workdir("algebra");
  const fs::path cfg = write_config(dir, "cfg.json", kSmallAlgebra);
  ASSERT_EQ(run_with(cfg, dir / "a", "verify-algebra", "--threads 1"), 0);
  ASSERT_EQ(run_with(cfg, dir / "b", "verify-algebra", "--threads 4"), 0);
  const std::string a = slurp(dir / "a" / "verify_algebra.json");
  EXPECT_EQ(a, slurp(dir / "b" / "verify_algebra.json"));
  const json j = json::parse(a);
  EXPECT_EQ(j.at("violations").get<int>(), 0);
  EXPECT_GT(j.at("reports").size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "a" / "run.log"));
  ASSERT_EQ(run_with(cfg, dir / "c", "verify-algebra", "--seed 7"), 0);
  EXPECT_NE(a, slurp(dir / "c" / "verify_algebra.json"));
}

TEST(Cli, WeakenedScanFailsWithWitness) {
  const fs::path dir = workdir("weakened");
  const fs::path cfg = write_config(dir, "cfg.json",
                                    {{"mu123", {{"step", 0.1}, {"constraint", "weakened"}}},
                                     {"mu123_lambda", false},
                                     {"sqrt2", false},
                                     {"lambda_inequality", false},
                                     {"app1", false}});
  EXPECT_EQ(run_with(cfg, dir / "out", "verify-algebra"), 1);
  const json j = read_json(dir / "out" / "verify_algebra.json");
  EXPECT_GT(j.at("violations").get<int>(), 0);
  EXPECT_EQ(j.at("reports").at(0).at("witness").size(), 3u);
}

TEST(Cli, BadConfigIsInvalidInput) {
  const fs::path dir = workdir("bad");
  EXPECT_EQ(run_with(write_config(dir, "unknown.json", {{"mu123", {{"stepsize", 0.1}}}}), dir / "o", "verify-algebra"),
            3);
  EXPECT_EQ(run_with(dir / "missing.json", dir / "o", "measure"), 3);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(run_with(dir / "broken.json", dir / "o", "diagnose"), 3);
  EXPECT_EQ(run_with(write_config(dir, "model.json", {{"model", "helicoid"}}), dir / "o", "diagnose"), 3);
}

TEST(Cli, SolveWritesPatchAndReport) {
  const fs::path dir = workdir("solve");
  const fs::path cfg =
      write_config(dir, "cfg.json", {{"generator", {{"model", "slag-exp"}, {"dims", {17, 17}}}}, {"output", "u"}});
  ASSERT_EQ(run_with(cfg, dir / "out", "solve"), 0);
  const json rep = read_json(dir / "out" / "solve_report.json");
  EXPECT_TRUE(rep.dump().find("\"converged\":true") != std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "u.json"));
  EXPECT_EQ(fs::file_size(dir / "out" / "u.bin"), 17u * 17u * 2u * 8u);

  // The solved patch feeds back in through the patch format.
  const fs::path diag = write_config(dir, "diag.json", {{"patch", (dir / "out" / "u.json").string()}});
  EXPECT_EQ(run_with(diag, dir / "diag", "diagnose"), 0);
  EXPECT_TRUE(fs::exists(dir / "diag" / "diagnose.csv"));
}

TEST(Cli, SolveIterationCapExitsTwo) {
  const fs::path dir = workdir("solve_cap");
  const fs::path cfg = write_config(
      dir, "cfg.json", {{"generator", {{"model", "slag-exp"}, {"dims", {17, 17}}}}, {"max_iter", 1}});
  EXPECT_EQ(run_with(cfg, dir / "out", "solve"), 2);
}

TEST(Cli, DiagnoseAssertsLawsonOssermanConstants) {
  const fs::path dir = workdir("diagnose");
  const json base = {{"model", "lawson-osserman"},
                     {"points", {{"random", {{"count", 50}, {"r_min", 0.5}, {"r_max", 2.0}}}}},
                     {"assert", {{"v", 9.0}, {"lip", 2.2360679774997898}, {"dilation", 5.0}, {"max_residual", 1e-8}}}};
  ASSERT_EQ(run_with(write_config(dir, "ok.json", base), dir / "ok", "diagnose"), 0);
  std::ifstream csv(dir / "ok" / "diagnose.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x1,x2,x3,x4,v,lip,dilation,B2,lhs,rhs,gap,margin_lambda,margin_b,residual");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 50);

  json wrong = base;
  wrong["assert"]["v"] = 8.0;
  EXPECT_EQ(run_with(write_config(dir, "wrong.json", wrong), dir / "wrong", "diagnose"), 1);
}

TEST(Cli, MeasureProfileAndGrowth) {
  const fs::path dir = workdir("measure");
  const json prof = {{"model", "affine"},
                     {"affine", {{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"b", {0.0, 0.0}}}},
                     {"radii", {0.5, 1.0}},
                     {"resolution", 128},
                     {"assert", {{"ratio_equals", 1.0}, {"ratio_tol", 0.01}}}};
  const fs::path cfg = write_config(dir, "prof.json", prof);
  ASSERT_EQ(run_with(cfg, dir / "a", "measure"), 0);
  ASSERT_EQ(run_with(cfg, dir / "b", "measure", "--threads 1"), 0);
  EXPECT_EQ(slurp(dir / "a" / "measure.json"), slurp(dir / "b" / "measure.json"));
  EXPECT_EQ(slurp(dir / "a" / "measure.csv"), slurp(dir / "b" / "measure.csv"));
  EXPECT_EQ(slurp(dir / "a" / "measure.csv").substr(0, 30), "radius,volume,ratio,est_error\n");

  const json growth = {{"model", "slag-exp"}, {"mode", "growth"}, {"lambda", 5.0}, {"radii", {1.0, 4.0}}};
  EXPECT_EQ(run_with(write_config(dir, "growth.json", growth), dir / "g", "measure"), 1);
  const json g = read_json(dir / "g" / "measure.json");
  EXPECT_NE(g.at("failure").get<std::string>().find("at x = ("), std::string::npos);

  EXPECT_EQ(run_with(write_config(dir, "mode.json", {{"model", "slag-exp"}, {"mode", "volume"}}), dir / "m", "measure"),
            3);
}
