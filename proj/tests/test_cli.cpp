#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fjlp_cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fjlp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fjlp::cli::run(static_cast<int>(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fjlp_cli_" + name)).string();
}

}  // namespace

TEST(Cli, PlanRequiredK) {
  const auto r = run({"plan", "--n", "10", "--eps", "0.5", "--rho", "0.01", "--C0", "30.84"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["required_k"], 9506);
}

TEST(Cli, PlanTransformSpec) {
  const auto r = run({"plan", "--d", "16", "--k", "1", "--p", "2", "--seed", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["scale"], 1.0);
  EXPECT_EQ(j["d_pad"], 16);
  EXPECT_EQ(j["field_poly"], "0x7");
}

TEST(Cli, ParameterErrorsExitTwo) {
  EXPECT_EQ(run({"plan", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"plan", "--d", "65536", "--k", "17"}).code, 2);
  EXPECT_EQ(run({"plan", "--d", "65536", "--k", "17", "--relaxed"}).code, 0);
  EXPECT_EQ(run({"lowerbound", "--eps", "0.2"}).code, 2);
  EXPECT_EQ(run({"verify", "nonsense", "--d", "16"}).code, 2);
  EXPECT_EQ(run({"verify", "moment", "--d", "24"}).code, 2);
  EXPECT_EQ(run({"plan", "--n", "10"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, EmbedRoundTripBothFormats) {
  const std::vector<fjlp::RealVector> rows{{1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}, {-1, 0.5, 2, 3, 1e-3}};
  const fjlp::Transform t(5, 1, 1.0, 3);
  for (auto fmt : {fjlp::io::VectorFormat::csv, fjlp::io::VectorFormat::binary}) {
    const auto in = tmp("in"), out = tmp("out");
    fjlp::io::write_vectors(in, rows, fmt);
    const auto r = run({"embed", "--in", in, "--out", out, "--k", "1", "--p", "1", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto got = fjlp::io::read_vectors(out);
    EXPECT_EQ(got.format, fmt);
    ASSERT_EQ(got.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(got.rows[i], t.apply(rows[i]));
    std::remove(in.c_str());
    std::remove(out.c_str());
  }
}

TEST(Cli, EmbedWithSpecFile) {
  const auto spec = tmp("spec.json"), in = tmp("in2.csv"), out = tmp("out2.csv");
  ASSERT_EQ(run({"plan", "--d", "5", "--k", "1", "--seed", "3", "--out", spec}).code, 0);
  fjlp::io::write_vectors(in, {{1, 2, 3, 4, 5}}, fjlp::io::VectorFormat::csv);
  ASSERT_EQ(run({"embed", "--in", in, "--out", out, "--spec", spec}).code, 0);
  EXPECT_EQ(fjlp::io::read_vectors(out).rows[0], fjlp::Transform(5, 1, 1.0, 3).apply(fjlp::RealVector{1, 2, 3, 4, 5}));
  fjlp::io::write_vectors(in, {{1, 2, 3}}, fjlp::io::VectorFormat::csv);
  EXPECT_EQ(run({"embed", "--in", in, "--out", out, "--spec", spec}).code, 2);
  for (const auto& p : {spec, in, out}) std::remove(p.c_str());
}

TEST(Cli, FormatErrorsExitThree) {
  const auto bad = tmp("bad.bin"), out = tmp("out3");
  fjlp::io::write_file(bad, "FJLP\x07");
  EXPECT_EQ(run({"embed", "--in", bad, "--out", out, "--k", "1"}).code, 3);
  fjlp::io::write_file(bad, "1,2\n3\n");
  EXPECT_EQ(run({"embed", "--in", bad, "--out", out, "--k", "1"}).code, 3);
  EXPECT_EQ(run({"embed", "--in", tmp("missing"), "--out", out, "--k", "1"}).code, 3);
  fjlp::io::write_file(bad, "{\"version\": 1}");
  EXPECT_EQ(run({"embed", "--in", bad, "--out", out, "--spec", bad}).code, 3);
  std::remove(bad.c_str());
}

TEST(Cli, VerifyChecksEmitReports) {
  const auto r = run({"verify", "fourwise", "--k", "8", "--d", "256"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"check", "params", "estimate", "ci", "bound", "trials", "pass", "seed"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(run({"verify", "moment", "--d", "16", "--p", "1"}).code, 0);
  EXPECT_EQ(run({"verify", "flatness", "--d", "1024", "--x", "e1", "--t", "2", "--trials", "10000"}).code, 0);
  EXPECT_EQ(run({"verify", "tail", "--d", "4096", "--k", "8", "--eps", "0.5", "--trials", "1000"}).code, 0);
  EXPECT_EQ(run({"verify", "opnorm", "--k", "8", "--d", "256", "--trials", "3", "--restarts", "3", "--x", "random"}).code, 0);
  EXPECT_EQ(run({"verify", "distortion", "--n", "4", "--d", "256", "--k", "4", "--eps", "0.9"}).code, 0);
  EXPECT_EQ(run({"verify", "gaussian", "--d", "4096", "--k", "8", "--trials", "2000", "--threshold", "0.1"}).code, 0);
  // Budget too small for the exhaustive count: the check fails.
  EXPECT_EQ(run({"verify", "fourwise", "--k", "8", "--d", "256", "--budget", "10"}).code, 1);
}

TEST(Cli, LowerboundTable) {
  const auto r = run({"lowerbound", "--d", "8", "--eps", "0.05", "--families", "10", "--map", "orthogonal"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["recovered"], 10);
  ASSERT_EQ(j["table"].size(), 24u);
  for (const auto& row : j["table"]) {
    for (const char* key : {"s", "d_in", "d_out", "gap", "tau", "L", "lower_bound_scale"})
      EXPECT_TRUE(row.contains(key)) << key;
    EXPECT_TRUE(row["disjoint"].get<bool>());
  }
}

TEST(Cli, BenchSmallGrid) {
  const auto r = run({"bench", "--dims", "1024", "4096", "--k", "4", "--reps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["stages"].size(), 2u);
  EXPECT_EQ(run({"bench", "--dims", "2048"}).code, 2);
}
