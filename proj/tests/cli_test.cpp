#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "macgrid/corpus.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("macgrid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  CliRun run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" MACGRID_CLI "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(path("stdout.txt"));
    r.err = slurp(path("stderr.txt"));
    return r;
  }

  fs::path dir_;
};

TEST_F(Cli, EncodeDecodeEvalRoundTrip) {
  ASSERT_EQ(run("synth --sentences 40 --seed 5 --output s.txt --truth t.json").code, 0);
  ASSERT_EQ(run("encode --input s.txt --output e.ndjson").code, 0);
  const CliRun d = run("decode --input e.ndjson --tokens s.txt --output d.txt");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.err.find("dropped_fragments=0 rejected_cliques=0 record_errors=0"), std::string::npos);
  const auto gold = macgrid::parse_inline_string(slurp(path("s.txt")));
  const auto pred = macgrid::parse_inline_string(slurp(path("d.txt")));
  EXPECT_EQ(pred.gold(), gold.gold());
  const CliRun e = run("eval --input d.txt --gold s.txt --report json");
  ASSERT_EQ(e.code, 0) << e.err;
  const auto report = nlohmann::json::parse(e.out);
  EXPECT_EQ(report["report"]["overall"]["f1"].get<double>(), 1.0) << e.out;
  EXPECT_EQ(report["config"]["gold"], "s.txt");
  const CliRun st = run("stats --input s.txt");
  EXPECT_NE(st.out.find("S 40 "), std::string::npos);
}

TEST_F(Cli, DecodeSkipsBadRecordsUnlessStrict) {
  ASSERT_EQ(run("synth --sentences 3 --output s.txt").code, 0);
  ASSERT_EQ(run("encode --input s.txt --output e.ndjson").code, 0);
  std::ofstream(path("e.ndjson"), std::ios::app) << "{broken\n";
  const CliRun lenient = run("decode --input e.ndjson --output d.txt");
  EXPECT_EQ(lenient.code, 0);
  EXPECT_NE(lenient.err.find("record_errors=1"), std::string::npos) << lenient.err;
  EXPECT_NE(run("decode --strict --input e.ndjson --output d.txt").code, 0);
}

TEST_F(Cli, TrainPredictTuneEvalBench) {
  ASSERT_EQ(run("synth --sentences 12 --seed 1 --synth_max_length 10 --output tr.txt").code, 0);
  ASSERT_EQ(run("synth --sentences 4 --seed 2 --synth_max_length 10 --output dv.txt").code, 0);
  const CliRun t = run("train --input tr.txt --dev dv.txt --epochs 2 --dim 6 --output m.json");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("epoch 2 loss"), std::string::npos) << t.out;
  EXPECT_NE(t.out.find("best_epoch"), std::string::npos);
  const CliRun p = run("predict --model m.json --input dv.txt --output g.ndjson");
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(run("decode --input g.ndjson --output d1.txt").code, 0);
  EXPECT_EQ(run("decode --model m.json --input dv.txt --output d2.txt").code, 0);
  const CliRun tune = run("tune --model m.json --dev dv.txt --save m2.json");
  ASSERT_EQ(tune.code, 0) << tune.err;
  EXPECT_NE(tune.out.find("best "), std::string::npos) << tune.out;
  EXPECT_TRUE(fs::exists(path("m2.json")));
  const auto curve = [](const std::string& out) { return out.substr(out.find("\nthreshold ")); };
  EXPECT_EQ(curve(run("tune --model m.json --input dv.txt").out), curve(tune.out));
  EXPECT_EQ(run("eval --model m.json --input dv.txt").code, 0);
  const CliRun b = run("bench --model m.json --input dv.txt --repeats 1");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(b.out.find("sentences"), std::string::npos) << b.out;
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  std::ofstream(path("c.conf")) << "seed = 8\nsentences = 6\n";
  ASSERT_EQ(run("synth --output a.txt", "MACGRID_CONFIG=c.conf").code, 0);
  ASSERT_EQ(run("synth --sentences 6 --seed 8 --output b.txt").code, 0);
  const auto a = macgrid::parse_inline_string(slurp(path("a.txt")));
  const auto b = macgrid::parse_inline_string(slurp(path("b.txt")));
  EXPECT_EQ(a, b);
  ASSERT_EQ(run("synth --seed 9 --output c.txt", "MACGRID_CONFIG=c.conf").code, 0);
  EXPECT_NE(slurp(path("c.txt")).find("# seed = 9"), std::string::npos);
  EXPECT_EQ(run("stats --input a.txt", "MACGRID_CONFIG=missing.conf").code, 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("decode").code, 2);
  EXPECT_EQ(run("stats --input nowhere.txt").code, 2);
  EXPECT_EQ(run("decode --input x --threshold 2").code, 2);
  EXPECT_EQ(run("synth --bogus 1").code, 2);
  std::ofstream(path("bad.txt")) << "a b\n0,5 A\n";
  const CliRun r = run("stats --input bad.txt");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.txt:2:"), std::string::npos) << r.err;
}

}  // namespace
