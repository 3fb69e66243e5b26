#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "kgbench/cli.hpp"

namespace kgbench {
namespace {

namespace fs = std::filesystem;

const fs::path kToy = KGBENCH_TOY_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kgbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("kgbench_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path build_toy(const std::string& name, const std::string& seed = "42") {
    const auto out = dir_ / name;
    const auto r = run_cli({"-q", "build", "--full", (kToy / "full.tsv").string(), "--config",
                            (kToy / "sampler.json").string(), "--seed", seed, "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  Outcome train_toy(const fs::path& data, const fs::path& ckpt) {
    return run_cli({"-q", "train", "--data", data.string(), "--model", "transe", "--out", ckpt.string(), "--epochs",
                    "30", "--dim", "16", "--lr", "0.01", "--num-batches", "5"});
  }

  fs::path dir_;
};

TEST(Cli, PresetsTableListsTransEOnOpenBg500) {
  const auto r = run_cli({"presets"});
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string dataset, model, batches, batch_size, epochs, lr;
    fields >> dataset >> model >> batches >> batch_size >> epochs >> lr;
    if (dataset == "openbg500" && model == "transe") {
      found = true;
      EXPECT_EQ(lr, "0.5");
      EXPECT_EQ(batches, "100");
      EXPECT_EQ(epochs, "1000");
    }
  }
  EXPECT_TRUE(found) << r.out;
}

TEST(Cli, PresetsJsonHasEveryRow) {
  const auto r = run_cli({"presets", "--json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.size(), 17u);
}

TEST(Cli, EvalWithoutCheckpointIsAUsageError) {
  const auto r = run_cli({"eval", "--data", "somewhere"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--ckpt"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"fly"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"presets", "eval"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"train", "--data", "x", "--model", "transe", "--out", "y", "--precision", "half"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"--workers", "0", "presets"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, ContractErrorsExitOne) {
  const auto missing = run_cli({"-q", "train", "--data", (dir_ / "nope").string(), "--model", "transe", "--out",
                                (dir_ / "m.kge").string()});
  EXPECT_EQ(missing.code, cli::kExitFailure);
  EXPECT_NE(missing.err.find("kgbench:"), std::string::npos);
  const auto bench = build_toy("bench");
  const auto bad_model = run_cli({"-q", "train", "--data", bench.string(), "--model", "rescal", "--out",
                                  (dir_ / "m.kge").string()});
  EXPECT_EQ(bad_model.code, cli::kExitFailure);
  const auto bad_ckpt = dir_ / "garbage.kge";
  std::ofstream(bad_ckpt) << "not a checkpoint";
  EXPECT_EQ(run_cli({"eval", "--data", bench.string(), "--ckpt", bad_ckpt.string()}).code, cli::kExitFailure);
}

TEST_F(CliTest, BuildTrainEvalPipeline) {
  const auto bench = build_toy("bench");
  for (const char* f : {"train.tsv", "dev.tsv", "test.tsv", "entity2id.tsv", "relation2id.tsv", "audit.json",
                        "relation_histogram.csv"}) {
    EXPECT_TRUE(fs::exists(bench / f)) << f;
  }
  const auto audit = nlohmann::json::parse(slurp(bench / "audit.json"));
  EXPECT_EQ(audit["disjoint"], true);
  EXPECT_EQ(audit["unseen_test"], 0);

  const auto ckpt = dir_ / "model" / "transe.kge";
  const auto trained = train_toy(bench, ckpt);
  ASSERT_EQ(trained.code, 0) << trained.err;
  EXPECT_TRUE(fs::exists(ckpt));
  EXPECT_EQ(trained.out.rfind("epoch,loss\n", 0), 0u);
  EXPECT_NE(trained.out.find("\n30,"), std::string::npos);

  const auto report_path = dir_ / "report.json";
  const auto evaluated = run_cli({"eval", "--data", bench.string(), "--ckpt", ckpt.string(), "--out",
                                  report_path.string()});
  ASSERT_EQ(evaluated.code, 0) << evaluated.err;
  const auto report = nlohmann::json::parse(slurp(report_path));
  EXPECT_EQ(report["protocol"], "filtered");
  EXPECT_EQ(report["n_test"], audit["test"]);
  EXPECT_GE(report["mr"].get<double>(), 1.0);
  EXPECT_GE(report["mrr"].get<double>(), report["hits1"].get<double>());
}

TEST_F(CliTest, ValidateExitCodes) {
  const auto bench = build_toy("bench");
  const auto ok = run_cli({"-q", "validate", "--schema", (kToy / "schema.json").string(), "--data", bench.string()});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(nlohmann::json::parse(ok.out)["conforms"], true);

  auto schema = nlohmann::json::parse(slurp(kToy / "schema.json"));
  schema["relations"]["category"]["range"] = {"Concept"};
  const auto broken = dir_ / "broken.json";
  std::ofstream(broken) << schema.dump();
  const auto report_path = dir_ / "violations.json";
  const auto bad = run_cli({"-q", "validate", "--schema", broken.string(), "--data", bench.string(), "--out",
                            report_path.string()});
  EXPECT_EQ(bad.code, cli::kExitFailure);
  const auto report = nlohmann::json::parse(slurp(report_path));
  EXPECT_EQ(report["conforms"], false);
  ASSERT_FALSE(report["violations"].empty());
  EXPECT_EQ(report["violations"][0]["rule"], "RangeViolation");
}

TEST_F(CliTest, EverySubcommandIsDeterministic) {
  const auto a = build_toy("a");
  const auto b = build_toy("b");
  for (const char* f : {"train.tsv", "dev.tsv", "test.tsv", "entity2id.tsv", "relation2id.tsv", "audit.json",
                        "relation_histogram.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto c = build_toy("c", "43");
  EXPECT_NE(slurp(a / "train.tsv"), slurp(c / "train.tsv"));

  const auto ta = train_toy(a, dir_ / "ma" / "m.kge");
  const auto tb = train_toy(a, dir_ / "mb" / "m.kge");
  ASSERT_EQ(ta.code, 0);
  EXPECT_EQ(ta.out, tb.out);
  EXPECT_EQ(slurp(dir_ / "ma" / "m.kge"), slurp(dir_ / "mb" / "m.kge"));

  const auto ea = run_cli({"eval", "--data", a.string(), "--ckpt", (dir_ / "ma" / "m.kge").string()});
  const auto eb = run_cli({"--workers", "3", "eval", "--data", a.string(), "--ckpt", (dir_ / "ma" / "m.kge").string()});
  ASSERT_EQ(ea.code, 0);
  EXPECT_EQ(ea.out, eb.out);
}

TEST_F(CliTest, InputFilesAreNotModified) {
  const auto full_before = slurp(kToy / "full.tsv");
  const auto bench = build_toy("bench");
  std::map<std::string, std::string> before;
  for (const auto& entry : fs::directory_iterator(bench)) before[entry.path().filename()] = slurp(entry.path());
  // Checkpoint written into the data directory: dictionaries must not be rewritten.
  ASSERT_EQ(train_toy(bench, bench / "m.kge").code, 0);
  ASSERT_EQ(run_cli({"-q", "validate", "--schema", (kToy / "schema.json").string(), "--data", bench.string()}).code, 0);
  ASSERT_EQ(run_cli({"eval", "--data", bench.string(), "--ckpt", (bench / "m.kge").string()}).code, 0);
  for (const auto& [name, content] : before) EXPECT_EQ(slurp(bench / name), content) << name;
  EXPECT_EQ(slurp(kToy / "full.tsv"), full_before);
}

TEST_F(CliTest, ReadsPrefixedOpenBg500FileNames) {
  const auto bench = build_toy("bench");
  const auto released = dir_ / "released";
  fs::create_directories(released);
  for (const char* split : {"train", "dev", "test"}) {
    fs::copy_file(bench / (std::string(split) + ".tsv"), released / ("OpenBG500_" + std::string(split) + ".tsv"));
  }
  fs::copy_file(bench / "entity2id.tsv", released / "entity2id.tsv");
  fs::copy_file(bench / "relation2id.tsv", released / "relation2id.tsv");
  ASSERT_EQ(train_toy(bench, dir_ / "m.kge").code, 0);
  const auto plain = run_cli({"eval", "--data", bench.string(), "--ckpt", (dir_ / "m.kge").string()});
  const auto prefixed = run_cli({"eval", "--data", released.string(), "--ckpt", (dir_ / "m.kge").string()});
  ASSERT_EQ(prefixed.code, 0) << prefixed.err;
  EXPECT_EQ(prefixed.out, plain.out);
}

TEST_F(CliTest, WorkersEnvironmentVariableIsOverriddenByFlag) {
  const auto bench = build_toy("bench");
  ASSERT_EQ(train_toy(bench, dir_ / "m.kge").code, 0);
  const std::vector<std::string> eval = {"eval", "--data", bench.string(), "--ckpt", (dir_ / "m.kge").string()};
  const auto serial = run_cli(eval);
  ::setenv("KGBENCH_WORKERS", "4", 1);
  const auto from_env = run_cli(eval);
  ::setenv("KGBENCH_WORKERS", "0", 1);
  const auto bad_env = run_cli(eval);
  auto with_flag = eval;
  with_flag.insert(with_flag.begin(), {"--workers", "2"});
  const auto from_flag = run_cli(with_flag);
  ::setenv("KGBENCH_WORKERS", "x3", 1);
  const auto garbage_env = run_cli(eval);
  ::unsetenv("KGBENCH_WORKERS");
  EXPECT_EQ(from_env.code, cli::kExitOk);
  EXPECT_EQ(from_env.out, serial.out);
  EXPECT_EQ(bad_env.code, cli::kExitUsage);
  EXPECT_NE(bad_env.err.find("KGBENCH_WORKERS"), std::string::npos);
  EXPECT_EQ(garbage_env.code, cli::kExitUsage);
  EXPECT_EQ(from_flag.code, cli::kExitOk);
  EXPECT_EQ(from_flag.out, serial.out);
}

}  // namespace
}  // namespace kgbench
