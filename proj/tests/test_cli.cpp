#include "knockoffs/harness.hpp"
#include "knockoffs/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace knockoffs;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("knockoffs_cli_" + std::string(info->name()) + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the CLI with stdout and stderr captured to files; returns the exit code.
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(KNOCKOFFS_CLI_PATH) + "' " + args + " > '" +
                            path("stdout.txt") + "' 2> '" + path("stderr.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // File contents with the timestamp header line removed.
  static std::string without_timestamp(const std::string& file) {
    std::istringstream in(slurp(file));
    std::string line, out;
    while (std::getline(in, line))
      if (line.find("timestamp: ") == std::string::npos) out += line + '\n';
    return out;
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  void write_chain_data() {
    Rng rng(1);
    const MarkovChaind chain = build_toy_mc(ToyMcSpec::make(12, 3, 4));
    std::ofstream mc(path("toy.mcparams"));
    io::write_mc_params(mc, chain);
    IntMatrix x(60, 12);
    VectorXd y(60);
    for (int i = 0; i < 60; ++i) {
      const Sequence s = sample(chain, rng);
      for (int j = 0; j < 12; ++j) x(i, j) = s[j];
      y(i) = (s[0] + s[1] + rng.normal() > 3) ? 1 : 0;
    }
    std::ofstream xs(path("x.tsv"));
    io::write_int_tsv(xs, x);
    std::ofstream ys(path("y.tsv"));
    io::write_real_tsv(ys, y);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_NE(slurp(path("stdout.txt")).find("1.0.0"), std::string::npos);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("audit --params " + path("missing.params")), 1);
  write_chain_data();
  EXPECT_EQ(run("knockoff --params " + path("toy.mcparams") + " --data " + path("x.tsv") +
                " --out " + path("xk.tsv") + " --bogus 3"),
            1);
  EXPECT_EQ(run("knockoff --params " + path("toy.mcparams") + " --data " + path("x.tsv") +
                " --out " + path("no/such/dir/xk.tsv")),
            1);
}

TEST_F(CliTest, MalformedParamsExitTwoNamingLine) {
  write("bad.mcparams", "MCPARAMS 1\nK 2 P 2\nQ1 0.5 0.5\nQ 1\n0.9 0.1\n0.2 oops\n");
  write("x.tsv", "0\t1\n");
  EXPECT_EQ(run("knockoff --params " + path("bad.mcparams") + " --data " + path("x.tsv") +
                " --out " + path("xk.tsv")),
            2);
  EXPECT_NE(slurp(path("stderr.txt")).find("line 6"), std::string::npos);
}

TEST_F(CliTest, StatesOutsideModelExitTwo) {
  write_chain_data();
  write("bad.tsv", "0 0 0 0 0 0 0 0 0 0 0 9\n");
  EXPECT_EQ(run("knockoff --params " + path("toy.mcparams") + " --data " + path("bad.tsv") +
                " --out " + path("xk.tsv")),
            2);
}

TEST_F(CliTest, KnockoffIsReproducibleAndThreadInvariant) {
  write_chain_data();
  const std::string base =
      "knockoff --params " + path("toy.mcparams") + " --data " + path("x.tsv") + " --seed 7";
  ASSERT_EQ(run(base + " --out " + path("a.tsv")), 0);
  fs::copy_file(path("a.tsv"), path("first.tsv"));
  ASSERT_EQ(run(base + " --out " + path("a.tsv")), 0);
  EXPECT_EQ(without_timestamp(path("first.tsv")), without_timestamp(path("a.tsv")));
  ASSERT_EQ(run(base + " --out " + path("c.tsv") + " --threads 3"), 0);
  ASSERT_EQ(run(base + " --out " + path("d.tsv"), "KNOCKOFF_THREADS=2"), 0);
  std::ifstream a(path("a.tsv")), c(path("c.tsv")), d(path("d.tsv"));
  EXPECT_EQ(io::read_int_tsv(a), io::read_int_tsv(c));
  a.clear();
  a.seekg(0);
  EXPECT_EQ(io::read_int_tsv(a), io::read_int_tsv(d));
  ASSERT_EQ(run("knockoff --params " + path("toy.mcparams") + " --data " + path("x.tsv") +
                " --seed 8 --out " + path("e.tsv")),
            0);
  EXPECT_NE(without_timestamp(path("a.tsv")), without_timestamp(path("e.tsv")));
}

TEST_F(CliTest, OutputHeaderRecordsProvenance) {
  write_chain_data();
  ASSERT_EQ(run("knockoff --params " + path("toy.mcparams") + " --data " + path("x.tsv") +
                " --seed 7 --out " + path("a.tsv")),
            0);
  const std::string text = slurp(path("a.tsv"));
  EXPECT_EQ(text.rfind("# knockoffs 1.0.0\n", 0), 0u);
  EXPECT_NE(text.find("# subcommand: knockoff\n"), std::string::npos);
  EXPECT_NE(text.find("--seed=7"), std::string::npos);
  EXPECT_NE(text.find("# seed: 7\n"), std::string::npos);
  EXPECT_NE(text.find("# timestamp: "), std::string::npos);
}

TEST_F(CliTest, FitKnockoffFilterPipeline) {
  write_chain_data();
  ASSERT_EQ(run("fit-mc --data " + path("x.tsv") + " --states 4 --out " + path("fit.mcparams")), 0);
  std::ifstream fitted(path("fit.mcparams"));
  EXPECT_EQ(io::read_mc_params(fitted).states(), 4);
  ASSERT_EQ(run("knockoff --params " + path("fit.mcparams") + " --data " + path("x.tsv") +
                " --seed 3 --out " + path("xk.tsv")),
            0);
  ASSERT_EQ(run("filter --data " + path("x.tsv") + " --knockoffs " + path("xk.tsv") +
                " --response " + path("y.tsv") + " --folds 5 --lambda-grid 30 --seed 2 --out " +
                path("w.csv")),
            0)
      << slurp(path("stderr.txt"));
  std::istringstream csv(slurp(path("w.csv")));
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "j,w,selected") {
      header = true;
      continue;
    }
    ++rows;
  }
  EXPECT_TRUE(header);
  EXPECT_EQ(rows, 12);
}

TEST_F(CliTest, FilterRejectsNonBinaryLogisticResponse) {
  write_chain_data();
  std::string y;
  for (int i = 0; i < 60; ++i) y += (i == 0 ? "2\n" : "0\n");
  write("ybad.tsv", y);
  EXPECT_EQ(run("filter --data " + path("x.tsv") + " --knockoffs " + path("x.tsv") +
                " --response " + path("ybad.tsv") + " --out " + path("w.csv")),
            2);
}

TEST_F(CliTest, AuditSmallHmmPasses) {
  Rng rng(4);
  const HiddenMarkovModeld hmm = knockoffs::testing::random_hmm(2, 2, 3, rng);
  std::ofstream(path("small.hmmparams")) << [&] {
    std::ostringstream s;
    io::write_hmm_params(s, hmm);
    return s.str();
  }();
  ASSERT_EQ(run("audit --params " + path("small.hmmparams")), 0);
  const std::string out = slurp(path("stdout.txt"));
  EXPECT_NE(out.find("result: PASS"), std::string::npos);
}

TEST_F(CliTest, CompileGenoThenAudit) {
  ToyGenoSpec spec;
  spec.p = 2;
  spec.K = 2;
  std::ofstream(path("g.genoparams")) << [&] {
    std::ostringstream s;
    io::write_geno_params(s, build_toy_geno(spec));
    return s.str();
  }();
  ASSERT_EQ(run("compile-geno --params " + path("g.genoparams") + " --out " + path("g.hmmparams")), 0);
  std::ifstream compiled(path("g.hmmparams"));
  const HiddenMarkovModeld hmm = io::read_hmm_params(compiled);
  EXPECT_EQ(hmm.states(), 3);
  EXPECT_EQ(hmm.symbols(), 3);
  EXPECT_EQ(run("audit --params " + path("g.genoparams")), 0);
}

TEST_F(CliTest, FitHmmWritesLoadableModel) {
  Rng rng(5);
  const HiddenMarkovModeld truth = knockoffs::testing::random_hmm(2, 3, 5, rng);
  IntMatrix x(40, 5);
  for (int i = 0; i < 40; ++i) {
    const Sequence s = sample(truth, rng).second;
    for (int j = 0; j < 5; ++j) x(i, j) = s[j];
  }
  std::ofstream(path("h.tsv")) << [&] {
    std::ostringstream s;
    io::write_int_tsv(s, x);
    return s.str();
  }();
  const std::string args = "fit-hmm --data " + path("h.tsv") + " --states 2 --symbols 3 --seed 4 " +
                           "--max-iters 20 --out ";
  ASSERT_EQ(run(args + path("a.hmmparams")), 0);
  fs::copy_file(path("a.hmmparams"), path("first.hmmparams"));
  ASSERT_EQ(run(args + path("a.hmmparams")), 0);
  EXPECT_EQ(without_timestamp(path("first.hmmparams")), without_timestamp(path("a.hmmparams")));
  EXPECT_NE(slurp(path("a.hmmparams")).find("--tied=false"), std::string::npos);
  ASSERT_EQ(run("knockoff --params " + path("a.hmmparams") + " --data " + path("h.tsv") +
                " --out " + path("hk.tsv") + " --latent-out " + path("z.tsv")),
            0);
  std::ifstream z(path("z.tsv"));
  EXPECT_EQ(io::read_int_tsv(z).cols(), 10);
}

TEST_F(CliTest, SimulateWritesRowsAndSummary) {
  const std::string args =
      "simulate --design mc --n 60 --p 16 --s 4 --reps 3 --amps 0,8 --folds 4 --lambda-grid 15 "
      "--seed 1 --plot " + path("plot.svg") + " --out ";
  ASSERT_EQ(run(args + path("a.csv")), 0) << slurp(path("stderr.txt"));
  std::istringstream csv(slurp(path("a.csv")));
  std::string line;
  int data = 0, summary = 0;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("design,", 0) == 0) continue;
    if (line.find(",mean,") != std::string::npos)
      ++summary;
    else
      ++data;
  }
  EXPECT_EQ(data, 6);
  EXPECT_EQ(summary, 2);
  EXPECT_NE(slurp(path("plot.svg")).find("<svg"), std::string::npos);
}
