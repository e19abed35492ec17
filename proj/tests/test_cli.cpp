#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QNNC_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qnnc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EntropyReport) {
  const auto r = run("entropy --rows 4 --cols 4 --probs 0.5,0.5 --mc-trials 100");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("plbg_bound=11.415"), std::string::npos) << r.out;
}

TEST_F(Cli, CompressedAndRawInferenceAgree) {
  ASSERT_EQ(run("gen --dims 6,5,4,3 --probs 0.4,0.2,0.2,0.2 --seed 9 --out " + path("net.qnnc")).code, 0);
  ASSERT_EQ(run("compress --in " + path("net.qnnc") + " --out " + path("c.qnnc")).code, 0);
  write("x.txt", "0.5\n-1\n2\n\n0.25\n1e-3\n-0.75\n");
  const auto raw = run("infer --model " + path("net.qnnc") + " --input " + path("x.txt") + " --activation relu");
  const auto packed = run("infer --model " + path("c.qnnc") + " --input " + path("x.txt") + " --activation relu");
  ASSERT_EQ(raw.code, 0);
  ASSERT_EQ(packed.code, 0);
  std::istringstream a(raw.out), b(packed.out);
  double u = 0, v = 0;
  int lines = 0;
  while (a >> u && b >> v) {
    EXPECT_NEAR(u, v, 1e-9);
    ++lines;
  }
  EXPECT_EQ(lines, 3);
  const auto arg = run("infer --model " + path("c.qnnc") + " --input " + path("x.txt") + " --final softmax --argmax");
  EXPECT_EQ(arg.code, 0);
  EXPECT_EQ(arg.out.size(), 2u);
}

TEST_F(Cli, DecompressRoundTrip) {
  ASSERT_EQ(run("gen --dims 5,5,5 --probs 0.5,0.5 --seed 1 --out " + path("n.qnnc")).code, 0);
  for (const char* mode : {"plbg", "ktree"}) {
    ASSERT_EQ(run(std::string("compress --mode ") + mode + " --in " + path("n.qnnc") + " --out " + path("c.qnnc")).code, 0);
    ASSERT_EQ(run("decompress --in " + path("c.qnnc") + " --out " + path("d.qnnc")).code, 0);
    write("x.txt", "1\n2\n3\n4\n5\n");
    const auto a = run("infer --model " + path("n.qnnc") + " --input " + path("x.txt"));
    const auto b = run("infer --model " + path("d.qnnc") + " --input " + path("x.txt"));
    EXPECT_EQ(a.out, b.out) << mode;
  }
}

TEST_F(Cli, AllZeroNetworkInfersZeros) {
  ASSERT_EQ(run("gen --dims 3,4,2 --probs 1,0 --out " + path("z.qnnc")).code, 0);
  ASSERT_EQ(run("compress --in " + path("z.qnnc") + " --out " + path("c.qnnc")).code, 0);
  write("x.txt", "1\n2\n3\n");
  const auto r = run("infer --model " + path("c.qnnc") + " --input " + path("x.txt") + " --stats");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n0\n");
}

TEST_F(Cli, BenchCsv) {
  const auto r = run("bench --rows 16 --cols 16 --probs 0.5,0.5 --trials 100 --seed 3 --csv " + path("b.csv"));
  ASSERT_EQ(r.code, 0);
  std::ifstream f(path("b.csv"));
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line.rfind("shape,m,trial,table_bound_bits,observed_bits,ideal_bits", 0), 0u);
  int rows = 0;
  double observed = 0, ideal = 0;
  while (std::getline(f, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 17u);
    observed += std::stod(cells[4]);
    ideal += std::stod(cells[5]);
    EXPECT_EQ(cells[14], "true");
    EXPECT_EQ(cells[15], "mt19937_64");
  }
  EXPECT_EQ(rows, 100);
  EXPECT_LE(observed / rows, ideal / rows + 64);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("entropy --rows 4 --cols 4 --probs 0.5,0.7").code, 1);
  EXPECT_EQ(run("infer --model " + path("missing.qnnc") + " --input " + path("x.txt")).code, 2);

  write("junk.qnnc", "QNNC not really a container");
  write("x.txt", "1\n");
  EXPECT_EQ(run("infer --model " + path("junk.qnnc") + " --input " + path("x.txt")).code, 2);
  EXPECT_EQ(run("decompress --in " + path("junk.qnnc") + " --out " + path("o.qnnc")).code, 2);

  ASSERT_EQ(run("gen --rows 3 --cols 2 --out " + path("g.qnnc")).code, 0);
  write("bad.txt", "1\nabc\n");
  EXPECT_EQ(run("infer --model " + path("g.qnnc") + " --input " + path("bad.txt")).code, 2);
  EXPECT_EQ(run("infer --model " + path("g.qnnc") + " --input " + path("x.txt")).code, 2);
  EXPECT_EQ(run("compress --mode ktree --in " + path("g.qnnc") + " --out " + path("k.qnnc")).code, 1);
}
