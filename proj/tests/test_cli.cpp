#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chanvese/cli.hpp"
#include "chanvese/image_io.hpp"
#include "chanvese/imaging.hpp"
#include "chanvese/metrics.hpp"

namespace cv = chanvese;
namespace cli = chanvese::cli;
namespace fs = std::filesystem;

namespace {

cli::CliConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "chanvese");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_args(static_cast<int>(argv.size()), argv.data());
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "chanvese");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("chanvese_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string disk_fixture() {
    const std::string p = path("disk.png");
    EXPECT_EQ(run_main({"-q", "synth", "disk", "--out", p}).code, 0);
    return p;
  }

  fs::path dir_;
};

TEST(ParseArgs, DefaultsWithInputOnly) {
  const auto cfg = parse({"segment", "in.png"});
  EXPECT_EQ(cfg.command, cli::Command::segment);
  EXPECT_EQ(cfg.segment.input, "in.png");
  const cv::Params& p = cfg.segment.params;
  EXPECT_EQ(p.nu, 0.0);
  EXPECT_EQ(p.lambda1, 1.0);
  EXPECT_EQ(p.lambda2, 1.0);
  EXPECT_EQ(p.p, 1);
  EXPECT_EQ(p.eps, 1.0);
  EXPECT_EQ(p.mu, 0.2);
  EXPECT_EQ(p.max_iters, 500);
  EXPECT_TRUE(p.reinit_subcell_fix);
  EXPECT_FALSE(cfg.segment.init.has_value());
  EXPECT_FALSE(cfg.segment.roi.has_value());
}

TEST(ParseArgs, NumericFlags) {
  const auto cfg = parse({"segment", "in.png", "--p", "2", "--mu", "0.5", "--nu", "0.1",
                          "--lambda1", "2", "--lambda2", "3", "--eps", "0.5", "--dt", "0.25",
                          "--dtau", "0.3", "--max-iters", "42", "--reinit-every", "2",
                          "--reinit-steps", "4", "--reinit-scheme", "upwind", "--seed", "9"});
  const cv::Params& p = cfg.segment.params;
  EXPECT_EQ(p.p, 2);
  EXPECT_EQ(p.mu, 0.5);
  EXPECT_EQ(p.nu, 0.1);
  EXPECT_EQ(p.lambda1, 2.0);
  EXPECT_EQ(p.lambda2, 3.0);
  EXPECT_EQ(p.eps, 0.5);
  EXPECT_EQ(*p.dt, 0.25);
  EXPECT_EQ(*p.dtau, 0.3);
  EXPECT_EQ(p.max_iters, 42);
  EXPECT_EQ(p.reinit_every, 2);
  EXPECT_EQ(p.reinit_steps, 4);
  EXPECT_FALSE(p.reinit_subcell_fix);
  EXPECT_EQ(cfg.segment.seed, 9u);
}

TEST(ParseArgs, InitFlags) {
  auto c = std::get<cv::CircleInit>(*parse({"segment", "x", "--circle", "10,12.5,7"}).segment.init);
  EXPECT_EQ(c.cx, 10.0);
  EXPECT_EQ(c.cy, 12.5);
  EXPECT_EQ(c.radius, 7.0);
  auto r = std::get<cv::RectangleInit>(*parse({"segment", "x", "--init", "rect", "--rect", "1,2,3,4"}).segment.init);
  EXPECT_EQ(r.x1, 3.0);
  auto k = std::get<cv::CheckerboardInit>(*parse({"segment", "x", "--init", "checker"}).segment.init);
  EXPECT_EQ(k.period, cv::CheckerboardInit{}.period);
  auto k2 = std::get<cv::CheckerboardInit>(*parse({"segment", "x", "--checker", "6"}).segment.init);
  EXPECT_EQ(k2.period, 6.0);
  const auto roi = *parse({"segment", "x", "--roi", "5,6,10,11"}).segment.roi;
  EXPECT_EQ(roi.x0, 5);
  EXPECT_EQ(roi.y0, 6);
  EXPECT_EQ(roi.width, 10);
  EXPECT_EQ(roi.height, 11);
}

TEST(ParseArgs, UsageErrors) {
  const std::vector<std::vector<std::string>> bad = {
      {"segment", "x", "--bogus"},
      {"segment", "x", "--mu", "abc"},
      {"segment", "x", "--p", "1.5"},
      {"segment", "x", "--mu", "-1"},
      {"segment", "x", "--dtau", "0.9"},
      {"segment", "x", "--circle", "1,2"},
      {"segment", "x", "--circle", "1,2,x"},
      {"segment", "x", "--circle", "1,2,3", "--rect", "1,2,3,4"},
      {"segment", "x", "--init", "rect", "--circle", "1,2,3"},
      {"segment", "x", "--init", "rect"},
      {"segment", "x", "--init", "blob"},
      {"segment", "x", "--roi", "1,2,3"},
      {"segment", "x", "--roi", "1.5,2,3,3"},
      {"segment"},
      {},
      {"synth", "disk"},
      {"synth", "star", "--out", "a.png"},
  };
  for (const auto& args : bad) {
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_THROW(parse(args), cli::UsageError) << joined;
    const auto o = run_main(args);
    EXPECT_EQ(o.code, cli::kExitUsage) << joined;
    EXPECT_FALSE(o.err.empty());
    EXPECT_TRUE(o.out.empty());
  }
}

TEST(ParseArgs, HelpExitsZero) {
  const auto o = run_main({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("segment"), std::string::npos);
  const auto s = run_main({"segment", "--help"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("--reinit-steps"), std::string::npos);
}

TEST(TraceCsv, HeaderAndTwelveDigits) {
  cv::TraceRecord r{3, 1.0 / 3.0, 0.25, 100.5, 2000.0, 1234.56789012345, 1e-7, 17};
  const std::string csv = cli::trace_csv({r});
  EXPECT_EQ(csv, "iter,c1,c2,length,area_inside,energy,q,m\n"
                 "3,0.333333333333,0.25,100.5,2000,1234.56789012,1e-07,17\n");
}

TEST_F(CliTest, RoiOutsideImageIsInputError) {
  const std::string img = path("small.png");
  cv::save_mask(cv::Mask(8, 8), img);
  const auto o = run_main({"segment", img, "--roi", "5,5,10,10", "--out", path("out")});
  EXPECT_EQ(o.code, cli::kExitInput);
  EXPECT_NE(o.err.find("bounds"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, UnreadableInputCreatesNothing) {
  const auto o = run_main({"segment", path("missing.png"), "--out", path("out")});
  EXPECT_EQ(o.code, cli::kExitInput);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, InitOutsideImageIsInputError) {
  const auto o = run_main({"segment", disk_fixture(), "--circle", "500,5,3", "--out", path("out")});
  EXPECT_EQ(o.code, cli::kExitInput);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, NumericalBlowupExitsThree) {
  const auto o = run_main({"segment", disk_fixture(), "--dt", "1e308", "--lambda1", "1e10",
                           "--out", path("out")});
  EXPECT_EQ(o.code, cli::kExitNumerical);
  EXPECT_NE(o.err.find("iteration"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, UnwritableOutputExitsFour) {
  const std::string blocker = path("file");
  std::ofstream(blocker) << "x";
  const auto o = run_main({"segment", disk_fixture(), "--max-iters", "2", "--out", blocker + "/sub"});
  EXPECT_EQ(o.code, cli::kExitOutput);
}

TEST_F(CliTest, EndToEndDiskRun) {
  const std::string img = disk_fixture();
  const auto o = run_main({"segment", img, "--out", path("out")});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* f : {"mask.png", "overlay.png", "phi_final.pgm", "trace.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  for (const auto& e : fs::directory_iterator(dir_ / "out")) {
    EXPECT_EQ(e.path().filename().string().rfind(".tmp", 0), std::string::npos);
  }
  // Summary reports the iteration count; the trace has one row per iteration.
  const auto pos = o.out.find("iterations: ");
  ASSERT_NE(pos, std::string::npos);
  const int iters = std::stoi(o.out.substr(pos + 12));
  EXPECT_NE(o.out.find("converged: yes"), std::string::npos);
  EXPECT_NE(o.out.find("final_energy: "), std::string::npos);
  std::istringstream csv(slurp(dir_ / "out" / "trace.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "iter,c1,c2,length,area_inside,energy,q,m");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, iters);

  // The mask matches the generator's ground truth.
  const auto mask = cv::load_grayscale((dir_ / "out" / "mask.png").string());
  const auto truth = cv::synth_disk(128, 128, 63.5, 63.5, 30, 1, 0).truth;
  cv::Mask m(128, 128);
  for (std::size_t k = 0; k < m.size(); ++k) m.values()[k] = mask.values()[k] > 0.5;
  EXPECT_GE(cv::dice(m, truth), 0.98);
}

TEST_F(CliTest, TraceReparsesToInMemoryTrace) {
  const std::string img = disk_fixture();
  ASSERT_EQ(run_main({"-q", "segment", img, "--out", path("out")}).code, 0);
  const auto u = cv::load_grayscale(img);
  const auto result = cv::segment(u, cv::Params{}, cv::default_init(u.width(), u.height()));
  std::istringstream csv(slurp(dir_ / "out" / "trace.csv"));
  std::string line;
  std::getline(csv, line);
  std::size_t k = 0;
  while (std::getline(csv, line)) {
    ASSERT_LT(k, result.trace.size());
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 8u);
    const auto& t = result.trace[k];
    const double want[] = {double(t.iter), t.c1, t.c2, t.length, t.area_inside, t.energy, t.q, double(t.m)};
    for (int c = 0; c < 8; ++c) {
      EXPECT_LE(std::abs(v[c] - want[c]), 1e-9 * std::max(1.0, std::abs(want[c]))) << "row " << k;
    }
    ++k;
  }
  EXPECT_EQ(k, result.trace.size());
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const std::string img = path("noisy.png");
  ASSERT_EQ(run_main({"-q", "synth", "disk", "--out", img, "--noise", "0.15", "--seed", "42"}).code, 0);
  ASSERT_EQ(run_main({"-q", "segment", img, "--out", path("a"), "--seed", "42"}).code, 0);
  ASSERT_EQ(run_main({"-q", "segment", img, "--out", path("b"), "--seed", "42"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "trace.csv"), slurp(dir_ / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "mask.png"), slurp(dir_ / "b" / "mask.png"));
}

TEST_F(CliTest, RoiCropsBeforeSegmenting) {
  const std::string img = disk_fixture();
  ASSERT_EQ(run_main({"-q", "segment", img, "--roi", "24,24,80,80", "--out", path("out")}).code, 0);
  const auto mask = cv::load_grayscale((dir_ / "out" / "mask.png").string());
  EXPECT_EQ(mask.width(), 80);
  EXPECT_EQ(mask.height(), 80);
}

TEST_F(CliTest, SynthWritesImageAndMask) {
  const auto o = run_main({"synth", "thin", "--out", path("t/thin.pgm"), "--mask", path("t/truth.png"),
                           "--width", "40", "--height", "30", "--thickness", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto img = cv::load_grayscale(path("t/thin.pgm"));
  const auto truth = cv::load_grayscale(path("t/truth.png"));
  EXPECT_EQ(img.width(), 40);
  EXPECT_EQ(img.height(), 30);
  int n = 0;
  for (double v : truth.values()) n += v > 0.5;
  EXPECT_EQ(n, 40 * 2 + 30 * 2 - 4);
}

// Same checks through the installed binary, covering argv and exit status.
int run_binary(const std::string& args) {
  const char* bin = std::getenv("CHANVESE_BIN");
  if (!bin) return -1;
  const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitCodes) {
  if (!std::getenv("CHANVESE_BIN")) GTEST_SKIP() << "CHANVESE_BIN not set";
  const std::string img = path("d.png");
  EXPECT_EQ(run_binary("synth disk --out " + img), 0);
  EXPECT_EQ(run_binary("segment " + img + " --max-iters 5 --out " + path("o")), 0);
  EXPECT_TRUE(fs::exists(path("o/trace.csv")));
  EXPECT_EQ(run_binary("segment " + img + " --frobnicate"), 1);
  EXPECT_EQ(run_binary("segment " + path("nope.png") + " --out " + path("o2")), 2);
  EXPECT_FALSE(fs::exists(path("o2")));
  EXPECT_EQ(run_binary("segment " + img + " --dt 1e308 --lambda1 1e10 --out " + path("o3")), 3);
  EXPECT_FALSE(fs::exists(path("o3")));
}

}  // namespace
