#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "giraf/analysis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    auto const *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("giraf_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::string const &args) const
  {
    std::string const cmd = "cd '" + dir_.string() + "' && '" GIRAF_CLI "' " + args + " > log.txt 2>&1";
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json manifest(std::string const &sub) const
  {
    std::ifstream is(dir_ / sub / "manifest.json");
    return json::parse(is);
  }

  std::string bytes(std::string const &rel) const
  {
    std::ifstream is(dir_ / rel, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
  }

  giraf::KSpaceArray kspace(std::string const &rel) const { return giraf::read_kspace(dir_ / rel); }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, PhantomWritesFilesAndIsDeterministic)
{
  ASSERT_EQ(run("phantom --lambda0 3x3 --grid 65x65 --seed 7 --out a"), 0);
  for (auto const *f : {"kspace.bin", "image.pgm", "edge.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
  }
  ASSERT_EQ(run("phantom --lambda0 3x3 --grid 65x65 --seed 7 --out b"), 0);
  EXPECT_EQ(bytes("a/kspace.bin"), bytes("b/kspace.bin"));
  // Rerunning from the manifest reproduces the outputs.
  ASSERT_EQ(run("phantom --config a/manifest.json --out c"), 0);
  EXPECT_EQ(bytes("a/kspace.bin"), bytes("c/kspace.bin"));
  EXPECT_EQ(bytes("a/image.pgm"), bytes("c/image.pgm"));
  EXPECT_EQ(manifest("c")["config"]["seed"], 7);
  ASSERT_EQ(run("phantom --lambda0 3x3 --grid 65x65 --seed 8 --out d"), 0);
  EXPECT_NE(bytes("a/kspace.bin"), bytes("d/kspace.bin"));
}

TEST_F(Cli, ExitCodes)
{
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("phantom --bogus"), 2);
  EXPECT_EQ(run("mask --scheme spiral"), 2);
  EXPECT_EQ(run("phantom --lambda0 2x2 --out x"), 2);
  EXPECT_EQ(run("phantom --grid 9x9 --out /proc/giraf_cannot_write"), 1);
  ASSERT_EQ(run("phantom --grid 16x16 --out p"), 0);
  ASSERT_EQ(run("mask --grid 16x16 --out m"), 0);
  EXPECT_EQ(run("recover --kspace p/kspace.bin --mask m/mask.json --lambda -3 --out r"), 2);
  EXPECT_EQ(run("recover --kspace p/kspace.bin --out r"), 2);
  ASSERT_EQ(run("mask --grid 17x17 --out m17"), 0);
  EXPECT_EQ(run("recover --kspace p/kspace.bin --mask m17/mask.json --out r"), 2);
  EXPECT_EQ(run("recover --kspace missing.bin --mask m/mask.json --out r"), 1);
}

TEST_F(Cli, MaskCountsAndSchemes)
{
  ASSERT_EQ(run("mask --grid 64x64 --accel 4 --seed 2 --out u"), 0);
  EXPECT_EQ(manifest("u")["results"]["samples"], 1024);
  ASSERT_EQ(run("mask --grid 64x64 --scheme vd --count 100 --out v"), 0);
  EXPECT_EQ(manifest("v")["results"]["samples"], 100);
}

TEST_F(Cli, ZeroFillAlwaysReportsSnr)
{
  ASSERT_EQ(run("phantom --grid 32x32 --out p"), 0);
  ASSERT_EQ(run("mask --grid 32x32 --accel 3 --out m"), 0);
  ASSERT_EQ(run("recover --kspace p/kspace.bin --mask m/mask.json --solver zerofill --out z"), 0);
  auto const r = manifest("z")["results"];
  EXPECT_DOUBLE_EQ(r["snr_db"].get<double>(), r["zero_fill_snr_db"].get<double>());
  EXPECT_TRUE(fs::exists(dir_ / "z" / "recovered.pgm"));
}

TEST_F(Cli, GirafAtPOneMatchesSvt)
{
  ASSERT_EQ(run("phantom --grid 32x32 --seed 1 --out p"), 0);
  ASSERT_EQ(run("mask --grid 32x32 --accel 1.5 --seed 3 --out m"), 0);
  std::string const common = "recover --kspace p/kspace.bin --mask m/mask.json --filter 15x15 ";
  ASSERT_EQ(run(common + "--solver svt --max-iter 50 --out s"), 0);
  ASSERT_EQ(run(common + "--solver giraf --p 1 --operator exact --max-iter 15 --cg-tol 1e-8 --tol 1e-12 --out g"), 0);
  EXPECT_LT(giraf::mse(kspace("g/recovered.bin"), kspace("s/recovered.bin")), 1e-4);
  // The report carries per-stage timings.
  std::ifstream is(dir_ / "g" / "report.jsonl");
  std::string line;
  std::getline(is, line);
  auto const rec = json::parse(line);
  for (auto const *k : {"gram_s", "decomp_s", "mask_s", "solve_s", "total_s"}) {
    EXPECT_TRUE(rec.contains(k)) << k;
  }
}

TEST_F(Cli, ExactAndApproximateOperatorsAgreeOnStandardPhantom)
{
  ASSERT_EQ(run("phantom --grid 128x128 --seed 1 --out p"), 0);
  ASSERT_EQ(run("mask --grid 128x128 --accel 2 --seed 2 --out m"), 0);
  std::string const common = "recover --kspace p/kspace.bin --mask m/mask.json --filter 7x7 --p 0 --max-iter 10 "
                             "--cg-tol 1e-6 ";
  ASSERT_EQ(run(common + "--operator approx --out a"), 0);
  ASSERT_EQ(run(common + "--operator exact --out e"), 0);
  auto const a = kspace("a/recovered.bin");
  auto const e = kspace("e/recovered.bin");
  EXPECT_LT((a.values() - e.values()).norm() / e.values().norm(), 1e-2);
}

TEST_F(Cli, ValidateRankAndOversampling)
{
  ASSERT_EQ(run("validate rank --seeds 5 --out r8"), 0);
  auto const m8 = manifest("r8")["results"];
  EXPECT_EQ(m8["agreements"], 5);
  ASSERT_EQ(run("validate rank --seeds 5 --oversample 16 --out r16"), 0);
  auto const m16 = manifest("r16")["results"];
  EXPECT_GE(m8["worst_residual"].get<double>() / m16["worst_residual"].get<double>(), 1.5);
  // A tolerance below the quadrature error breaks the agreement.
  EXPECT_EQ(run("validate rank --seeds 2 --tol 1e-6 --out bad"), 1);
}

TEST_F(Cli, ValidateLemmasPhaseAndRho)
{
  ASSERT_EQ(run("validate lemmas --out l"), 0);
  EXPECT_GT(manifest("l")["results"]["contrast"].get<double>(), 1e2);
  ASSERT_EQ(run("validate phase --grid 17x17 --trials 3 --counts 8,289 --out ph"), 0);
  auto const levels = manifest("ph")["results"]["levels"];
  ASSERT_EQ(levels.size(), 2U);
  EXPECT_EQ(levels[0]["successes"], 0);
  EXPECT_EQ(levels[1]["successes"], 3);
  std::ifstream csv(dir_ / "ph" / "phase.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "samples,trial,seed,error,success");
  ASSERT_EQ(run("validate rho --raster 128 --restarts 4 --out rho"), 0);
  EXPECT_GT(manifest("rho")["results"]["rho2"].get<double>(), 0.0);
}

TEST_F(Cli, BenchEmitsTable)
{
  ASSERT_EQ(run("bench --grids 24x24,32x32 --filters 7x7 --svt-iters 20 --giraf-iters 8 --out b"), 0);
  std::ifstream is(dir_ / "b" / "bench.csv");
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "algorithm,grid,filter,iterations,total_s,decomp_s_per_iter,final_mse");
  int rows = 0;
  for (std::string line; std::getline(is, line);) {
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(manifest("b")["results"]["rows"].size(), 4U);
}
