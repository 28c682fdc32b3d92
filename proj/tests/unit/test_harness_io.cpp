#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "kflow/error.hpp"
#include "kflow/harness.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/io.hpp"
#include "kflow/spectral.hpp"

using namespace kflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(KFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Io, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Io, SnapshotLayoutAndRoundTrip) {
  const fs::path dir = scratch("snap");
  const TorusGrid g(1.5, 8, 4);
  RandomFieldSpec spec;
  spec.subspace = Subspace::Full;
  const auto w = random_field(g, spec);
  const auto side = write_snapshot(dir / "w", w, SnapshotKind::Vorticity, 2.5);
  EXPECT_EQ(fs::file_size(dir / "w.bin"), 8u * 4u * 8u);
  // little-endian float64, ny rows of nx
  std::ifstream bin(dir / "w.bin", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), {});
  const auto phys = w.to_physical_real();
  const std::size_t idx = 2 * 8 + 5;  // row iy = 2, column ix = 5
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[idx * 8 + b];
  double v;
  std::memcpy(&v, &bits, 8);
  EXPECT_EQ(v, phys[idx]);
  const auto back = read_snapshot(side);
  EXPECT_EQ(back.meta.nx, 8);
  EXPECT_EQ(back.meta.ny, 4);
  EXPECT_DOUBLE_EQ(back.meta.alpha, 1.5);
  EXPECT_DOUBLE_EQ(back.meta.time, 2.5);
  EXPECT_LT(norm_l2(back.field - w), 1e-14);
  fs::resize_file(dir / "w.bin", 100);
  EXPECT_THROW(read_snapshot(side), ValidationError);
}

TEST(Io, SeriesCsvRoundTrip) {
  const fs::path dir = scratch("csv");
  TimeSeriesRecord rec({"L2", "pn:8"});
  rec.append(0.0, std::vector<double>{1.0 / 3, 2.0});
  rec.append(0.5, std::vector<double>{0.1, 1e-300});
  write_series_csv(dir / "s.csv", rec);
  const std::string text = read_text_file(dir / "s.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "time,L2,pn:8");
  const auto back = read_series_csv(dir / "s.csv");
  EXPECT_EQ(back.names(), rec.names());
  EXPECT_EQ(back.column("L2"), rec.column("L2"));
  EXPECT_EQ(back.column("pn:8"), rec.column("pn:8"));
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const std::string ok = R"({"grid": {"alpha": 2.0, "nx": 16, "ny": 16},
    "model": {"tag": "LinEulerBar"}, "time": {"dt": 0.05, "t_end": 1.0, "sample_every": 0.5}})";
  const auto cfg = parse_config(ok, ".");
  EXPECT_DOUBLE_EQ(cfg.grid.alpha, 2.0);
  EXPECT_EQ(cfg.model, "LinEulerBar");
  try {
    parse_config(R"({"grid": {"alpah": 2.0}})", ".");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("grid.alpah"), std::string::npos);
  }
  EXPECT_THROW(parse_config(R"({"grid": {"nx": 15}})", "."), ValidationError);
  EXPECT_THROW(parse_config(R"({"model": {"tag": "LinEulerBar", "nu": 0.1}})", "."), ValidationError);
  EXPECT_THROW(parse_config(R"({"initial": {"kind": "snapshot", "path": "missing.json"}})", "."), ValidationError);
  EXPECT_THROW(parse_config("{not json", "."), ValidationError);
}

TEST(Harness, ExitCodes) {
  EXPECT_EQ(exit_code_for(ValidationError("x")), 2);
  EXPECT_EQ(exit_code_for(DomainError("x")), 2);
  EXPECT_EQ(exit_code_for(NumericalError("x")), 3);
  EXPECT_EQ(exit_code_for(CflError("x")), 3);
}

TEST(Harness, SweepIsDeterministicAcrossThreadCounts) {
  auto cfg = parse_config(R"({"grid": {"alpha": 1.5, "nx": 16, "ny": 16},
    "model": {"tag": "LNSBar", "nu_list": [0.2, 0.1, 0.4]}, "time": {"dt": 0.05, "sample_every": 0.5},
    "damping": {"tau": 0.5}})", ".");
  const auto a = run_sweep(cfg, 1), b = run_sweep(cfg, 3);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0].nu, 0.1);
}

TEST(Harness, AmplitudeScanReportsLargestDampedD) {
  auto cfg = parse_config(R"({"grid": {"alpha": 1.5, "nx": 16, "ny": 16},
    "model": {"tag": "NSE", "nu": 0.1}, "initial": {"subspace": "full", "d": 1},
    "time": {"dt": 0.05, "sample_every": 0.5}, "damping": {"tau": 0.5, "d_list": [100, 1], "target": 0.5}})", ".");
  const auto scan = run_amplitude_scan(cfg, 2);
  ASSERT_EQ(scan.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(scan.rows[0].d, 1.0);
  ASSERT_TRUE(scan.largest_d.has_value());
  for (const auto& r : scan.rows) EXPECT_EQ(r.damped, r.status == "ok" && r.report.ratio <= 0.5);
  EXPECT_EQ(amplitude_csv(scan).substr(0, 34), "d,amplitude,ratio,damped,status\n1,");
}

TEST(Cli, SimulateWritesManifestAndOutputs) {
  const fs::path dir = scratch("cli");
  write_text_file(dir / "c.json", R"({"grid": {"alpha": 1.0, "nx": 16, "ny": 16},
    "model": {"tag": "LNSBar", "nu": 0.1}, "time": {"dt": 0.05, "t_end": 0.5, "sample_every": 0.25},
    "probes": ["L2", "innerL"]})");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "c.json").string() + " --out " + (dir / "o").string() +
                    " --seed 3"), 0);
  for (const char* f : {"manifest.json", "series.csv", "final.json", "final.bin"})
    EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
  const std::string manifest = read_text_file(dir / "o" / "manifest.json");
  EXPECT_NE(manifest.find(sha256_file(dir / "o" / "series.csv")), std::string::npos);
  const auto rec = read_series_csv(dir / "o" / "series.csv");
  EXPECT_EQ(rec.size(), 3u);
}

TEST(Cli, ExitCodesForBadInputAndAbort) {
  const fs::path dir = scratch("cli_err");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.json").string()), 2);
  write_text_file(dir / "bad.json", R"({"grid": {"alpha": 1.0, "nx": 16, "ny": 16}, "colour": 1})");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --parallel 0"), 2);
  // dt beyond the CFL limit of the base flow
  write_text_file(dir / "cfl.json", R"({"grid": {"alpha": 1.0, "nx": 32, "ny": 32},
    "model": {"tag": "LinEulerBar"}, "time": {"dt": 1.0, "t_end": 2.0, "sample_every": 1.0}})");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "cfl.json").string() + " --out " + (dir / "c").string()), 3);
  EXPECT_TRUE(fs::exists(dir / "c" / "manifest.json"));
}
