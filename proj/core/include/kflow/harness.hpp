#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kflow/diagnostics.hpp"
#include "kflow/dynamics.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/stability.hpp"

namespace kflow {

struct GridSpec {
  double alpha = 1.0;
  int nx = 64;
  int ny = 64;
};

struct FlowSpec {
  std::string kind = "kolmogorov";  // kolmogorov | dipole | shear
  std::string profile = "sinY";     // built-in name, ignored when csv is set
  double parameter = 1.0;
  std::filesystem::path csv;        // two columns (y, U), optional header
  std::string domain = "torus";     // torus | channel
  double y1 = 0.0;
  double y2 = 6.283185307179586;
  std::optional<double> u_s;
};

struct InitialSpec {
  std::string kind = "random";  // random | cosine | snapshot
  RandomFieldSpec random;
  std::vector<CosineTerm> terms;
  std::filesystem::path path;   // snapshot sidecar
  /// Applied after construction: none | nonshear | shear | x1 | center.
  std::string project = "none";
  /// If set, rescale so ||(I - P2) w(0)|| = d * nu.
  std::optional<double> d;
};

struct TimeSpec {
  double dt = 1e-2;
  double t_end = 1.0;
  double sample_every = 0.1;
};

struct StabilitySpec {
  std::vector<double> alphas;
  int l_max = 3;
  int n = 128;
  int cross_check_n = 0;  // 0 disables the second resolution
};

struct RageSpec {
  int n = 8;
  bool on_x1 = false;
  std::vector<double> report_times = {10.0};
};

struct DampingSpec {
  double tau = 0.5;
  bool square = false;
  /// Amplitude scan: values of d for ||(I - P2) w(0)|| = d * nu at the fixed
  /// model.nu; a run counts as damped when it completes with ratio <= target.
  std::vector<double> d_list;
  double target = 0.5;
};

struct ExperimentConfig {
  std::string kind;  // simulate | sweep | stability | rage | damping (optional)
  GridSpec grid;
  std::string model = "LNSBar";
  double nu = 0.0;
  std::vector<double> nu_list;
  FlowSpec flow;
  InitialSpec initial;
  TimeSpec time;
  std::vector<std::string> probes;
  StabilitySpec stability;
  RageSpec rage;
  DampingSpec damping;
  double snapshot_every = 0.0;  // 0: final snapshot only
  std::filesystem::path output_dir = "out";
  /// Canonical JSON of the resolved config (recorded in the manifest).
  std::string resolved_json;
};

/// Parses and validates; errors are ValidationError naming the offending key.
/// Relative paths resolve against base_dir and must exist.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

BaseFlow make_flow(const FlowSpec& spec, double alpha);
EvolutionModel make_model(const ExperimentConfig& cfg, const BaseFlow& flow, double nu);
SpectralField make_initial(const ExperimentConfig& cfg, const TorusGrid& grid,
                           const BaseFlow& flow, double nu);

struct SweepRow {
  double nu = 0.0;
  std::string status = "ok";  // ok | aborted | failed
  std::string message;
  DampingReport report;
};

/// One damping run at viscosity nu (t_end = tau / nu).
DampingReport run_damping(const ExperimentConfig& cfg, double nu, TimeSeriesRecord* series = nullptr);
/// Runs every nu of cfg.nu_list on up to `parallel` threads; rows ordered by nu.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int parallel);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct AmplitudeRow {
  double d = 0.0;
  std::string status = "ok";
  std::string message;
  bool damped = false;
  DampingReport report;
};

struct AmplitudeScan {
  double nu = 0.0;
  double target = 0.5;
  std::vector<AmplitudeRow> rows;  // ascending d
  std::optional<double> largest_d;  // largest damped d
};

/// Runs every d of cfg.damping.d_list at cfg.nu on up to `parallel` threads.
AmplitudeScan run_amplitude_scan(const ExperimentConfig& cfg, int parallel);
std::string amplitude_csv(const AmplitudeScan& scan);

/// Index reports for every alpha of cfg.stability, computed on up to
/// `parallel` threads; order follows the alpha list.
std::vector<IndexReport> run_stability(const ExperimentConfig& cfg, int parallel);
std::string index_reports_json(const std::vector<IndexReport>& reports);
/// Columns l, alpha, n_neg, k_ul, max_Re_lambda.
std::string index_reports_csv(const std::vector<IndexReport>& reports);

struct RunOptions {
  std::string subcommand;               // overrides/validates cfg.kind
  std::optional<std::filesystem::path> out;
  int parallel = 1;
  std::optional<std::uint64_t> seed;
};

/// Executes the experiment and writes its artifacts plus manifest.json.
/// Throws ValidationError / DomainError for bad input and NumericalError
/// (after writing partial output) for aborted runs.
void run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log);

/// Exit code for an exception: 2 validation, 3 numerical, 1 otherwise.
int exit_code_for(const std::exception& e);

std::string version();

}  // namespace kflow
