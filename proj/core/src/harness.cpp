#include "kflow/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kflow/error.hpp"
#include "kflow/io.hpp"
#include "kflow/operators.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

#ifndef KFLOW_VERSION
#define KFLOW_VERSION "dev"
#endif

namespace kflow {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Strict reader over one JSON object: typed lookups with dotted key names in
// every message, and unknown keys rejected at the end.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config key '" + where() + "': expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  template <class T>
  T get(const std::string& k, T fallback) {
    used_.insert(k);
    if (!j_.contains(k)) return fallback;
    return convert<T>(k);
  }

  template <class T>
  T require(const std::string& k) {
    used_.insert(k);
    if (!j_.contains(k)) throw ValidationError("config key '" + key(k) + "' is required");
    return convert<T>(k);
  }

  Section sub(const std::string& k) {
    used_.insert(k);
    static const json empty = json::object();
    return Section(j_.contains(k) ? j_.at(k) : empty, key(k));
  }

  const json& raw(const std::string& k) {
    used_.insert(k);
    return j_.at(k);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ValidationError("config key '" + key(k) + "' is not recognized");
    }
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  template <class T>
  T convert(const std::string& k) const {
    try {
      return j_.at(k).get<T>();
    } catch (const json::exception&) {
      throw ValidationError("config key '" + key(k) + "' has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ValidationError("config key '" + key + "': " + msg);
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class Fn>
void parallel_for(std::size_t n, int parallel, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, parallel), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (workers <= 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
}

Profile profile_from_csv(const fs::path& path, const Domain& domain) {
  std::istringstream is(read_text_file(path));
  std::vector<double> ys, us;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double y = 0.0, u = 0.0;
    if (!(ls >> y >> u)) {
      if (ys.empty()) continue;  // header row
      throw ValidationError("profile csv " + path.string() + ": malformed row '" + line + "'");
    }
    ys.push_back(y);
    us.push_back(u);
  }
  if (ys.size() < 8) throw ValidationError("profile csv " + path.string() + ": need >= 8 samples");
  const double h = ys[1] - ys[0];
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if (std::abs((ys[i] - ys[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw ValidationError("profile csv " + path.string() + ": samples must be uniformly spaced");
    }
  }
  if (domain.kind == Domain::Kind::Torus) {
    return periodic_samples_profile(us, ys.front(), domain.length());
  }
  return channel_samples_profile(us, ys.front(), ys.back());
}

/// Integer step plan: dt and cadence adjusted down so both divide t_end.
struct StepPlan {
  double dt;
  double sample_every;
};

StepPlan plan_steps(double t_end, double dt, double sample_every) {
  const double steps = std::ceil(t_end / dt - 1e-9);
  const double dt2 = t_end / steps;
  const double per = std::max(1.0, std::round(sample_every / dt2));
  const double samples = std::ceil(steps / per - 1e-9);
  // keep sample count integral by adjusting the step count
  const double steps2 = samples * per;
  const double dt3 = t_end / steps2;
  return {dt3, per * dt3};
}

json index_report_to_json(const IndexReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"l", row.l},
                    {"n_neg", row.n_neg},
                    {"n_zero", row.n_zero},
                    {"n_neg_Ll", row.n_neg_Ll},
                    {"k_ul", row.k_ul},
                    {"max_Re_lambda", row.max_re_lambda},
                    {"match", row.match}});
  }
  return {{"flow", r.flow},       {"alpha", r.alpha},         {"n", r.n},
          {"eps_unstable", r.eps_unstable}, {"rows", rows}, {"k_u", r.k_u},
          {"n_neg_L", r.n_neg_L}, {"k_r", r.k_r},             {"k_c", r.k_c},
          {"k_i_le0", r.k_i_le0}, {"k_0_le0", r.k_0_le0},
          {"identity_holds", r.identity_holds}, {"all_match", r.all_match}};
}

json damping_to_json(const DampingReport& r) {
  return {{"nu", r.nu},         {"tau", r.tau},     {"t_end", r.t_end},
          {"square", r.square}, {"ratio", r.ratio}, {"initial_nonshear", r.initial_nonshear},
          {"wall_seconds", r.wall_seconds}};
}

// Resolved parameters of the run, defaults included.
json run_block(const ExperimentConfig& cfg, const std::string& subcommand) {
  json r;
  r["model"] = cfg.model;
  r["alpha"] = cfg.grid.alpha;
  r["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}};
  r["flow"] = cfg.flow.kind == "shear" ? cfg.flow.kind + ":" + cfg.flow.profile : cfg.flow.kind;
  if (subcommand == "sweep" && cfg.damping.d_list.empty()) {
    r["nu"] = cfg.nu_list;
  } else {
    r["nu"] = cfg.nu;
  }
  r["dt"] = cfg.time.dt;
  if (subcommand == "sweep" || subcommand == "damping") {
    r["t_end"] = "tau/nu";
    r["tau"] = cfg.damping.tau;
  } else {
    r["t_end"] = cfg.time.t_end;
  }
  r["sample_every"] = cfg.time.sample_every;
  r["seed"] = cfg.initial.random.seed;
  json ic = {{"kind", cfg.initial.kind}, {"project", cfg.initial.project}};
  if (cfg.initial.kind == "random") {
    ic["subspace"] = to_string(cfg.initial.random.subspace);
    ic["k0"] = cfg.initial.random.k0;
    ic["l2_norm"] = cfg.initial.random.l2_norm;
    if (cfg.initial.random.subspace == Subspace::PN || cfg.initial.random.subspace == Subspace::PNX1) {
      ic["pn"] = cfg.initial.random.pn;
    }
  } else if (cfg.initial.kind == "snapshot") {
    ic["path"] = cfg.initial.path.string();
  } else {
    ic["terms"] = cfg.initial.terms.size();
  }
  if (cfg.initial.d) ic["d"] = *cfg.initial.d;
  r["initial"] = ic;
  r["probes"] = cfg.probes;
  return r;
}

class Manifest {
 public:
  Manifest(const ExperimentConfig& cfg, const RunOptions& opts, fs::path out)
      : out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
    j_["tool"] = "kflow";
    j_["version"] = version();
    j_["subcommand"] = opts.subcommand;
    j_["config"] = json::parse(cfg.resolved_json);
    j_["seed"] = cfg.initial.random.seed;
    j_["parallel"] = opts.parallel;
    j_["run"] = run_block(cfg, opts.subcommand);
    j_["outputs"] = json::object();
  }

  void output(const std::string& name) { j_["outputs"][name] = sha256_file(out_ / name); }
  void set(const std::string& k, json v) { j_[k] = std::move(v); }

  void write(const std::string& status, const std::string& message = "") {
    j_["status"] = status;
    if (!message.empty()) j_["message"] = message;
    j_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text_file(out_ / "manifest.json", j_.dump(2) + "\n");
  }

 private:
  fs::path out_;
  json j_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> with_probes(std::vector<std::string> probes,
                                     const std::vector<std::string>& extra) {
  for (const auto& p : extra) {
    if (std::find(probes.begin(), probes.end(), p) == probes.end()) probes.push_back(p);
  }
  return probes;
}

}  // namespace

std::string version() { return KFLOW_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  return 1;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(root, "");
  cfg.kind = top.get<std::string>("kind", "");
  if (!cfg.kind.empty()) {
    static const std::set<std::string> kinds = {"simulate", "sweep", "stability", "rage", "damping"};
    check(kinds.count(cfg.kind) > 0, "kind", "must be simulate|sweep|stability|rage|damping");
  }

  {
    Section g = top.sub("grid");
    cfg.grid.alpha = g.get<double>("alpha", cfg.grid.alpha);
    cfg.grid.nx = g.get<int>("nx", cfg.grid.nx);
    cfg.grid.ny = g.get<int>("ny", cfg.grid.ny);
    check(cfg.grid.alpha > 0.0, g.key("alpha"), "must be positive");
    check(cfg.grid.nx >= 4 && cfg.grid.nx % 2 == 0, g.key("nx"), "must be even and >= 4");
    check(cfg.grid.ny >= 4 && cfg.grid.ny % 2 == 0, g.key("ny"), "must be even and >= 4");
    g.finish();
  }
  {
    Section m = top.sub("model");
    cfg.model = m.get<std::string>("tag", cfg.model);
    try {
      parse_model_tag(cfg.model);
    } catch (const ValidationError& e) {
      check(false, m.key("tag"), e.what());
    }
    cfg.nu = m.get<double>("nu", cfg.nu);
    check(cfg.nu >= 0.0 && std::isfinite(cfg.nu), m.key("nu"), "must be >= 0");
    cfg.nu_list = m.get<std::vector<double>>("nu_list", {});
    for (double v : cfg.nu_list) check(v > 0.0, m.key("nu_list"), "entries must be positive");
    m.finish();
  }
  {
    Section f = top.sub("flow");
    cfg.flow.kind = f.get<std::string>("kind", cfg.flow.kind);
    check(cfg.flow.kind == "kolmogorov" || cfg.flow.kind == "dipole" || cfg.flow.kind == "shear",
          f.key("kind"), "must be kolmogorov|dipole|shear");
    cfg.flow.profile = f.get<std::string>("profile", cfg.flow.profile);
    cfg.flow.parameter = f.get<double>("parameter", cfg.flow.parameter);
    const std::string csv = f.get<std::string>("csv", "");
    if (!csv.empty()) {
      cfg.flow.csv = resolve(base_dir, csv);
      check(fs::exists(cfg.flow.csv), f.key("csv"), "file '" + cfg.flow.csv.string() + "' does not exist");
    }
    cfg.flow.domain = f.get<std::string>("domain", cfg.flow.domain);
    check(cfg.flow.domain == "torus" || cfg.flow.domain == "channel", f.key("domain"),
          "must be torus|channel");
    if (cfg.flow.domain == "channel") {
      const auto ys = f.require<std::vector<double>>("interval");
      check(ys.size() == 2 && ys[1] > ys[0], f.key("interval"), "must be [y1, y2] with y1 < y2");
      cfg.flow.y1 = ys[0];
      cfg.flow.y2 = ys[1];
    }
    if (f.has("u_s")) cfg.flow.u_s = f.get<double>("u_s", 0.0);
    f.finish();
  }
  {
    Section i = top.sub("initial");
    cfg.initial.kind = i.get<std::string>("kind", cfg.initial.kind);
    check(cfg.initial.kind == "random" || cfg.initial.kind == "cosine" ||
              cfg.initial.kind == "snapshot",
          i.key("kind"), "must be random|cosine|snapshot");
    auto& r = cfg.initial.random;
    r.seed = i.get<std::uint64_t>("seed", r.seed);
    r.k0 = i.get<double>("k0", r.k0);
    check(r.k0 > 0.0, i.key("k0"), "must be positive");
    const std::string sub = i.get<std::string>("subspace", to_string(r.subspace));
    try {
      r.subspace = parse_subspace(sub);
    } catch (const ValidationError& e) {
      check(false, i.key("subspace"), e.what());
    }
    r.pn = i.get<int>("pn", r.pn);
    r.l2_norm = i.get<double>("l2_norm", r.l2_norm);
    if (i.has("terms")) {
      const json& terms = i.raw("terms");
      check(terms.is_array(), i.key("terms"), "must be an array");
      for (std::size_t t = 0; t < terms.size(); ++t) {
        Section ts(terms[t], i.key("terms") + "[" + std::to_string(t) + "]");
        CosineTerm term;
        term.k = ts.get<int>("k", 0);
        term.m = ts.get<int>("m", 0);
        term.amplitude = ts.get<double>("amplitude", 1.0);
        term.phase = ts.get<double>("phase", 0.0);
        ts.finish();
        cfg.initial.terms.push_back(term);
      }
    }
    if (cfg.initial.kind == "cosine") {
      check(!cfg.initial.terms.empty(), i.key("terms"), "cosine data needs at least one term");
    }
    const std::string path = i.get<std::string>("path", "");
    if (cfg.initial.kind == "snapshot") {
      check(!path.empty(), i.key("path"), "snapshot data needs a sidecar path");
      cfg.initial.path = resolve(base_dir, path);
      check(fs::exists(cfg.initial.path), i.key("path"),
            "file '" + cfg.initial.path.string() + "' does not exist");
    }
    cfg.initial.project = i.get<std::string>("project", cfg.initial.project);
    static const std::set<std::string> projections = {"none", "nonshear", "shear", "x1", "center"};
    check(projections.count(cfg.initial.project) > 0, i.key("project"),
          "must be none|nonshear|shear|x1|center");
    if (i.has("d")) {
      cfg.initial.d = i.get<double>("d", 0.0);
      check(*cfg.initial.d > 0.0, i.key("d"), "must be positive");
    }
    i.finish();
  }
  {
    Section t = top.sub("time");
    cfg.time.dt = t.get<double>("dt", cfg.time.dt);
    cfg.time.t_end = t.get<double>("t_end", cfg.time.t_end);
    cfg.time.sample_every = t.get<double>("sample_every", cfg.time.sample_every);
    check(cfg.time.dt > 0.0, t.key("dt"), "must be positive");
    check(cfg.time.t_end > 0.0, t.key("t_end"), "must be positive");
    check(cfg.time.sample_every >= cfg.time.dt, t.key("sample_every"), "must be >= dt");
    t.finish();
  }
  cfg.probes = top.get<std::vector<std::string>>("probes", {"L2", "innerL"});
  {
    Section s = top.sub("stability");
    cfg.stability.alphas = s.get<std::vector<double>>("alphas", {});
    for (double a : cfg.stability.alphas) check(a > 0.0, s.key("alphas"), "entries must be positive");
    cfg.stability.l_max = s.get<int>("l_max", cfg.stability.l_max);
    cfg.stability.n = s.get<int>("n", cfg.stability.n);
    cfg.stability.cross_check_n = s.get<int>("cross_check_n", 0);
    check(cfg.stability.l_max >= 1, s.key("l_max"), "must be >= 1");
    check(cfg.stability.n >= 16 && cfg.stability.n % 2 == 0, s.key("n"), "must be even and >= 16");
    check(cfg.stability.cross_check_n == 0 ||
              (cfg.stability.cross_check_n >= 16 && cfg.stability.cross_check_n % 2 == 0),
          s.key("cross_check_n"), "must be 0 or even and >= 16");
    s.finish();
  }
  {
    Section r = top.sub("rage");
    cfg.rage.n = r.get<int>("N", cfg.rage.n);
    cfg.rage.on_x1 = r.get<bool>("on_x1", cfg.rage.on_x1);
    cfg.rage.report_times = r.get<std::vector<double>>("report_times", cfg.rage.report_times);
    check(cfg.rage.n >= 1, r.key("N"), "must be >= 1");
    r.finish();
  }
  {
    Section d = top.sub("damping");
    cfg.damping.tau = d.get<double>("tau", cfg.damping.tau);
    cfg.damping.square = d.get<bool>("square", cfg.damping.square);
    check(cfg.damping.tau > 0.0, d.key("tau"), "must be positive");
    cfg.damping.d_list = d.get<std::vector<double>>("d_list", {});
    for (double v : cfg.damping.d_list) check(v > 0.0, d.key("d_list"), "entries must be positive");
    cfg.damping.target = d.get<double>("target", cfg.damping.target);
    check(cfg.damping.target > 0.0, d.key("target"), "must be positive");
    d.finish();
  }
  cfg.snapshot_every = top.get<double>("snapshot_every", 0.0);
  check(cfg.snapshot_every >= 0.0, "snapshot_every", "must be >= 0");
  cfg.output_dir = top.get<std::string>("output_dir", "out");
  top.finish();

  // Cross-field checks that need the constructed objects.
  const TorusGrid grid(cfg.grid.alpha, cfg.grid.nx, cfg.grid.ny);
  try {
    const BaseFlow flow = make_flow(cfg.flow, cfg.grid.alpha);
    const EvolutionModel model = make_model(cfg, flow, cfg.nu_list.empty() ? cfg.nu : cfg.nu_list[0]);
    if (model.tag != EvolutionModel::Tag::LinEulerShear && flow.kind() == FlowKind::Dipole &&
        model.tag != EvolutionModel::Tag::LNSDipole) {
      check(false, "model.tag", "the dipole flow pairs with LNSDipole only");
    }
    validate_probes(cfg.probes, grid, ProbeContext{model.energy_flow(grid.alpha()), model.nu});
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("config key", 0) == 0) throw;
    throw ValidationError("config: " + what);
  }
  if (cfg.damping.square) check(cfg.grid.alpha == 1.0, "damping.square", "needs grid.alpha = 1");

  json resolved = root;
  resolved["initial"]["seed"] = cfg.initial.random.seed;
  cfg.resolved_json = resolved.dump();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("config file '" + path.string() + "' does not exist");
  return parse_config(read_text_file(path), path.parent_path());
}

BaseFlow make_flow(const FlowSpec& spec, double alpha) {
  if (spec.kind == "kolmogorov") return kolmogorov_flow(alpha);
  if (spec.kind == "dipole") return dipole_flow(alpha);
  const Domain domain = spec.domain == "torus" ? Domain::torus() : Domain::channel(spec.y1, spec.y2);
  Profile p = spec.csv.empty() ? builtin_profile(spec.profile, spec.parameter)
                               : profile_from_csv(spec.csv, domain);
  return shear_flow(std::move(p), domain, spec.u_s);
}

EvolutionModel make_model(const ExperimentConfig& cfg, const BaseFlow& flow, double nu) {
  using Tag = EvolutionModel::Tag;
  const Tag tag = parse_model_tag(cfg.model);
  if ((tag == Tag::LinEulerBar || tag == Tag::LinEulerProjected) && nu != 0.0) {
    throw ValidationError("config key 'model.nu': " + cfg.model + " is inviscid, nu must be 0");
  }
  switch (tag) {
    case Tag::NSE: return EvolutionModel::nse(nu);
    case Tag::LNSBar: return EvolutionModel::lns_bar(nu);
    case Tag::LNSApprox: return EvolutionModel::lns_approx(nu);
    case Tag::LinEulerBar: return EvolutionModel::lin_euler_bar();
    case Tag::LinEulerProjected: return EvolutionModel::lin_euler_projected();
    case Tag::LNSDipole: return EvolutionModel::lns_dipole(nu);
    case Tag::LinEulerShear: return EvolutionModel::lin_euler_shear(flow, nu);
  }
  throw ValidationError("unknown model");
}

SpectralField make_initial(const ExperimentConfig& cfg, const TorusGrid& grid,
                           const BaseFlow& flow, double nu) {
  SpectralField w(grid);
  if (cfg.initial.kind == "random") {
    w = random_field(grid, cfg.initial.random);
  } else if (cfg.initial.kind == "cosine") {
    w = cosine_field(grid, cfg.initial.terms);
  } else {
    LoadedSnapshot s = read_snapshot(cfg.initial.path);
    if (!(s.field.grid() == grid)) {
      throw ValidationError("initial snapshot grid does not match config grid");
    }
    w = s.meta.kind == SnapshotKind::Vorticity ? s.field : -laplacian(s.field);
    w.zero_mean();
  }
  const std::string& p = cfg.initial.project;
  if (p == "nonshear") {
    w = project(w, ProjectionTag::non_shear());
  } else if (p == "shear") {
    w = project(w, ProjectionTag::shear());
  } else if (p == "x1") {
    w = project_complement(project(w, ProjectionTag::non_shear()), ProjectionTag::p1());
  } else if (p == "center") {
    w = CenterSpaceProjection(flow, grid).apply(w);
  }
  if (cfg.initial.d) {
    const double n = norm_l2(project_complement(w, ProjectionTag::p2()));
    if (!(n > 0.0)) throw ValidationError("initial.d: (I - P2) w(0) is zero");
    w *= (*cfg.initial.d * nu) / n;
  }
  return w;
}

DampingReport run_damping(const ExperimentConfig& cfg, double nu, TimeSeriesRecord* series) {
  const auto start = std::chrono::steady_clock::now();
  const TorusGrid grid(cfg.grid.alpha, cfg.grid.nx, cfg.grid.ny);
  const BaseFlow flow = make_flow(cfg.flow, cfg.grid.alpha);
  const EvolutionModel model = make_model(cfg, flow, nu);
  if (!(nu > 0.0)) throw ValidationError("damping: nu must be positive");
  const double t_end = cfg.damping.tau / nu;
  const StepPlan plan = plan_steps(t_end, cfg.time.dt, cfg.time.sample_every);
  EvolveOptions opts;
  opts.dt = plan.dt;
  opts.sample_every = plan.sample_every;
  opts.probes = with_probes(cfg.probes, {"nonshear", "x1nonshear"});
  SimState s{make_initial(cfg, grid, flow, nu), 0.0, model};
  EvolveResult res = evolve(s, t_end, opts);
  DampingReport rep = enhanced_damping_metric(res.record, nu, cfg.damping.tau, cfg.damping.square);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (series) *series = std::move(res.record);
  return rep;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int parallel) {
  if (parallel < 1) throw ValidationError("sweep: parallelism must be >= 1");
  std::vector<double> nus = cfg.nu_list;
  std::sort(nus.begin(), nus.end());
  std::vector<SweepRow> rows(nus.size());
  parallel_for(nus.size(), parallel, [&](std::size_t i) {
    rows[i].nu = nus[i];
    try {
      rows[i].report = run_damping(cfg, nus[i]);
    } catch (const NumericalError& e) {
      rows[i].status = "aborted";
      rows[i].message = e.what();
    } catch (const std::exception& e) {
      rows[i].status = "failed";
      rows[i].message = e.what();
    }
    rows[i].report.nu = nus[i];
  });
  return rows;
}

AmplitudeScan run_amplitude_scan(const ExperimentConfig& cfg, int parallel) {
  if (parallel < 1) throw ValidationError("sweep: parallelism must be >= 1");
  AmplitudeScan scan;
  scan.nu = cfg.nu;
  scan.target = cfg.damping.target;
  std::vector<double> ds = cfg.damping.d_list;
  std::sort(ds.begin(), ds.end());
  scan.rows.resize(ds.size());
  parallel_for(ds.size(), parallel, [&](std::size_t i) {
    AmplitudeRow& row = scan.rows[i];
    row.d = ds[i];
    ExperimentConfig c = cfg;
    c.initial.d = ds[i];
    try {
      row.report = run_damping(c, cfg.nu);
      row.damped = row.report.ratio <= cfg.damping.target;
    } catch (const NumericalError& e) {
      row.status = "aborted";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "failed";
      row.message = e.what();
    }
    row.report.nu = cfg.nu;
  });
  for (const auto& r : scan.rows) {
    if (r.damped) scan.largest_d = r.d;
  }
  return scan;
}

std::string amplitude_csv(const AmplitudeScan& scan) {
  std::ostringstream os;
  os << "d,amplitude,ratio,damped,status\n";
  for (const auto& r : scan.rows) {
    os << fmt17(r.d) << ',' << fmt17(r.d * scan.nu) << ',' << fmt17(r.report.ratio) << ','
       << (r.damped ? 1 : 0) << ',' << r.status << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "nu,tau,t_end,ratio,initial_nonshear,status\n";
  for (const auto& r : rows) {
    os << fmt17(r.nu) << ',' << fmt17(r.report.tau) << ',' << fmt17(r.report.t_end) << ','
       << fmt17(r.report.ratio) << ',' << fmt17(r.report.initial_nonshear) << ',' << r.status
       << '\n';
  }
  return os.str();
}

std::vector<IndexReport> run_stability(const ExperimentConfig& cfg, int parallel) {
  const BaseFlow flow = make_flow(cfg.flow, cfg.grid.alpha);
  const auto& alphas = cfg.stability.alphas;
  std::vector<IndexReport> reps(alphas.size());
  std::vector<std::string> errors(alphas.size());
  parallel_for(alphas.size(), parallel, [&](std::size_t i) {
    try {
      const BaseFlow f = flow.kind() == FlowKind::KolmogorovBar ? kolmogorov_flow(alphas[i]) : flow;
      reps[i] = index_check(f, alphas[i], cfg.stability.l_max, cfg.stability.n);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw DomainError("stability at alpha = " + fmt17(alphas[i]) + ": " + errors[i]);
  }
  return reps;
}

std::string index_reports_json(const std::vector<IndexReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(index_report_to_json(r));
  return arr.dump(2) + "\n";
}

std::string index_reports_csv(const std::vector<IndexReport>& reports) {
  std::ostringstream os;
  os << "l,alpha,n_neg,k_ul,max_Re_lambda\n";
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      os << row.l << ',' << fmt17(r.alpha) << ',' << row.n_neg << ',' << row.k_ul << ','
         << fmt17(row.max_re_lambda) << '\n';
    }
  }
  return os.str();
}

void run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log) {
  std::string kind = opts.subcommand.empty() ? cfg.kind : opts.subcommand;
  if (kind.empty()) throw ValidationError("config key 'kind' is required when no subcommand is given");
  if (!cfg.kind.empty() && !opts.subcommand.empty() && cfg.kind != opts.subcommand) {
    throw ValidationError("config key 'kind': '" + cfg.kind + "' does not match subcommand '" +
                          opts.subcommand + "'");
  }
  if (opts.parallel < 1) throw ValidationError("--parallel must be >= 1");
  if (opts.seed) {
    cfg.initial.random.seed = *opts.seed;
    json resolved = json::parse(cfg.resolved_json);
    resolved["initial"]["seed"] = *opts.seed;
    cfg.resolved_json = resolved.dump();
  }
  const fs::path out = opts.out ? *opts.out : cfg.output_dir;
  fs::create_directories(out);
  RunOptions ro = opts;
  ro.subcommand = kind;
  Manifest manifest(cfg, ro, out);

  const TorusGrid grid(cfg.grid.alpha, cfg.grid.nx, cfg.grid.ny);
  const BaseFlow flow = make_flow(cfg.flow, cfg.grid.alpha);

  if (kind == "stability") {
    if (cfg.stability.alphas.empty()) throw ValidationError("config key 'stability.alphas' is empty");
    const auto reps = run_stability(cfg, opts.parallel);
    write_text_file(out / "stability.json", index_reports_json(reps));
    write_text_file(out / "stability.csv", index_reports_csv(reps));
    manifest.output("stability.json");
    manifest.output("stability.csv");
    bool ok = true;
    for (const auto& r : reps) ok = ok && r.all_match;
    if (cfg.stability.cross_check_n > 0) {
      ExperimentConfig c2 = cfg;
      c2.stability.n = cfg.stability.cross_check_n;
      const auto reps2 = run_stability(c2, opts.parallel);
      write_text_file(out / "stability_cross_check.json", index_reports_json(reps2));
      manifest.output("stability_cross_check.json");
      for (std::size_t i = 0; i < reps.size(); ++i) {
        for (std::size_t l = 0; l < reps[i].rows.size(); ++l) {
          ok = ok && reps[i].rows[l].k_ul == reps2[i].rows[l].k_ul &&
               reps[i].rows[l].n_neg == reps2[i].rows[l].n_neg;
        }
      }
    }
    manifest.set("index_formula_holds", ok);
    manifest.write("ok");
    log << "stability: " << reps.size() << " alpha values, index formula "
        << (ok ? "holds" : "FAILS") << "\n";
    return;
  }

  if (kind == "sweep" && !cfg.damping.d_list.empty()) {
    const AmplitudeScan scan = run_amplitude_scan(cfg, opts.parallel);
    write_text_file(out / "amplitude.csv", amplitude_csv(scan));
    manifest.output("amplitude.csv");
    json j;
    j["nu"] = scan.nu;
    j["target"] = scan.target;
    j["largest_d"] = scan.largest_d ? json(*scan.largest_d) : json(nullptr);
    j["largest_amplitude"] = scan.largest_d ? json(*scan.largest_d * scan.nu) : json(nullptr);
    manifest.set("amplitude_scan", j);
    manifest.write("ok");
    log << "sweep: " << scan.rows.size() << " amplitudes, largest damped d = "
        << (scan.largest_d ? std::to_string(*scan.largest_d) : std::string("none")) << "\n";
    return;
  }

  if (kind == "sweep") {
    const auto rows = run_sweep(cfg, opts.parallel);
    write_text_file(out / "sweep.csv", sweep_csv(rows));
    manifest.output("sweep.csv");
    json runs = json::array();
    for (const auto& r : rows) {
      json jr = damping_to_json(r.report);
      jr["status"] = r.status;
      if (!r.message.empty()) jr["message"] = r.message;
      runs.push_back(jr);
    }
    manifest.set("runs", runs);
    manifest.write("ok");
    log << "sweep: " << rows.size() << " runs\n";
    return;
  }

  if (kind == "damping") {
    const double nu = cfg.nu;
    TimeSeriesRecord series;
    DampingReport rep;
    try {
      rep = run_damping(cfg, nu, &series);
    } catch (const EvolveAborted& e) {
      write_series_csv(out / "series.csv", e.partial());
      manifest.output("series.csv");
      manifest.write("aborted", e.what());
      throw;
    }
    write_series_csv(out / "series.csv", series);
    write_text_file(out / "damping.json", damping_to_json(rep).dump(2) + "\n");
    manifest.output("series.csv");
    manifest.output("damping.json");
    manifest.write("ok");
    log << "damping: nu = " << nu << " ratio = " << rep.ratio << "\n";
    return;
  }

  if (kind != "simulate" && kind != "rage") throw ValidationError("unknown subcommand '" + kind + "'");

  const EvolutionModel model = make_model(cfg, flow, cfg.nu);
  EvolveOptions eo;
  eo.dt = cfg.time.dt;
  eo.sample_every = cfg.time.sample_every;
  eo.probes = cfg.probes;
  std::string pn_col;
  if (kind == "rage") {
    if (!model.is_linear_euler()) {
      throw ValidationError("config key 'model.tag': rage needs a linearized Euler model");
    }
    pn_col = (cfg.rage.on_x1 ? "pnx1:" : "pn:") + std::to_string(cfg.rage.n);
    eo.probes = with_probes(eo.probes, {pn_col});
  }
  validate_probes(eo.probes, grid, ProbeContext{model.energy_flow(grid.alpha()), model.nu});
  std::vector<std::string> snaps;
  if (cfg.snapshot_every > 0.0) {
    const double per = cfg.snapshot_every / cfg.time.sample_every;
    if (std::abs(per - std::round(per)) > 1e-9 * per || per < 1.0) {
      throw ValidationError("config key 'snapshot_every': must be a multiple of time.sample_every");
    }
    const long every = std::lround(per);
    long count = 0;
    eo.on_sample = [&, every](const SimState& s) {
      if (count++ % every != 0) return;
      std::ostringstream name;
      name << "snapshot_" << std::setw(6) << std::setfill('0') << snaps.size();
      write_snapshot(out / name.str(), s.omega, SnapshotKind::Vorticity, s.time);
      snaps.push_back(name.str());
    };
  }
  SimState s{make_initial(cfg, grid, flow, cfg.nu), 0.0, model};
  std::optional<EvolveResult> result;
  try {
    result = evolve(s, cfg.time.t_end, eo);
  } catch (const EvolveAborted& e) {
    write_series_csv(out / "series.csv", e.partial());
    manifest.output("series.csv");
    manifest.write("aborted", e.what());
    throw;
  }
  const EvolveResult& res = *result;
  write_series_csv(out / "series.csv", res.record);
  manifest.output("series.csv");
  write_snapshot(out / "final", res.final_state.omega, SnapshotKind::Vorticity,
                 res.final_state.time);
  manifest.output("final.json");
  manifest.output("final.bin");
  for (const auto& n : snaps) {
    manifest.output(n + ".json");
    manifest.output(n + ".bin");
  }
  if (kind == "rage") {
    const auto avg = time_average(res.record.times(), res.record.column(pn_col));
    TimeSeriesRecord table({"A"});
    for (std::size_t i = 0; i < avg.size(); ++i) table.append(res.record.times()[i], std::vector<double>{avg[i]});
    write_series_csv(out / "rage.csv", table);
    manifest.output("rage.csv");
    json summary = {{"N", cfg.rage.n}, {"on_x1", cfg.rage.on_x1}, {"T_end", res.record.times().back()},
                    {"A_end", avg.back()}};
    json at = json::object();
    for (double t : cfg.rage.report_times) {
      const auto& ts = res.record.times();
      const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9);
      if (it == ts.end()) continue;
      const double a = avg[static_cast<std::size_t>(it - ts.begin())];
      at[fmt17(t)] = a;
      if (a > 0.0) summary["ratio_end_over_" + fmt17(t)] = avg.back() / a;
    }
    summary["A_at"] = at;
    write_text_file(out / "rage.json", summary.dump(2) + "\n");
    manifest.output("rage.json");
  }
  manifest.write("ok");
  log << kind << ": " << res.record.size() << " samples to t = " << res.final_state.time << "\n";
}

}  // namespace kflow
