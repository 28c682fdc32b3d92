#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kflow/error.hpp"
#include "kflow/field.hpp"
#include "kflow/flows.hpp"
#include "kflow/series.hpp"

namespace kflow {

/// Which evolution equation a step applies. omega is always the perturbation
/// vorticity about the (decaying) base state.
struct EvolutionModel {
  enum class Tag {
    NSE,                // nonlinear perturbation of e^{-nu t} sin y
    LNSBar,             // nu Lap w - e^{-nu t} sin y d_x (1 + Lap^{-1}) w
    LNSApprox,          // nu Lap w - e^{-nu t} sin y d_x w
    LinEulerBar,        // -sin y d_x (1 + Lap^{-1}) w
    LinEulerProjected,  // -(I - P1) sin y d_x (1 + Lap^{-1}) w
    LNSDipole,          // nu Lap w + e^{-nu t} (sin y d_x - sin x d_y)(1 + Lap^{-1}) w
    LinEulerShear,      // -(U - U_s) d_x w - U'' d_x psi
  };

  Tag tag = Tag::LNSBar;
  double nu = 0.0;
  /// Whether e^{-nu t} multiplies the base-flow advection.
  bool time_dependent_factor = true;
  /// Required for LinEulerShear.
  std::shared_ptr<const BaseFlow> flow;

  static EvolutionModel nse(double nu);
  static EvolutionModel lns_bar(double nu);
  static EvolutionModel lns_approx(double nu);
  static EvolutionModel lin_euler_bar();
  static EvolutionModel lin_euler_projected();
  static EvolutionModel lns_dipole(double nu);
  static EvolutionModel lin_euler_shear(BaseFlow flow, double nu = 0.0);

  bool is_linear_euler() const;
  /// Throws ValidationError on an inconsistent combination.
  void validate() const;
  /// The flow whose L and J the model uses (bar, dipole, or the shear flow).
  BaseFlow energy_flow(double alpha) const;
};

std::string to_string(EvolutionModel::Tag tag);
EvolutionModel::Tag parse_model_tag(const std::string& s);

struct SimState {
  SpectralField omega;
  double time = 0.0;
  EvolutionModel model;
};

/// Precomputed per-grid data for one model; rhs/step are const and reentrant.
class Integrator {
 public:
  Integrator(EvolutionModel model, TorusGrid grid);

  const EvolutionModel& model() const { return model_; }
  const TorusGrid& grid() const { return grid_; }

  /// Full time derivative including the viscous term.
  SpectralField rhs(const SpectralField& omega, double t) const;
  /// Advection (non-viscous) part only.
  SpectralField advection(const SpectralField& omega, double t) const;
  /// Largest dt allowed by 0.4 / (max|u|/dx + max|v|/dy) for the total
  /// advecting velocity at time t.
  double cfl_limit(const SpectralField& omega, double t) const;
  /// One integrating-factor RK4 step; throws CflError when dt exceeds the limit.
  SimState step(const SimState& s, double dt) const;

 private:
  double amplitude(double t) const;

  EvolutionModel model_;
  TorusGrid grid_;
  std::vector<double> sin_rows_;
  std::vector<double> shear_rows_;  // U - U_s
  std::vector<double> d2u_rows_;    // U''
  std::vector<double> neg_lap_;     // kx^2 + ky^2 per mode
  std::vector<double> sin_cols_;    // sin x per column (dipole)
  double base_u_ = 0.0;
  double base_v_ = 0.0;
};

SpectralField rhs(const SimState& state);
SimState step(const SimState& state, double dt);

/// Thrown by evolve on a numerical failure; carries the partial record.
class EvolveAborted : public NumericalError {
 public:
  EvolveAborted(const std::string& what, double t, TimeSeriesRecord partial)
      : NumericalError(what, t), partial_(std::move(partial)) {}
  const TimeSeriesRecord& partial() const { return partial_; }

 private:
  TimeSeriesRecord partial_;
};

struct EvolveOptions {
  double dt = 1e-2;
  double sample_every = 0.1;
  std::vector<std::string> probes;
  /// Called with every sampled state (including t0), e.g. to keep snapshots.
  std::function<void(const SimState&)> on_sample;
  /// Applied to omega after every sample, e.g. a re-projection.
  std::function<void(SpectralField&)> post_sample;
};

struct EvolveResult {
  TimeSeriesRecord record;
  SimState final_state;
};

/// Steps from state.time to t_end, sampling probes every sample_every
/// (an integer multiple of dt).
EvolveResult evolve(const SimState& state, double t_end, const EvolveOptions& opts);

}  // namespace kflow
