#pragma once

#include <string>
#include <vector>

#include "kflow/field.hpp"
#include "kflow/flows.hpp"
#include "kflow/series.hpp"

namespace kflow {

/// What a probe needs besides the field: the flow defining the energy form
/// and the viscosity (for the Z-norm weights).
struct ProbeContext {
  BaseFlow flow;
  double nu = 0.0;
};

/// Probe names:
///   L2, H1, grad2, innerL, X, innerX1, X1      norms and forms
///   nonshear, x1nonshear                       ||P!=0 w||, ||(I-P1) P!=0 w||
///   s1, s2, n1, n2, a, b, e                    component decomposition
///   pn:N, pnx1:N                               ||PN w||_X^2 (PN on X, on X1)
///   u2, energy, enstrophy                      ||u||^2, ||u||^2/2, ||w||^2/2
///   u2x1                                       ||u||^2 of (I - P1) w
///   Z                                          weighted norm (needs nu > 0)
/// X and X1 report sign(q) sqrt|q| for the quadratic form q so that an
/// indefinite value stays visible.
void validate_probes(const std::vector<std::string>& probes, const TorusGrid& grid,
                     const ProbeContext& ctx);
std::vector<double> evaluate_probes(const std::vector<std::string>& probes,
                                    const SpectralField& omega, double t,
                                    const ProbeContext& ctx);

struct Snapshot {
  double time = 0.0;
  SpectralField omega;
};

struct DissipationResidual {
  std::vector<double> times;     // interior sample times
  std::vector<double> raw;       // d/dt <Lw,w> + 2 nu (||grad w||^2 - ||w||^2)
  std::vector<double> relative;  // raw / (nu ||w||_{H1}^2), or raw / ||w||_{H1}^2 at nu = 0
  double max_abs_relative() const;
};

/// Centered-difference residual of the energy dissipation identity.
DissipationResidual dissipation_residual(const BaseFlow& flow, double nu,
                                         const std::vector<Snapshot>& snapshots);

/// Running trapezoid average (1/(T - t0)) int_{t0}^T v dt; the first entry is v(t0).
std::vector<double> time_average(const std::vector<double>& times,
                                 const std::vector<double>& values);
/// time_average of column "pn:N" or "pnx1:N".
std::vector<double> rage_average(const TimeSeriesRecord& rec, int n, bool on_x1 = false);
/// time_average of column "u2", or "u2x1" when ker L is nontrivial.
std::vector<double> velocity_damping_average(const TimeSeriesRecord& rec, bool on_x1 = false);

struct ComponentParts {
  SpectralField s1, s2, n1, n2;
};
struct ComponentNorms {
  double s1 = 0.0, s2 = 0.0, n1 = 0.0, n2 = 0.0;
  double a = 0.0, b = 0.0, e = 0.0;  // a = ||s1||, b = ||n1||, e = a + b
};

/// s1 = P2 P0 w, s2 = (I - P2) P0 w, n1 = P1 P!=0 w, n2 = (I - P1) P!=0 w.
/// Where no x-wavenumber has |alpha k| = 1 the n1 part is empty, leaving the
/// two-way shear/non-shear split.
ComponentParts component_parts(const SpectralField& omega);
ComponentNorms component_decomposition(const SpectralField& omega);

/// Weighted H1 norm squared: sum over k != 0 of ||w_k||^2 + sqrt(nu/|k|)
/// ||d_y w_k||^2 + ||C^k w_k||^2 / (sqrt(nu) |k|^{3/2}), C^k = -i k e^{nu t} cos y,
/// with k the physical x-wavenumber.
double z_norm(const SpectralField& omega, double nu, double t);

struct DampingReport {
  double nu = 0.0;
  double tau = 0.0;
  double t_end = 0.0;     // tau / nu
  bool square = false;    // infimum metric with (I - P1)
  double ratio = 0.0;
  double initial_nonshear = 0.0;
  double wall_seconds = 0.0;
};

/// Needs columns "nonshear" (and "x1nonshear" when square) covering [0, tau/nu].
/// Rectangular: ||P!=0 w(tau/nu)|| / ||P!=0 w(0)||. Square: the infimum over
/// samples in [0, tau/nu] of ||(I-P1) P!=0 w(t)|| / ||P!=0 w(0)||.
DampingReport enhanced_damping_metric(const TimeSeriesRecord& rec, double nu, double tau,
                                      bool square);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Least squares of log(values) against t over t >= t_min (default skips [0, 5)).
LinearFit fit_log_linear(const std::vector<double>& times, const std::vector<double>& values,
                         double t_min = 5.0);
/// Least squares of log(y) against log(x).
LinearFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kflow
