#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kflow {

/// A shear profile U(y) with its first three derivatives.
struct Profile {
  std::string name;
  std::function<double(double)> u;
  std::function<double(double)> du;
  std::function<double(double)> d2u;
  std::function<double(double)> d3u;
};

/// amplitude * sin(y).
Profile sin_profile(double amplitude = 1.0);
/// tanh(y / width).
Profile tanh_profile(double width = 1.0);
/// slope * y.
Profile couette_profile(double slope = 1.0);
/// 1 - y^2 (U'' = -2 everywhere).
Profile poiseuille_profile();
/// Periodic samples U(y0 + j*P/n), j < n, interpolated by trigonometric
/// interpolation; derivatives are exact for the interpolant.
Profile periodic_samples_profile(std::vector<double> values, double y0, double period);
/// Uniform samples on [y1, y2] including both endpoints, interpolated by a
/// quintic B-spline.
Profile channel_samples_profile(std::vector<double> values, double y1, double y2);
/// Named built-in: "sinY", "tanh", "couette", "poiseuille" with an optional
/// scale parameter (amplitude, width, slope).
Profile builtin_profile(const std::string& name, double parameter = 1.0);

struct Domain {
  enum class Kind { Torus, Channel };
  Kind kind = Kind::Torus;
  double y1 = 0.0;
  double y2 = 6.283185307179586;

  static Domain torus() { return {}; }
  static Domain channel(double y1, double y2) { return {Kind::Channel, y1, y2}; }
  double length() const { return y2 - y1; }
};

enum class FlowKind { KolmogorovBar, Dipole, ShearNoInflection, ShearKPlus };
std::string to_string(FlowKind kind);

struct InflectionPoint {
  double y = 0.0;
  double value = 0.0;  // U(y)
};

struct InflectionReport {
  std::vector<InflectionPoint> points;
  /// Distinct values U(y*) (merged within 1e-8).
  std::vector<double> values;
  std::vector<std::string> notes;
};

/// Background flow, immutable after construction.
class BaseFlow {
 public:
  FlowKind kind() const { return kind_; }
  const Profile& profile() const { return profile_; }
  const Domain& domain() const { return domain_; }
  double u_s() const { return u_s_; }
  /// x-period parameter fixed by the flow (bar and dipole), if any.
  std::optional<double> alpha() const { return alpha_; }
  bool is_shear() const { return kind_ != FlowKind::Dipole; }
  bool class_one() const { return kind_ == FlowKind::ShearNoInflection; }

  /// K1 = U''/(U-U_s) for class 1, K2 = -U''/(U-U_s) otherwise; the limit
  /// -U'''/U' (resp. U'''/U') is used where U = U_s.
  double kernel(double y) const;
  double min_kernel() const { return kernel_min_; }
  double max_kernel() const { return kernel_max_; }

  /// Fourier modes (k, m), k != 0, spanning ker L inside the non-shear space
  /// (bar state) or the zero-mean space (dipole) on T_alpha.
  std::vector<std::pair<int, int>> kernel_modes(double alpha) const;

  std::string description() const { return description_; }

 private:
  friend BaseFlow kolmogorov_flow(double);
  friend BaseFlow dipole_flow(double);
  friend BaseFlow shear_flow(Profile, Domain, std::optional<double>);

  FlowKind kind_ = FlowKind::KolmogorovBar;
  Profile profile_;
  Domain domain_;
  double u_s_ = 0.0;
  std::optional<double> alpha_;
  double kernel_min_ = 1.0;
  double kernel_max_ = 1.0;
  std::string description_;
};

BaseFlow kolmogorov_flow(double alpha);
/// Dipole omega0 = psi0 = cos x + cos y; only alpha = 1 is accepted.
BaseFlow dipole_flow(double alpha = 1.0);
/// Classifies the profile into class 1 or class K+. With u_s empty the
/// inflection value is chosen automatically when exactly one exists.
BaseFlow shear_flow(Profile profile, Domain domain, std::optional<double> u_s = std::nullopt);

/// Roots of U'' on the domain by sign-change bracketing and bisection (1e-10 in y).
InflectionReport find_inflection_values(const Profile& profile, const Domain& domain);
InflectionReport find_inflection_values(const BaseFlow& flow);

}  // namespace kflow
