#include "kflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kflow/error.hpp"

namespace kflow {
namespace {

constexpr int kScanPoints = 4096;

std::vector<double> scan_points(const Domain& d) {
  std::vector<double> ys;
  ys.reserve(kScanPoints + 1);
  if (d.kind == Domain::Kind::Torus) {
    for (int i = 0; i < kScanPoints; ++i) ys.push_back(d.y1 + d.length() * i / kScanPoints);
  } else {
    for (int i = 0; i <= kScanPoints; ++i) ys.push_back(d.y1 + d.length() * i / kScanPoints);
  }
  return ys;
}

double bisect(const std::function<double(double)>& f, double a, double b, double fa) {
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

/// Roots of f on the domain (periodic wrap for a torus).
std::vector<double> roots(const std::function<double(double)>& f, const Domain& d) {
  const auto ys = scan_points(d);
  std::vector<double> fs(ys.size());
  std::transform(ys.begin(), ys.end(), fs.begin(), f);
  std::vector<double> out;
  const std::size_t n = ys.size();
  const std::size_t segments = d.kind == Domain::Kind::Torus ? n : n - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const std::size_t j = (i + 1) % n;
    const double a = ys[i];
    const double b = j == 0 ? d.y2 : ys[j];
    if (fs[i] == 0.0) {
      out.push_back(a);
    } else if (fs[j] != 0.0 && (fs[i] < 0) != (fs[j] < 0)) {
      out.push_back(bisect(f, a, b, fs[i]));
    }
  }
  if (d.kind == Domain::Kind::Channel && fs.back() == 0.0) out.push_back(ys.back());
  return out;
}

std::vector<double> distinct(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > tol) out.push_back(x);
  }
  return out;
}

double profile_scale(const Profile& p, const Domain& d) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double y : scan_points(d)) {
    lo = std::min(lo, p.u(y));
    hi = std::max(hi, p.u(y));
  }
  return std::max(hi - lo, 1e-300);
}

}  // namespace

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::KolmogorovBar: return "KolmogorovBar";
    case FlowKind::Dipole: return "Dipole";
    case FlowKind::ShearNoInflection: return "ShearNoInflection";
    case FlowKind::ShearKPlus: return "ShearKPlus";
  }
  return "?";
}

double BaseFlow::kernel(double y) const {
  if (kind_ == FlowKind::KolmogorovBar || kind_ == FlowKind::Dipole) return 1.0;
  const double sign = class_one() ? 1.0 : -1.0;
  const double du = profile_.u(y) - u_s_;
  if (std::abs(du) <= 1e-8 * (1.0 + std::abs(u_s_))) {
    return sign * profile_.d3u(y) / profile_.du(y);
  }
  return sign * profile_.d2u(y) / du;
}

std::vector<std::pair<int, int>> BaseFlow::kernel_modes(double alpha) const {
  std::vector<std::pair<int, int>> modes;
  if (kind_ == FlowKind::Dipole) {
    return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  }
  if (kind_ != FlowKind::KolmogorovBar) return modes;
  // alpha^2 k^2 + m^2 = 1 with k != 0 forces m = 0, alpha |k| = 1.
  const double k = 1.0 / alpha;
  const double kr = std::round(k);
  if (kr >= 1.0 && std::abs(k - kr) < 1e-12) {
    modes.emplace_back(static_cast<int>(kr), 0);
    modes.emplace_back(-static_cast<int>(kr), 0);
  }
  return modes;
}

BaseFlow kolmogorov_flow(double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("kolmogorov_flow: alpha must be positive");
  BaseFlow f;
  f.kind_ = FlowKind::KolmogorovBar;
  f.profile_ = sin_profile();
  f.domain_ = Domain::torus();
  f.u_s_ = 0.0;
  f.alpha_ = alpha;
  std::ostringstream os;
  os << "Kolmogorov bar sin y, alpha=" << alpha
     << (alpha >= 1.0 ? " (linearly stable regime)" : " (unstable regime: alpha < 1)");
  f.description_ = os.str();
  return f;
}

BaseFlow dipole_flow(double alpha) {
  if (alpha != 1.0) throw ValidationError("dipole_flow: requires the square torus (alpha = 1)");
  BaseFlow f;
  f.kind_ = FlowKind::Dipole;
  f.profile_ = sin_profile();
  f.domain_ = Domain::torus();
  f.alpha_ = 1.0;
  f.description_ = "dipole psi0 = cos x + cos y";
  return f;
}

InflectionReport find_inflection_values(const Profile& profile, const Domain& domain) {
  InflectionReport rep;
  for (double y : roots(profile.d2u, domain)) rep.points.push_back({y, profile.u(y)});
  std::vector<double> vals;
  for (const auto& p : rep.points) vals.push_back(p.value);
  rep.values = distinct(vals, 1e-8 * (1.0 + profile_scale(profile, domain)));
  if (rep.values.size() > 1) rep.notes.push_back("multiple inflection values");
  return rep;
}

InflectionReport find_inflection_values(const BaseFlow& flow) {
  if (flow.kind() == FlowKind::Dipole) {
    throw ValidationError("find_inflection_values: requires a shear flow");
  }
  return find_inflection_values(flow.profile(), flow.domain());
}

BaseFlow shear_flow(Profile profile, Domain domain, std::optional<double> u_s) {
  if (!(domain.length() > 0.0)) throw ValidationError("shear_flow: empty domain");
  const auto ys = scan_points(domain);
  double d2max = 0.0;
  double umin = std::numeric_limits<double>::infinity();
  double umax = -umin;
  for (double y : ys) {
    d2max = std::max(d2max, std::abs(profile.d2u(y)));
    umin = std::min(umin, profile.u(y));
    umax = std::max(umax, profile.u(y));
  }
  const double range = umax - umin;
  if (d2max <= 1e-12 * std::max(1.0, range)) {
    throw ClassificationError("shear_flow: U'' vanishes identically; the kernel K is zero, "
                              "neither class 1 nor K+");
  }

  BaseFlow f;
  f.profile_ = profile;
  f.domain_ = domain;
  const auto infl = find_inflection_values(profile, domain);

  if (infl.points.empty()) {
    f.kind_ = FlowKind::ShearNoInflection;
    const bool convex = profile.d2u(ys.front()) > 0.0;
    const double pad = std::max(1.0, range);
    f.u_s_ = u_s.value_or(convex ? umin - pad : umax + pad);
    if (convex ? !(f.u_s_ < umin) : !(f.u_s_ > umax)) {
      throw ClassificationError("shear_flow: class 1 needs U_s outside the range of U");
    }
  } else {
    f.kind_ = FlowKind::ShearKPlus;
    if (u_s) {
      f.u_s_ = *u_s;
    } else if (infl.values.size() == 1) {
      f.u_s_ = infl.values.front();
    } else {
      throw ValidationError("shear_flow: several inflection values; U_s must be given explicitly");
    }
    for (double y : roots([&](double t) { return profile.u(t) - f.u_s_; }, domain)) {
      if (std::abs(profile.du(y)) < 1e-10) {
        throw DomainError("shear_flow: degenerate profile, U' = 0 where U = U_s at y = " +
                          std::to_string(y));
      }
    }
  }

  double kmin = std::numeric_limits<double>::infinity();
  double kmax = -kmin;
  for (double y : ys) {
    const double k = f.kernel(y);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  if (!std::isfinite(kmin) || !std::isfinite(kmax) || kmax > 1e10) {
    throw ClassificationError("shear_flow: kernel K is unbounded, neither class 1 nor K+");
  }
  if (!(kmin > 0.0)) {
    throw ClassificationError("shear_flow: kernel K changes sign (min " + std::to_string(kmin) +
                              "), neither class 1 nor K+");
  }
  f.kernel_min_ = kmin;
  f.kernel_max_ = kmax;
  std::ostringstream os;
  os << profile.name << " " << to_string(f.kind_) << " U_s=" << f.u_s_ << " K in [" << kmin
     << ", " << kmax << "]";
  f.description_ = os.str();
  return f;
}

}  // namespace kflow
