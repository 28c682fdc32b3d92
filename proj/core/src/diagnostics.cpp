#include "kflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kflow/error.hpp"
#include "kflow/operators.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

namespace kflow {
namespace {

double signed_root(double q) { return q >= 0.0 ? std::sqrt(q) : -std::sqrt(-q); }

struct PnProbe {
  bool ok = false;
  bool x1 = false;
  int n = 0;
};

PnProbe parse_pn(const std::string& p) {
  for (const auto& [prefix, x1] : {std::pair{std::string("pn:"), false},
                                   std::pair{std::string("pnx1:"), true}}) {
    if (p.rfind(prefix, 0) != 0) continue;
    try {
      std::size_t used = 0;
      const int n = std::stoi(p.substr(prefix.size()), &used);
      if (used == p.size() - prefix.size()) return {true, x1, n};
    } catch (const std::exception&) {
    }
  }
  return {};
}

const std::vector<std::string>& plain_probes() {
  static const std::vector<std::string> names = {
      "L2", "H1", "grad2", "innerL", "X", "innerX1", "X1", "nonshear", "x1nonshear",
      "s1", "s2", "n1", "n2", "a", "b", "e", "u2", "u2x1", "energy", "enstrophy", "Z"};
  return names;
}

double velocity_sq(const SpectralField& omega) {
  // ||u||^2 = <psi, omega> = area sum |w|^2 / lambda
  return inner(inverse_neg_laplacian(omega), omega).real();
}

}  // namespace

void validate_probes(const std::vector<std::string>& probes, const TorusGrid& grid,
                     const ProbeContext& ctx) {
  for (const auto& p : probes) {
    if (std::find(plain_probes().begin(), plain_probes().end(), p) != plain_probes().end()) {
      if (p == "Z" && !(ctx.nu > 0.0)) {
        throw ValidationError("probe 'Z' needs nu > 0");
      }
      continue;
    }
    const PnProbe pn = parse_pn(p);
    if (!pn.ok) throw ValidationError("unknown probe '" + p + "'");
    pn_modes(grid, pn.n, pn.x1);  // range check
  }
}

std::vector<double> evaluate_probes(const std::vector<std::string>& probes,
                                    const SpectralField& omega, double t,
                                    const ProbeContext& ctx) {
  std::vector<double> out;
  out.reserve(probes.size());
  std::optional<NormBundle> nb;
  std::optional<ComponentNorms> cn;
  auto bundle = [&]() -> const NormBundle& {
    if (!nb) nb = norms(ctx.flow, omega);
    return *nb;
  };
  auto comps = [&]() -> const ComponentNorms& {
    if (!cn) cn = component_decomposition(omega);
    return *cn;
  };
  for (const auto& p : probes) {
    double v = 0.0;
    if (p == "L2") v = bundle().l2;
    else if (p == "H1") v = bundle().h1;
    else if (p == "grad2") v = norm_grad_sq(omega);
    else if (p == "innerL") v = bundle().inner_l;
    else if (p == "X") v = signed_root(bundle().inner_l);
    else if (p == "innerX1") v = bundle().inner_x1;
    else if (p == "X1") v = signed_root(bundle().inner_x1);
    else if (p == "nonshear") v = norm_l2(project(omega, ProjectionTag::non_shear()));
    else if (p == "x1nonshear") {
      v = norm_l2(project_complement(project(omega, ProjectionTag::non_shear()),
                                     ProjectionTag::p1()));
    } else if (p == "s1") v = comps().s1;
    else if (p == "s2") v = comps().s2;
    else if (p == "n1") v = comps().n1;
    else if (p == "n2") v = comps().n2;
    else if (p == "a") v = comps().a;
    else if (p == "b") v = comps().b;
    else if (p == "e") v = comps().e;
    else if (p == "u2") v = velocity_sq(omega);
    else if (p == "u2x1") v = velocity_sq(project_complement(omega, ProjectionTag::p1()));
    else if (p == "energy") v = 0.5 * velocity_sq(omega);
    else if (p == "enstrophy") v = 0.5 * norm_l2_sq(omega);
    else if (p == "Z") v = z_norm(omega, ctx.nu, t);
    else {
      const PnProbe pn = parse_pn(p);
      if (!pn.ok) throw ValidationError("unknown probe '" + p + "'");
      const auto tag = pn.x1 ? ProjectionTag::pn_x1(pn.n) : ProjectionTag::pn(pn.n);
      const SpectralField w = project(omega, tag);
      v = inner(apply_L(ctx.flow, w), w).real();
    }
    out.push_back(v);
  }
  return out;
}

double DissipationResidual::max_abs_relative() const {
  double m = 0.0;
  for (double r : relative) m = std::max(m, std::abs(r));
  return m;
}

DissipationResidual dissipation_residual(const BaseFlow& flow, double nu,
                                         const std::vector<Snapshot>& snaps) {
  if (snaps.size() < 3) throw ValidationError("dissipation residual: need at least 3 snapshots");
  const std::size_t n = snaps.size();
  std::vector<double> energy(n), dissipation(n), h1(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(snaps[i].time > snaps[i - 1].time)) {
      throw ValidationError("dissipation residual: snapshot times must increase");
    }
    const auto& w = snaps[i].omega;
    energy[i] = inner(apply_L(flow, w), w).real();
    const double l2 = norm_l2_sq(w);
    const double g2 = norm_grad_sq(w);
    dissipation[i] = 2.0 * nu * (g2 - l2);
    h1[i] = l2 + g2;
  }
  DissipationResidual r;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dedt = (energy[i + 1] - energy[i - 1]) / (snaps[i + 1].time - snaps[i - 1].time);
    const double raw = dedt + dissipation[i];
    const double scale = (nu > 0.0 ? nu : 1.0) * h1[i];
    r.times.push_back(snaps[i].time);
    r.raw.push_back(raw);
    r.relative.push_back(scale > 0.0 ? raw / scale : 0.0);
  }
  return r;
}

std::vector<double> time_average(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw ValidationError("time average: length mismatch");
  std::vector<double> out(t.size());
  if (t.empty()) return out;
  out[0] = v[0];
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    integral += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    out[i] = integral / (t[i] - t[0]);
  }
  return out;
}

std::vector<double> rage_average(const TimeSeriesRecord& rec, int n, bool on_x1) {
  if (n < 1) throw ValidationError("rage average: N must be >= 1");
  const std::string col = (on_x1 ? "pnx1:" : "pn:") + std::to_string(n);
  if (!rec.has_column(col)) throw ValidationError("rage average: series lacks column '" + col + "'");
  return time_average(rec.times(), rec.column(col));
}

std::vector<double> velocity_damping_average(const TimeSeriesRecord& rec, bool on_x1) {
  const std::string col = on_x1 ? "u2x1" : "u2";
  if (!rec.has_column(col)) throw ValidationError("velocity average: series lacks column '" + col + "'");
  return time_average(rec.times(), rec.column(col));
}

ComponentParts component_parts(const SpectralField& omega) {
  const SpectralField shear = project(omega, ProjectionTag::shear());
  const SpectralField nonshear = omega - shear;
  SpectralField s1 = project(shear, ProjectionTag::p2());
  SpectralField s2 = shear - s1;
  SpectralField n1 = project(nonshear, ProjectionTag::p1());
  SpectralField n2 = nonshear - n1;
  return {std::move(s1), std::move(s2), std::move(n1), std::move(n2)};
}

ComponentNorms component_decomposition(const SpectralField& omega) {
  const ComponentParts p = component_parts(omega);
  ComponentNorms c;
  c.s1 = norm_l2(p.s1);
  c.s2 = norm_l2(p.s2);
  c.n1 = norm_l2(p.n1);
  c.n2 = norm_l2(p.n2);
  c.a = c.s1;
  c.b = c.n1;
  c.e = c.a + c.b;
  return c;
}

double z_norm(const SpectralField& omega, double nu, double t) {
  if (!(nu > 0.0)) throw ValidationError("Z-norm: weights undefined for nu = 0");
  const TorusGrid& g = omega.grid();
  const double growth = std::exp(nu * t);
  const double sqrt_nu = std::sqrt(nu);
  double total = 0.0;
  for (int ix = 0; ix < g.nx(); ++ix) {
    const int k = g.k_of(ix);
    if (k == 0) continue;
    const double kk = std::abs(g.kx(ix));
    double l2 = 0.0;
    double dy2 = 0.0;
    double c2 = 0.0;
    for (int iy = 0; iy < g.ny(); ++iy) {
      const int m = g.m_of(iy);
      const cplx w = omega.at(k, m);
      l2 += std::norm(w);
      dy2 += double(m) * m * std::norm(w);
      // cos y w_k has coefficient (w(m-1) + w(m+1)) / 2 at m
      const cplx cw = 0.5 * (omega.at(k, m - 1) + omega.at(k, m + 1));
      c2 += std::norm(cw);
    }
    // modes m = +/- ny/2 shifted out of the grid range by cos y
    for (int m : {-g.ny() / 2 - 1, g.ny() / 2}) {
      const cplx cw = 0.5 * (omega.at(k, m - 1) + omega.at(k, m + 1));
      c2 += std::norm(cw);
    }
    c2 *= kk * kk * growth * growth;
    total += l2 + std::sqrt(nu / kk) * dy2 + c2 / (sqrt_nu * std::pow(kk, 1.5));
  }
  return g.area() * total;
}

DampingReport enhanced_damping_metric(const TimeSeriesRecord& rec, double nu, double tau,
                                      bool square) {
  if (!(nu > 0.0) || !(tau > 0.0)) throw ValidationError("damping metric: nu and tau must be positive");
  if (!rec.has_column("nonshear")) throw ValidationError("damping metric: series lacks 'nonshear'");
  if (square && !rec.has_column("x1nonshear")) {
    throw ValidationError("damping metric: series lacks 'x1nonshear'");
  }
  const auto& t = rec.times();
  const double t_end = tau / nu;
  if (t.empty() || t.back() < t_end * (1.0 - 1e-12)) {
    throw ValidationError("damping metric: run shorter than tau/nu = " + std::to_string(t_end));
  }
  const auto& ns = rec.column("nonshear");
  DampingReport r;
  r.nu = nu;
  r.tau = tau;
  r.t_end = t_end;
  r.square = square;
  r.initial_nonshear = ns.front();
  if (!(ns.front() > 0.0)) throw ValidationError("damping metric: initial non-shear norm is zero");
  if (!square) {
    std::size_t i = 0;
    while (i + 1 < t.size() && t[i] < t_end * (1.0 - 1e-12)) ++i;
    r.ratio = ns[i] / ns.front();
    return r;
  }
  const auto& x1 = rec.column("x1nonshear");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size() && t[i] <= t_end * (1.0 + 1e-12); ++i) {
    best = std::min(best, x1[i] / ns.front());
  }
  r.ratio = best;
  return r;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("fit: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.points = x.size();
  return f;
}

LinearFit fit_log_linear(const std::vector<double>& times, const std::vector<double>& values,
                         double t_min) {
  if (times.size() != values.size()) throw ValidationError("fit: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    if (!(values[i] > 0.0)) throw ValidationError("fit: log of a non-positive value");
    x.push_back(times[i]);
    y.push_back(std::log(values[i]));
  }
  return fit_line(x, y);
}

LinearFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("fit: log of a non-positive value");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace kflow
