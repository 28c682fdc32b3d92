#include "kflow/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kflow/diagnostics.hpp"
#include "kflow/operators.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

namespace kflow {
namespace {

using Tag = EvolutionModel::Tag;

std::vector<cplx> to_phys(const SpectralField& f) { return f.to_physical(); }

SpectralField back_to_spectral(const TorusGrid& g, const std::vector<cplx>& p) {
  SpectralField out = SpectralField::from_physical(g, std::span<const cplx>(p));
  out.dealias();
  out.zero_mean();
  return out;
}

}  // namespace

EvolutionModel EvolutionModel::nse(double nu) { return {Tag::NSE, nu, true, nullptr}; }
EvolutionModel EvolutionModel::lns_bar(double nu) { return {Tag::LNSBar, nu, true, nullptr}; }
EvolutionModel EvolutionModel::lns_approx(double nu) { return {Tag::LNSApprox, nu, true, nullptr}; }
EvolutionModel EvolutionModel::lin_euler_bar() { return {Tag::LinEulerBar, 0.0, false, nullptr}; }
EvolutionModel EvolutionModel::lin_euler_projected() {
  return {Tag::LinEulerProjected, 0.0, false, nullptr};
}
EvolutionModel EvolutionModel::lns_dipole(double nu) { return {Tag::LNSDipole, nu, true, nullptr}; }
EvolutionModel EvolutionModel::lin_euler_shear(BaseFlow flow, double nu) {
  return {Tag::LinEulerShear, nu, false, std::make_shared<const BaseFlow>(std::move(flow))};
}

bool EvolutionModel::is_linear_euler() const {
  return tag == Tag::LinEulerBar || tag == Tag::LinEulerProjected || tag == Tag::LinEulerShear;
}

void EvolutionModel::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ValidationError("model: nu must be >= 0");
  if (is_linear_euler() && time_dependent_factor) {
    throw ValidationError("model: linearized Euler models carry no e^{-nu t} factor");
  }
  if ((tag == Tag::LinEulerBar || tag == Tag::LinEulerProjected) && nu != 0.0) {
    throw ValidationError("model: " + to_string(tag) + " is inviscid (nu = 0)");
  }
  if (tag == Tag::LinEulerShear) {
    if (!flow) throw ValidationError("model: LinEulerShear needs a shear flow");
    if (!flow->is_shear()) throw ValidationError("model: LinEulerShear needs a shear flow");
  }
}

BaseFlow EvolutionModel::energy_flow(double alpha) const {
  switch (tag) {
    case Tag::LNSDipole: return dipole_flow(alpha);
    case Tag::LinEulerShear: return *flow;
    default: return kolmogorov_flow(alpha);
  }
}

std::string to_string(EvolutionModel::Tag tag) {
  switch (tag) {
    case Tag::NSE: return "NSE";
    case Tag::LNSBar: return "LNSBar";
    case Tag::LNSApprox: return "LNSApprox";
    case Tag::LinEulerBar: return "LinEulerBar";
    case Tag::LinEulerProjected: return "LinEulerProjected";
    case Tag::LNSDipole: return "LNSDipole";
    case Tag::LinEulerShear: return "LinEulerShear";
  }
  return "?";
}

EvolutionModel::Tag parse_model_tag(const std::string& s) {
  for (Tag t : {Tag::NSE, Tag::LNSBar, Tag::LNSApprox, Tag::LinEulerBar, Tag::LinEulerProjected,
                Tag::LNSDipole, Tag::LinEulerShear}) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown model tag '" + s + "'");
}

Integrator::Integrator(EvolutionModel model, TorusGrid grid)
    : model_(std::move(model)), grid_(grid) {
  model_.validate();
  if (model_.tag == Tag::LNSDipole && grid_.alpha() != 1.0) {
    throw ValidationError("LNSDipole requires the square torus (alpha = 1)");
  }
  const int ny = grid_.ny();
  sin_rows_.resize(ny);
  for (int iy = 0; iy < ny; ++iy) sin_rows_[iy] = std::sin(grid_.y(iy));
  sin_cols_.resize(grid_.nx());
  for (int ix = 0; ix < grid_.nx(); ++ix) sin_cols_[ix] = std::sin(grid_.x(ix));
  neg_lap_.resize(grid_.size());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < grid_.nx(); ++ix) {
      neg_lap_[static_cast<std::size_t>(iy) * grid_.nx() + ix] = grid_.laplace_symbol(ix, iy);
    }
  }
  double umax = 0.0;
  for (double s : sin_rows_) umax = std::max(umax, std::abs(s));
  base_u_ = umax;
  if (model_.tag == Tag::LNSDipole) {
    double vmax = 0.0;
    for (double s : sin_cols_) vmax = std::max(vmax, std::abs(s));
    base_v_ = vmax;
  }
  if (model_.tag == Tag::LinEulerShear) {
    check_compatible(*model_.flow, grid_);
    const auto& p = model_.flow->profile();
    shear_rows_.resize(ny);
    d2u_rows_.resize(ny);
    double m = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      shear_rows_[iy] = p.u(grid_.y(iy)) - model_.flow->u_s();
      d2u_rows_[iy] = p.d2u(grid_.y(iy));
      m = std::max(m, std::abs(shear_rows_[iy]));
    }
    base_u_ = m;
  }
}

double Integrator::amplitude(double t) const {
  return model_.time_dependent_factor ? std::exp(-model_.nu * t) : 1.0;
}

SpectralField Integrator::advection(const SpectralField& omega, double t) const {
  if (!(omega.grid() == grid_)) throw ValidationError("integrator: grid mismatch");
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const double amp = amplitude(t);
  const SpectralField psi = inverse_neg_laplacian(omega);
  std::vector<cplx> out(grid_.size());

  auto bar_term = [&](const SpectralField& g, double scale) {
    const auto gx = to_phys(dx(g));
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const auto i = static_cast<std::size_t>(iy) * nx + ix;
        out[i] += scale * sin_rows_[iy] * gx[i];
      }
    }
  };

  switch (model_.tag) {
    case Tag::NSE: {
      bar_term(omega - psi, -amp);
      const auto u = to_phys(dy(psi));
      const auto v = to_phys(-dx(psi));
      const auto wx = to_phys(dx(omega));
      const auto wy = to_phys(dy(omega));
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= u[i] * wx[i] + v[i] * wy[i];
      break;
    }
    case Tag::LNSBar:
    case Tag::LinEulerBar:
      bar_term(omega - psi, -amp);
      break;
    case Tag::LNSApprox:
      bar_term(omega, -amp);
      break;
    case Tag::LinEulerProjected: {
      bar_term(omega - psi, 1.0);
      SpectralField s = back_to_spectral(grid_, out);
      return -project_complement(s, ProjectionTag::p1());
    }
    case Tag::LNSDipole: {
      const SpectralField g = omega - psi;
      const auto gx = to_phys(dx(g));
      const auto gy = to_phys(dy(g));
      for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
          const auto i = static_cast<std::size_t>(iy) * nx + ix;
          out[i] = amp * (sin_rows_[iy] * gx[i] - sin_cols_[ix] * gy[i]);
        }
      }
      break;
    }
    case Tag::LinEulerShear: {
      const auto wx = to_phys(dx(omega));
      const auto px = to_phys(dx(psi));
      for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
          const auto i = static_cast<std::size_t>(iy) * nx + ix;
          out[i] = -shear_rows_[iy] * wx[i] - d2u_rows_[iy] * px[i];
        }
      }
      break;
    }
  }
  return back_to_spectral(grid_, out);
}

SpectralField Integrator::rhs(const SpectralField& omega, double t) const {
  SpectralField r = advection(omega, t);
  if (model_.nu > 0.0) {
    for (std::size_t i = 0; i < r.coeffs().size(); ++i) r[i] -= model_.nu * neg_lap_[i] * omega[i];
  }
  return r;
}

double Integrator::cfl_limit(const SpectralField& omega, double t) const {
  const double amp = amplitude(t);
  double umax = amp * base_u_;
  double vmax = amp * base_v_;
  if (model_.tag == Tag::NSE) {
    const SpectralField psi = inverse_neg_laplacian(omega);
    const auto u = to_phys(dy(psi));
    const auto v = to_phys(-dx(psi));
    double pu = 0.0;
    double pv = 0.0;
    for (int iy = 0; iy < grid_.ny(); ++iy) {
      for (int ix = 0; ix < grid_.nx(); ++ix) {
        const auto i = static_cast<std::size_t>(iy) * grid_.nx() + ix;
        pu = std::max(pu, std::abs(amp * sin_rows_[iy] + u[i]));
        pv = std::max(pv, std::abs(v[i]));
      }
    }
    umax = pu;
    vmax = pv;
  }
  const double rate = umax / grid_.dx() + vmax / grid_.dy();
  return rate > 0.0 ? 0.4 / rate : std::numeric_limits<double>::infinity();
}

SimState Integrator::step(const SimState& s, double dt) const {
  if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
  const double limit = cfl_limit(s.omega, s.time);
  if (dt > limit) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " exceeds " << limit << " at t = " << s.time;
    throw CflError(os.str(), s.time);
  }
  const std::size_t n = grid_.size();
  std::vector<double> e_half(n);
  for (std::size_t i = 0; i < n; ++i) e_half[i] = std::exp(-model_.nu * neg_lap_[i] * 0.5 * dt);

  auto scaled = [&](const SpectralField& f) {
    SpectralField out = f;
    for (std::size_t i = 0; i < n; ++i) out[i] *= e_half[i];
    return out;
  };

  const double t = s.time;
  const SpectralField& w = s.omega;
  const SpectralField k1 = advection(w, t);
  SpectralField a = w;
  a.axpy(0.5 * dt, k1);
  const SpectralField k2 = advection(scaled(a), t + 0.5 * dt);
  SpectralField b = scaled(w);
  b.axpy(0.5 * dt, k2);
  const SpectralField k3 = advection(b, t + 0.5 * dt);
  SpectralField c = scaled(scaled(w));
  c.axpy(dt, scaled(k3));
  const SpectralField k4 = advection(c, t + dt);

  SpectralField next(grid_);
  for (std::size_t i = 0; i < n; ++i) {
    const double e1 = e_half[i];
    const double e2 = e1 * e1;
    next[i] = e2 * w[i] + dt / 6.0 * (e2 * k1[i] + 2.0 * e1 * (k2[i] + k3[i]) + k4[i]);
  }
  next.zero_mean();
  return {std::move(next), t + dt, s.model};
}

SpectralField rhs(const SimState& state) {
  return Integrator(state.model, state.omega.grid()).rhs(state.omega, state.time);
}

SimState step(const SimState& state, double dt) {
  return Integrator(state.model, state.omega.grid()).step(state, dt);
}

EvolveResult evolve(const SimState& state, double t_end, const EvolveOptions& opts) {
  if (!(t_end > state.time)) throw ValidationError("evolve: t_end must exceed the start time");
  if (!(opts.dt > 0.0) || !(opts.sample_every > 0.0)) {
    throw ValidationError("evolve: dt and sample_every must be positive");
  }
  const double per = opts.sample_every / opts.dt;
  const long steps_per_sample = std::lround(per);
  if (steps_per_sample < 1 || std::abs(per - steps_per_sample) > 1e-9 * per) {
    throw ValidationError("evolve: sample_every must be an integer multiple of dt");
  }
  const double span = (t_end - state.time) / opts.dt;
  const long total = std::lround(span);
  if (std::abs(span - total) > 1e-9 * span) {
    throw ValidationError("evolve: t_end - t0 must be an integer multiple of dt");
  }

  const Integrator integ(state.model, state.omega.grid());
  const ProbeContext ctx{state.model.energy_flow(state.omega.grid().alpha()), state.model.nu};
  TimeSeriesRecord rec(opts.probes);
  SimState s = state;
  const double t0 = state.time;

  auto sample = [&] {
    if (opts.on_sample) opts.on_sample(s);
    rec.append(s.time, evaluate_probes(opts.probes, s.omega, s.time, ctx));
  };

  sample();
  for (long i = 1; i <= total; ++i) {
    try {
      s = integ.step(s, opts.dt);
    } catch (const NumericalError& e) {
      rec.mark_aborted(e.what());
      throw EvolveAborted(e.what(), s.time, rec);
    }
    s.time = t0 + static_cast<double>(i) * opts.dt;
    if (!std::isfinite(norm_l2_sq(s.omega))) {
      std::ostringstream os;
      os << "non-finite vorticity at t = " << s.time;
      rec.mark_aborted(os.str());
      throw EvolveAborted(os.str(), s.time, rec);
    }
    if (i % steps_per_sample == 0 || i == total) {
      if (opts.post_sample) opts.post_sample(s.omega);
      sample();
    }
  }
  return {std::move(rec), std::move(s)};
}

}  // namespace kflow
