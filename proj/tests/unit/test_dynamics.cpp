#include <cmath>

#include <gtest/gtest.h>

#include "kflow/dynamics.hpp"
#include "kflow/error.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/operators.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

using namespace kflow;

namespace {

// Mode-sum form of -sin y d_x (w - psi), built from the coefficients only.
SpectralField bar_advection_oracle(const SpectralField& w) {
  const TorusGrid& g = w.grid();
  SpectralField out(g);
  const double a = g.alpha();
  auto b = [&](int k, int m) {
    const double lam = a * a * k * k + double(m) * m;
    return lam == 0.0 ? cplx(0) : w.at(k, m) * (1.0 - 1.0 / lam);
  };
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const int k = g.k_of(ix), m = g.m_of(iy);
      if (!g.retained(ix, iy)) continue;
      // sin y e^{imy} = (e^{i(m+1)y} - e^{i(m-1)y}) / (2i)
      const cplx s = (b(k, m - 1) - b(k, m + 1)) / cplx(0, 2);
      out.set(k, m, -cplx(0, a * k) * s);
    }
  }
  return out;
}

SpectralField random_nonshear(const TorusGrid& g, std::uint64_t seed) {
  RandomFieldSpec spec;
  spec.seed = seed;
  return random_field(g, spec);
}

}  // namespace

TEST(Dynamics, BarAdvectionMatchesModeSum) {
  for (double a : {0.5, 1.0, 2.0}) {
    const TorusGrid g(a, 32, 32);
    const auto w = random_nonshear(g, 3);
    const Integrator lin(EvolutionModel::lin_euler_bar(), g);
    const auto ref = bar_advection_oracle(w);
    EXPECT_NEAR(norm_l2(lin.advection(w, 0.0) - ref), 0.0, 1e-12 * norm_l2(ref)) << a;
    // JL with the flow's operators gives the same
    const auto jl = apply_J(kolmogorov_flow(a), apply_L(kolmogorov_flow(a), w));
    EXPECT_NEAR(norm_l2(jl - ref), 0.0, 1e-12 * norm_l2(ref));
  }
}

TEST(Dynamics, ViscousTermAndTimeFactor) {
  const TorusGrid g(1.0, 16, 16);
  const auto w = random_nonshear(g, 4);
  const double nu = 0.1, t = 2.0;
  const Integrator lns(EvolutionModel::lns_bar(nu), g);
  const auto adv = bar_advection_oracle(w);
  auto expect = laplacian(w);
  expect *= nu;
  expect.axpy(std::exp(-nu * t), adv);
  EXPECT_NEAR(norm_l2(lns.rhs(w, t) - expect), 0.0, 1e-12 * norm_l2(expect));
}

TEST(Dynamics, NonlinearTermVanishesOnShearData) {
  const TorusGrid g(1.0, 16, 16);
  const auto w = cosine_field(g, {{0, 2, 0.3, 0.1}, {0, 3, 0.2, 0.0}});
  const Integrator nse(EvolutionModel::nse(0.0), g);
  EXPECT_NEAR(norm_l2(nse.advection(w, 0.0)), 0.0, 1e-13);
}

TEST(Dynamics, HeatDecayOfShearModes) {
  const TorusGrid g(1.0, 16, 16);
  const double nu = 0.05;
  SimState s{cosine_field(g, {{0, 2, 1.0, 0.0}}), 0.0, EvolutionModel::lns_bar(nu)};
  EvolveOptions opts;
  opts.dt = 0.1;
  opts.sample_every = 0.5;
  const auto res = evolve(s, 3.0, opts);
  const auto exact = cosine_field(g, {{0, 2, std::exp(-nu * 4 * 3.0), 0.0}});
  EXPECT_NEAR(norm_l2(res.final_state.omega - exact), 0.0, 1e-13);
  EXPECT_DOUBLE_EQ(res.final_state.time, 3.0);
  EXPECT_EQ(res.record.size(), 7u);
}

TEST(Dynamics, FourthOrderInTime) {
  const TorusGrid g(1.5, 16, 16);
  RandomFieldSpec spec;
  spec.seed = 2;
  spec.subspace = Subspace::Full;
  spec.l2_norm = 2.0;
  const SimState s{random_field(g, spec), 0.0, EvolutionModel::nse(0.02)};
  auto run = [&](double dt) {
    EvolveOptions o;
    o.dt = dt;
    o.sample_every = 1.0;
    return evolve(s, 1.0, o).final_state.omega;
  };
  const auto ref = run(1.0 / 640);
  const double e1 = norm_l2(run(1.0 / 20) - ref), e2 = norm_l2(run(1.0 / 40) - ref);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.4);
}

TEST(Dynamics, CflAndValidation) {
  const TorusGrid g(1.0, 32, 32);
  const Integrator lin(EvolutionModel::lin_euler_bar(), g);
  const auto w = random_nonshear(g, 1);
  // base speed 1 in x only: 0.4 dx
  EXPECT_NEAR(lin.cfl_limit(w, 0.0), 0.4 * g.dx(), 1e-12);
  SimState s{w, 0.0, EvolutionModel::lin_euler_bar()};
  EXPECT_THROW(lin.step(s, 1.0), CflError);
  EvolveOptions o;
  o.dt = 0.03;
  o.sample_every = 0.1;
  EXPECT_THROW(evolve(s, 1.0, o), ValidationError);
  EXPECT_THROW(EvolutionModel::lns_bar(-1.0).validate(), ValidationError);
  EvolutionModel bad = EvolutionModel::lin_euler_bar();
  bad.nu = 0.1;
  EXPECT_THROW(bad.validate(), ValidationError);
  EXPECT_THROW(Integrator(EvolutionModel::lns_dipole(0.1), TorusGrid(2.0, 8, 8)), ValidationError);
}

TEST(Dynamics, ProjectedModelStaysOffP1) {
  const TorusGrid g(1.0, 32, 32);
  RandomFieldSpec spec;
  spec.subspace = Subspace::X1;
  SimState s{random_field(g, spec), 0.0, EvolutionModel::lin_euler_projected()};
  EvolveOptions o;
  o.dt = 0.05;
  o.sample_every = 1.0;
  o.probes = {"n1"};
  const auto res = evolve(s, 5.0, o);
  for (double v : res.record.column("n1")) EXPECT_LT(v, 1e-13);
}

TEST(Dynamics, AbortCarriesPartialRecord) {
  const TorusGrid g(1.0, 16, 16);
  RandomFieldSpec spec;
  spec.subspace = Subspace::Full;
  spec.l2_norm = 1e3;
  SimState s{random_field(g, spec), 0.0, EvolutionModel::nse(1e-3)};
  EvolveOptions o;
  o.dt = 0.05;
  o.sample_every = 0.05;
  o.probes = {"L2"};
  try {
    evolve(s, 10.0, o);
    FAIL() << "expected abort";
  } catch (const EvolveAborted& e) {
    EXPECT_TRUE(e.partial().aborted());
    EXPECT_GE(e.partial().size(), 1u);
    EXPECT_GE(e.time(), 0.0);
  }
}

TEST(Dynamics, ModelTagsRoundTrip) {
  for (auto tag : {EvolutionModel::Tag::NSE, EvolutionModel::Tag::LNSBar, EvolutionModel::Tag::LNSApprox,
                   EvolutionModel::Tag::LinEulerBar, EvolutionModel::Tag::LinEulerProjected,
                   EvolutionModel::Tag::LNSDipole, EvolutionModel::Tag::LinEulerShear})
    EXPECT_EQ(parse_model_tag(to_string(tag)), tag);
  EXPECT_THROW(parse_model_tag("Euler"), ValidationError);
}
