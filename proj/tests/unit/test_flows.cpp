#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kflow/error.hpp"
#include "kflow/flows.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/operators.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

using namespace kflow;
constexpr double pi = std::numbers::pi;

TEST(Profiles, DerivativesMatchFiniteDifferences) {
  for (const Profile& p : {sin_profile(2.0), tanh_profile(0.7), couette_profile(3.0), poiseuille_profile()}) {
    for (double y : {-0.9, 0.1, 0.6, 1.3}) {
      const double h = 1e-4;
      EXPECT_NEAR(p.du(y), (p.u(y + h) - p.u(y - h)) / (2 * h), 1e-6) << p.name;
      EXPECT_NEAR(p.d2u(y), (p.du(y + h) - p.du(y - h)) / (2 * h), 1e-6) << p.name;
      EXPECT_NEAR(p.d3u(y), (p.d2u(y + h) - p.d2u(y - h)) / (2 * h), 1e-6) << p.name;
    }
  }
}

TEST(Profiles, SampledProfilesInterpolate) {
  std::vector<double> per(64);
  for (int j = 0; j < 64; ++j) per[j] = std::sin(2 * pi * j / 64);
  const Profile p = periodic_samples_profile(per, 0.0, 2 * pi);
  EXPECT_NEAR(p.u(1.0), std::sin(1.0), 1e-12);
  EXPECT_NEAR(p.d2u(1.0), -std::sin(1.0), 1e-11);
  std::vector<double> ch(201);
  for (int j = 0; j <= 200; ++j) ch[j] = std::tanh(-3.0 + 6.0 * j / 200);
  const Profile q = channel_samples_profile(ch, -3.0, 3.0);
  EXPECT_NEAR(q.u(0.37), std::tanh(0.37), 1e-7);
  EXPECT_NEAR(q.d2u(0.37), tanh_profile().d2u(0.37), 1e-4);
}

TEST(Flows, InflectionValues) {
  const auto sin_rep = find_inflection_values(sin_profile(), Domain::torus());
  ASSERT_EQ(sin_rep.values.size(), 1u);
  EXPECT_NEAR(sin_rep.values[0], 0.0, 1e-10);
  const auto tanh_rep = find_inflection_values(tanh_profile(), Domain::channel(-4, 4));
  ASSERT_EQ(tanh_rep.points.size(), 1u);
  EXPECT_NEAR(tanh_rep.points[0].y, 0.0, 1e-9);
}

TEST(Flows, Classification) {
  const BaseFlow k = kolmogorov_flow(0.5);
  EXPECT_EQ(k.kind(), FlowKind::KolmogorovBar);
  const BaseFlow s = shear_flow(sin_profile(), Domain::torus());
  EXPECT_EQ(s.kind(), FlowKind::ShearKPlus);
  for (double y : {0.0, 0.5, 2.0, pi}) EXPECT_NEAR(s.kernel(y), 1.0, 1e-12);
  const BaseFlow t = shear_flow(tanh_profile(), Domain::channel(-5, 5));
  EXPECT_EQ(t.kind(), FlowKind::ShearKPlus);
  // K2 = -U''/U = 2 sech^2 y, with the limit 2 at y = 0
  for (double y : {0.0, 0.4, -1.7}) EXPECT_NEAR(t.kernel(y), 2 / std::pow(std::cosh(y), 2), 1e-9);
  // U'' = -2 has no inflection point; with U_s = 2 > max U the kernel is
  // U''/(U - U_s) = 2/(1 + y^2) > 0
  const BaseFlow p = shear_flow(poiseuille_profile(), Domain::channel(-1, 1), 2.0);
  EXPECT_TRUE(p.class_one());
  EXPECT_NEAR(p.kernel(0.5), 2 / 1.25, 1e-12);
  EXPECT_THROW(shear_flow(couette_profile(), Domain::channel(-1, 1)), ClassificationError);
  EXPECT_THROW(dipole_flow(2.0), ValidationError);
}

TEST(Flows, KernelModesOfBarState) {
  // ker L on the non-shear space: |alpha k| = 1, m = 0
  EXPECT_EQ(kolmogorov_flow(1.0).kernel_modes(1.0).size(), 2u);
  EXPECT_EQ(kolmogorov_flow(0.5).kernel_modes(0.5).size(), 2u);
  EXPECT_TRUE(kolmogorov_flow(1.5).kernel_modes(1.5).empty());
}

TEST(Operators, BarEnergyAndJOnModes) {
  const double a = 1.5;
  const TorusGrid g(a, 16, 16);
  const BaseFlow f = kolmogorov_flow(a);
  const auto w = SpectralField::mode(g, 1, 2);
  // L e = (1 - 1/(a^2 + m^2)) e
  const double sym = 1 - 1 / (a * a + 4);
  EXPECT_NEAR(std::abs(apply_L(f, w).at(1, 2) - sym), 0.0, 1e-14);
  // J e = -sin y d_x e = -(i a)(e^{i(m+1)y} - e^{i(m-1)y})/(2i)
  const auto j = apply_J(f, w);
  EXPECT_NEAR(std::abs(j.at(1, 3) - cplx(-a / 2, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(j.at(1, 1) - cplx(a / 2, 0)), 0.0, 1e-14);
}

TEST(Operators, AntiSelfAdjointJ) {
  const TorusGrid g(1.0, 32, 32);
  RandomFieldSpec spec;
  spec.subspace = Subspace::Full;
  spec.seed = 1;
  const auto w = random_field(g, spec);
  spec.seed = 2;
  const auto v = random_field(g, spec);
  for (const BaseFlow& f : {kolmogorov_flow(1.0), dipole_flow(1.0), shear_flow(sin_profile(), Domain::torus())}) {
    EXPECT_NEAR(std::abs(inner(apply_J(f, w), v) + inner(w, apply_J(f, v))), 0.0, 1e-12) << f.description();
    // L is selfadjoint
    EXPECT_NEAR(std::abs(inner(apply_L(f, w), v) - inner(w, apply_L(f, v))), 0.0, 1e-12);
  }
}

TEST(Operators, NormBundle) {
  const TorusGrid g(2.0, 16, 16);
  const auto w = cosine_field(g, {{1, 0, 1.0, 0.0}});
  const NormBundle n = norms(kolmogorov_flow(2.0), w);
  EXPECT_NEAR(n.l2 * n.l2, g.area() / 2, 1e-12);
  EXPECT_NEAR(n.inner_l, 0.75 * g.area() / 2, 1e-12);  // 1 - 1/alpha^2
  ASSERT_TRUE(n.x.has_value());
  EXPECT_NEAR(*n.x, std::sqrt(n.inner_l), 1e-14);
  EXPECT_FALSE(n.indefinite);
  // at alpha = 0.5 the (1, 0) mode has L symbol 1 - 1/0.25 < 0
  const TorusGrid sq(0.5, 16, 16);
  const NormBundle m = norms(kolmogorov_flow(0.5), cosine_field(sq, {{1, 0, 1.0, 0.0}}));
  EXPECT_LT(m.inner_l, 0.0);
  EXPECT_TRUE(m.indefinite);
  EXPECT_FALSE(m.x.has_value());
}

TEST(Operators, IncompatibleFlowRejected) {
  EXPECT_THROW(check_compatible(kolmogorov_flow(1.0), TorusGrid(2.0, 8, 8)), ValidationError);
  EXPECT_THROW(check_compatible(shear_flow(tanh_profile(), Domain::channel(-3, 3)), TorusGrid(1.0, 8, 8)),
               ValidationError);
}

TEST(Operators, X1CoercivityOnNonShearFields) {
  // <(-Lap - 1) w, w> >= min(1, a^2 - 1) (||w||^2 + ||d_y w||^2); with the
  // full H1 norm the sharp constant is (a^2 - 1) / (a^2 + 1)
  const double a = 2.0;
  const TorusGrid g(a, 32, 32);
  RandomFieldSpec spec;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    spec.seed = s;
    const auto w = random_field(g, spec);
    const NormBundle n = norms(kolmogorov_flow(a), w);
    const double yh1 = norm_l2_sq(w) + norm_l2_sq(dy(w));
    EXPECT_GE(n.inner_x1, std::min(1.0, a * a - 1) * yh1 * (1 - 1e-12));
    EXPECT_GE(n.inner_x1, (a * a - 1) / (a * a + 1) * n.h1 * n.h1 * (1 - 1e-12));
  }
  // the (1, 0) mode attains the full-H1 constant
  const NormBundle m = norms(kolmogorov_flow(a), cosine_field(g, {{1, 0, 1.0, 0.0}}));
  EXPECT_NEAR(m.inner_x1 / (m.h1 * m.h1), (a * a - 1) / (a * a + 1), 1e-12);
}
