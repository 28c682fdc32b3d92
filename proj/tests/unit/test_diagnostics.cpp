#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kflow/diagnostics.hpp"
#include "kflow/dynamics.hpp"
#include "kflow/error.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

using namespace kflow;
constexpr double pi = std::numbers::pi;

TEST(Diagnostics, ProbeValuesOnSingleModes) {
  const TorusGrid g(2.0, 16, 16);
  const ProbeContext ctx{kolmogorov_flow(2.0), 0.1};
  const auto w = cosine_field(g, {{1, 1, 1.0, 0.0}});
  const double area = g.area();
  const auto v = evaluate_probes({"L2", "grad2", "innerL", "u2", "enstrophy", "nonshear", "s1", "n1"}, w, 0.0, ctx);
  const double lam = 4.0 + 1.0;
  EXPECT_NEAR(v[0], std::sqrt(area / 2), 1e-12);
  EXPECT_NEAR(v[1], lam * area / 2, 1e-12);
  EXPECT_NEAR(v[2], (1 - 1 / lam) * area / 2, 1e-12);
  EXPECT_NEAR(v[3], area / 2 / lam, 1e-12);
  EXPECT_NEAR(v[4], area / 4, 1e-12);
  EXPECT_NEAR(v[5], v[0], 1e-12);
  EXPECT_NEAR(v[6], 0.0, 1e-14);
  EXPECT_THROW(validate_probes({"bogus"}, g, ctx), ValidationError);
  EXPECT_THROW(validate_probes({"Z"}, g, {kolmogorov_flow(2.0), 0.0}), ValidationError);
  EXPECT_THROW(validate_probes({"pn:100000"}, g, ctx), ValidationError);
}

TEST(Diagnostics, ZNormOfSingleMode) {
  // e^{ix}: ||w||^2 = 4pi^2, d_y w = 0, ||C w||^2 = ||cos y||^2 = 2pi^2
  const TorusGrid g(1.0, 16, 16);
  EXPECT_NEAR(z_norm(SpectralField::mode(g, 1, 0), 1.0, 0.0), 6 * pi * pi, 1e-10);
  // e^{i(x + 2y)} at nu = 0.04: 4pi^2 (1 + sqrt(0.04) * 4 + 0.5 / 0.2)
  EXPECT_NEAR(z_norm(SpectralField::mode(g, 1, 2), 0.04, 0.0), 4 * pi * pi * (1 + 0.8 + 2.5), 1e-9);
}

TEST(Diagnostics, DissipationResidualOfExactSolution) {
  const TorusGrid g(1.0, 16, 16);
  const double nu = 0.1;
  // shear data: LNSBar reduces to the heat equation, solved exactly
  std::vector<Snapshot> snaps;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.01 * i;
    snaps.push_back({t, cosine_field(g, {{0, 2, std::exp(-4 * nu * t), 0.0}, {0, 3, std::exp(-9 * nu * t), 0.0}})});
  }
  const auto r = dissipation_residual(kolmogorov_flow(1.0), nu, snaps);
  EXPECT_EQ(r.times.size(), 19u);
  EXPECT_LT(r.max_abs_relative(), 1e-3);
  EXPECT_THROW(dissipation_residual(kolmogorov_flow(1.0), nu, {snaps[0], snaps[1]}), ValidationError);
}

TEST(Diagnostics, TimeAverageAndFits) {
  const std::vector<double> t = {0, 1, 2, 3, 4};
  const auto avg = time_average(t, {2, 2, 2, 2, 2});
  for (double v : avg) EXPECT_DOUBLE_EQ(v, 2.0);
  const auto lin = time_average(t, {0, 1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(lin.back(), 2.0);
  const LinearFit f = fit_line({1, 2, 3}, {3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  std::vector<double> tt, vv;
  for (int i = 0; i < 20; ++i) {
    tt.push_back(i);
    vv.push_back(3 * std::exp(-0.25 * i));
  }
  const LinearFit e = fit_log_linear(tt, vv);
  EXPECT_EQ(e.points, 15u);
  EXPECT_NEAR(e.slope, -0.25, 1e-12);
  EXPECT_NEAR(fit_log_log({1e-2, 1e-3}, {0.1, 0.1 / std::sqrt(10.0)}).slope, 0.5, 1e-12);
}

TEST(Diagnostics, ComponentDecomposition) {
  const TorusGrid g(1.0, 16, 16);
  const auto s1 = cosine_field(g, {{0, 1, 1.0, 0.0}});
  const auto s2 = cosine_field(g, {{0, 3, 0.5, 0.0}});
  const auto n1 = cosine_field(g, {{1, 0, 0.25, 0.0}});
  const auto n2 = cosine_field(g, {{1, 2, 0.125, 0.0}});
  const auto parts = component_parts(s1 + s2 + n1 + n2);
  EXPECT_NEAR(norm_l2(parts.s1 - s1), 0.0, 1e-14);
  EXPECT_NEAR(norm_l2(parts.s2 - s2), 0.0, 1e-14);
  EXPECT_NEAR(norm_l2(parts.n1 - n1), 0.0, 1e-14);
  EXPECT_NEAR(norm_l2(parts.n2 - n2), 0.0, 1e-14);
  const auto c = component_decomposition(s1 + n1);
  EXPECT_NEAR(c.a, norm_l2(s1), 1e-13);
  EXPECT_NEAR(c.b, norm_l2(n1), 1e-13);
  EXPECT_NEAR(c.e, c.a + c.b, 1e-13);
  // with no |alpha k| = 1 the n1 part is empty
  const TorusGrid g2(1.5, 16, 16);
  EXPECT_NEAR(norm_l2(component_parts(cosine_field(g2, {{1, 0, 1.0, 0.0}})).n1), 0.0, 1e-14);
}

TEST(Diagnostics, DampingMetric) {
  TimeSeriesRecord rec({"nonshear", "x1nonshear"});
  rec.append(0.0, std::vector<double>{2.0, 1.5});
  rec.append(5.0, std::vector<double>{1.0, 0.2});
  rec.append(10.0, std::vector<double>{0.5, 0.4});
  const auto r = enhanced_damping_metric(rec, 0.05, 0.5, false);
  EXPECT_DOUBLE_EQ(r.ratio, 0.25);
  EXPECT_DOUBLE_EQ(r.t_end, 10.0);
  const auto s = enhanced_damping_metric(rec, 0.05, 0.5, true);
  EXPECT_DOUBLE_EQ(s.ratio, 0.1);
  EXPECT_THROW(enhanced_damping_metric(rec, 0.01, 0.5, false), ValidationError);
}

TEST(Diagnostics, RageAverageColumns) {
  TimeSeriesRecord rec({"pn:2", "u2"});
  for (int i = 0; i <= 10; ++i) rec.append(0.5 * i, std::vector<double>{3.0, 1.0 / (1 + i)});
  for (double v : rage_average(rec, 2)) EXPECT_DOUBLE_EQ(v, 3.0);
  EXPECT_THROW(rage_average(rec, 3), ValidationError);
  EXPECT_THROW(rage_average(rec, 2, true), ValidationError);
  const auto u = velocity_damping_average(rec);
  EXPECT_LT(u.back(), u[1]);
  EXPECT_THROW(velocity_damping_average(rec, true), ValidationError);
}
