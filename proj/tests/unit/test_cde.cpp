#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "patchflow/cde.hpp"
#include "patchflow/ellipse_oracle.hpp"

using namespace patchflow;

namespace {

Contour wobbly(std::size_t n) {
  return make_radial_contour([](double s) { return 1 + 0.1 * std::cos(3 * s + 0.4) + 0.05 * std::sin(2 * s); }, n);
}

}  // namespace

TEST(Rhs, DiscCauchyIsConjugate) {
  const auto c = make_ellipse_contour(1, 1, 0, 512);
  const auto v = rhs(c, KernelSpec::cauchy());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(v[i].x, c[i].x, 2e-3);
    EXPECT_NEAR(v[i].y, -c[i].y, 2e-3);
  }
}

TEST(Rhs, DiscEulerIsTangentialHalfSpeed) {
  const auto c = make_ellipse_contour(1, 1, 0, 512);
  const auto k = KernelSpec::euler_vorticity();
  const auto v = rhs(c, k);
  const Vec2 ref = oracle::area_velocity(k.matrix(), {1, 1, 0}, c[40]);
  EXPECT_NEAR(norm(ref), 0.5, 1e-10);
  EXPECT_NEAR(v[40].x, ref.x, 2e-3);
  EXPECT_NEAR(v[40].y, ref.y, 2e-3);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(norm(v[i]), 0.5, 2e-3);
    EXPECT_NEAR(dot(v[i], c[i]), 0.0, 2e-3);
    EXPECT_GT(cross(c[i], v[i]), 0.0);  // counterclockwise
  }
}

TEST(Rhs, ConjugationSymmetry) {
  const auto c = wobbly(256);
  const auto r = reflect_conjugate(c);
  const auto v = rhs(c, KernelSpec::cauchy()), w = rhs(r, KernelSpec::cauchy());
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& vi = v[(n - i) % n];
    EXPECT_NEAR(w[i].x, vi.x, 1e-12);
    EXPECT_NEAR(w[i].y, -vi.y, 1e-12);
  }
}

TEST(Step, ZeroIsIdentityAndNegativeRejected) {
  const auto c = wobbly(64);
  const auto s = step(c, KernelSpec::cauchy(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(s[i], c[i]);
  EXPECT_THROW(step(c, KernelSpec::cauchy(), -0.1), DomainError);
}

TEST(Step, DiscOneRk4Step) {
  const auto c = step(make_ellipse_contour(1, 1, 0, 512), KernelSpec::cauchy(), 0.1);
  const auto f = fit_ellipse(c);
  EXPECT_NEAR(f.a, 1 + std::tanh(0.1), 1e-4);
  EXPECT_NEAR(f.b, 1 - std::tanh(0.1), 1e-4);
  EXPECT_NEAR(f.a, 1.09967, 1e-5);
}

TEST(Step, HeunIsSecondOrder) {
  const auto c0 = make_ellipse_contour(1, 1, 0, 256);
  auto err = [&](double dt) {
    Contour c = c0;
    for (int i = 0; i < static_cast<int>(std::lround(0.2 / dt)); ++i) c = step(c, KernelSpec::cauchy(), dt, Integrator::heun);
    return std::abs(fit_ellipse(c).a - (1 + std::tanh(0.2)));
  };
  const double ratio = err(0.02) / err(0.01);
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(Step, EulerRotationKeepsAxes) {
  Contour c = make_ellipse_contour(2, 1, 0, 256);
  for (int i = 0; i < 20; ++i) c = step(c, KernelSpec::euler_vorticity(), 0.05);
  const auto f = fit_ellipse(c);
  EXPECT_NEAR(f.a, 2, 1e-3);
  EXPECT_NEAR(f.b, 1, 1e-3);
  EXPECT_NEAR(f.theta, 2.0 / 9.0, 1e-3);
}

TEST(Step, SelfIntersectionIsBreakdown) {
  std::vector<Point2> pts;
  for (int k = 0; k < 64; ++k) {
    const double s = 2 * pi * k / 64;
    pts.push_back({std::cos(s) + 0.3 * std::cos(2 * s), std::sin(s) + 0.05 * std::sin(7 * s)});
  }
  // A bow-tie sliver: counterclockwise overall, but two loops cross.
  std::vector<Point2> bow = pts;
  std::swap(bow[10], bow[12]);
  const Contour c(bow);
  ASSERT_FALSE(is_simple(c));
  EXPECT_THROW(step(c, KernelSpec::cauchy(), 1e-6), BreakdownError);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  const auto tr = evolve(c, KernelSpec::cauchy(), cfg);
  EXPECT_TRUE(tr.breakdown);
  EXPECT_NEAR(tr.breakdown_time, 1e-3, 1e-15);
  EXPECT_FALSE(tr.message.empty());
  EXPECT_EQ(tr.snapshots.size(), 1u);
}

TEST(Evolve, AxisAlignedCauchyMatchesClosedForm) {
  SimConfig cfg;  // dt 1e-3, T 1, RK4, 512 markers
  const auto tr = evolve(make_ellipse_contour(2, 1, 0, cfg.n_markers), KernelSpec::cauchy(), cfg);
  ASSERT_FALSE(tr.breakdown);
  const auto& last = tr.snapshots.back();
  EXPECT_DOUBLE_EQ(last.t, 1.0);
  const double e2 = std::exp(2.0);
  const double a1 = 2 * 3 * e2 / (1 + 2 * e2), b1 = 3 - a1;
  EXPECT_NEAR(last.diagnostics.fit.a / a1, 1.0, 1e-3);
  EXPECT_NEAR(last.diagnostics.fit.b / b1, 1.0, 1e-3);
  for (const auto& s : tr.snapshots) {
    EXPECT_LE(std::abs(s.diagnostics.sum_ab - 3) / 3, 1e-4);
    EXPECT_LE(std::abs(s.diagnostics.skew_inv), 1e-4);
  }
  EXPECT_TRUE(is_simple(last.contour));
  EXPECT_EQ(tr.snapshots.size(), 101u);
}

TEST(Evolve, SnapshotDiagnosticsMatchStandalone) {
  SimConfig cfg;
  cfg.t_end = 0.05;
  cfg.n_markers = 128;
  cfg.diagnostics_every = 7;
  const auto tr = evolve(wobbly(128), KernelSpec::aggregation_newtonian(), cfg);
  ASSERT_EQ(tr.snapshots.size(), 9u);  // 0, 7, ..., 49, 50
  EXPECT_DOUBLE_EQ(tr.snapshots.back().t, 0.05);
  for (const auto& s : tr.snapshots) {
    const auto d = diagnostics(s.contour, s.t);
    EXPECT_EQ(d.area, s.diagnostics.area);
    EXPECT_EQ(d.perimeter, s.diagnostics.perimeter);
    EXPECT_EQ(d.fit.a, s.diagnostics.fit.a);
    EXPECT_EQ(d.fit.theta, s.diagnostics.fit.theta);
    EXPECT_EQ(d.holder_normal, s.diagnostics.holder_normal);
  }
}

TEST(Evolve, StepShortenedToLandOnEnd) {
  SimConfig cfg;
  cfg.dt = 0.03;
  cfg.t_end = 0.1;
  cfg.n_markers = 64;
  cfg.diagnostics_every = 1;
  const auto tr = evolve(make_ellipse_contour(2, 1, 0, 64), KernelSpec::cauchy(), cfg);
  ASSERT_EQ(tr.snapshots.size(), 5u);
  EXPECT_NEAR(tr.snapshots[1].t, 0.025, 1e-15);
  EXPECT_DOUBLE_EQ(tr.snapshots.back().t, 0.1);
}

TEST(Evolve, EulerConservesArea) {
  SimConfig cfg;
  cfg.t_end = 0.2;
  cfg.n_markers = 256;
  const auto tr = evolve(wobbly(256), KernelSpec::euler_vorticity(), cfg);
  const double a0 = tr.snapshots.front().diagnostics.area;
  for (const auto& s : tr.snapshots) EXPECT_LE(std::abs(s.diagnostics.area - a0) / a0, 1e-5);
}

TEST(Evolve, ConjugationEquivariance) {
  SimConfig cfg;
  cfg.t_end = 0.2;
  cfg.n_markers = 128;
  cfg.diagnostics_every = 200;
  const auto c0 = wobbly(128);
  const auto a = evolve(c0, KernelSpec::cauchy(), cfg).snapshots.back().contour;
  const auto b = evolve(reflect_conjugate(c0), KernelSpec::cauchy(), cfg).snapshots.back().contour;
  const auto ra = reflect_conjugate(a);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(norm(ra[i] - b[i]), 1e-10);
}

TEST(Evolve, HolderNormalBoundedAlongTiltedRun) {
  SimConfig cfg;
  cfg.n_markers = 256;
  cfg.diagnostics_every = 100;
  const auto tr = evolve(make_ellipse_contour(2, 1, pi / 6, 256), KernelSpec::cauchy(), cfg);
  ASSERT_FALSE(tr.breakdown);
  const double h0 = tr.snapshots.front().diagnostics.holder_normal;
  for (const auto& s : tr.snapshots) {
    EXPECT_TRUE(std::isfinite(s.diagnostics.holder_normal));
    // exp(C t) envelope with C = 5 is far above the observed growth
    EXPECT_LE(s.diagnostics.holder_normal, h0 * std::exp(5 * s.t));
  }
}

TEST(Evolve, RejectsBadConfig) {
  SimConfig cfg;
  cfg.dt = 0;
  EXPECT_THROW(evolve(wobbly(64), KernelSpec::cauchy(), cfg), DomainError);
  cfg.dt = 1e-3;
  cfg.t_end = -1;
  EXPECT_THROW(evolve(wobbly(64), KernelSpec::cauchy(), cfg), DomainError);
}
