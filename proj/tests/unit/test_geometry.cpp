#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patchflow/diagnostics.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/quadrature.hpp"

using namespace patchflow;

namespace {

Contour unit_circle(std::size_t n) { return make_ellipse_contour(1.0, 1.0, 0.0, n); }

Contour square(std::size_t per_side) {
  std::vector<Point2> pts;
  const Point2 corners[4] = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  for (int s = 0; s < 4; ++s) {
    const Point2 p = corners[s], q = corners[(s + 1) % 4];
    for (std::size_t k = 0; k < per_side; ++k) pts.push_back(p + (static_cast<double>(k) / per_side) * (q - p));
  }
  return Contour(pts);
}

}  // namespace

TEST(MakeEllipse, CircleMarkersOnUnitCircle) {
  const auto c = unit_circle(64);
  ASSERT_EQ(c.size(), 64u);
  for (const auto& p : c) EXPECT_NEAR(norm(p), 1.0, 1e-15);
}

TEST(MakeEllipse, RejectsBadParameters) {
  EXPECT_THROW(make_ellipse_contour(2, 1, 0, 4), GeometryError);
  EXPECT_THROW(make_ellipse_contour(0, 1, 0, 64), GeometryError);
  EXPECT_THROW(make_ellipse_contour(2, -1, 0, 64), GeometryError);
}

TEST(MakeEllipse, MarkersFollowParametrisation) {
  const double th = 0.4;
  const auto c = make_ellipse_contour(2, 1, th, 32);
  for (std::size_t k = 0; k < 32; ++k) {
    const double s = 2 * pi * k / 32.0;
    EXPECT_NEAR(c[k].x, std::cos(th) * 2 * std::cos(s) - std::sin(th) * std::sin(s), 1e-14);
    EXPECT_NEAR(c[k].y, std::sin(th) * 2 * std::cos(s) + std::cos(th) * std::sin(s), 1e-14);
  }
}

TEST(MakeEllipse, FitRoundTripTilted) {
  const auto f = fit_ellipse(make_ellipse_contour(2, 1, pi / 6, 256));
  EXPECT_NEAR(f.a, 2.0, 1e-10);
  EXPECT_NEAR(f.b, 1.0, 1e-10);
  EXPECT_NEAR(f.theta, pi / 6, 1e-10);
}

TEST(MakeEllipse, FitRoundTripGrid) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ua(0.2, 5.0), ut(-pi / 2 + 1e-3, pi / 2);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = ua(rng);
    const double b = std::uniform_real_distribution<double>(0.2, a)(rng);
    const double th = ut(rng);
    if (a - b < 1e-3) continue;  // angle undefined for a disc
    const auto f = fit_ellipse(make_ellipse_contour(a, b, th, 512));
    EXPECT_NEAR(f.a, a, 1e-6 * a);
    EXPECT_NEAR(f.b, b, 1e-6 * a);
    EXPECT_NEAR(axis_angle_difference(f.theta, th), 0.0, 1e-6) << a << ' ' << b << ' ' << th;
  }
}

TEST(Contour, RejectsClockwiseAndTooFew) {
  const auto circle = unit_circle(32);
  std::vector<Point2> pts(circle.begin(), circle.end());
  std::reverse(pts.begin(), pts.end());
  EXPECT_THROW(Contour{pts}, GeometryError);
  EXPECT_THROW(Contour(std::vector<Point2>(10, Point2{1, 0})), GeometryError);
}

TEST(Bump, ZeroAmplitudeIsCircle) {
  const auto c = make_bump_contour(0.5, 0.0, 256);
  for (const auto& p : c) EXPECT_NEAR(norm(p), 1.0, 1e-15);
}

TEST(Bump, SimpleWithExtraArea) {
  const auto c = make_bump_contour(0.5, 0.1, 512);
  EXPECT_TRUE(is_simple(c));
  EXPECT_GT(area(c, IntegralScheme::polygon), pi);
  EXPECT_GT(area(c), pi);
}

TEST(Bump, RejectsOutOfRange) {
  EXPECT_THROW(make_bump_contour(0.0, 0.1, 64), GeometryError);
  EXPECT_THROW(make_bump_contour(1.0, 0.1, 64), GeometryError);
  EXPECT_THROW(make_bump_contour(0.5, 0.3, 64), GeometryError);
  EXPECT_THROW(make_bump_contour(0.5, -0.1, 64), GeometryError);
}

TEST(Bump, ProfileIsWindowedAroundApex) {
  EXPECT_DOUBLE_EQ(bump_radius(0.5, 0.1, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bump_radius(0.5, 0.1, pi), 1.0);
  EXPECT_NEAR(bump_radius(0.5, 0.1, 0.5), 1.0 + 0.1 * std::pow(std::sin(0.25), 1.5), 1e-15);
}

// The normal turns at the apex by ~ eps |s|^{1+gamma}'; the excess over the
// circle at grid scale h behaves like h^gamma, so the gamma-quotient stays
// bounded while any larger exponent grows.
TEST(Bump, ApexNormalExcessScalesLikeHGamma) {
  std::vector<double> scaled, coarse;
  for (std::size_t n : {512u, 1024u, 2048u, 4096u}) {
    const auto c = make_bump_contour(0.5, 0.1, n);
    const auto fr = frames(c);
    const double h = 2 * pi / n;
    // signed: for fine grids the normal turns backwards across the apex
    const double turn = std::atan2(cross(fr.normal[0], fr.normal[1]), dot(fr.normal[0], fr.normal[1]));
    const double excess = turn - h;  // circle turns by exactly h per step
    scaled.push_back(excess / std::sqrt(2 * h));
    coarse.push_back(std::abs(excess) / std::pow(h, 0.9));
  }
  EXPECT_LT(scaled[0], 0.0);
  for (std::size_t i = 1; i < scaled.size(); ++i) {
    EXPECT_NEAR(scaled[i] / scaled[0], 1.0, 1e-2);
    // 0.9-quotient grows by 2^{0.4} per doubling
    EXPECT_NEAR(coarse[i] / coarse[i - 1], std::pow(2.0, 0.4), 1e-2);
  }
}

TEST(Bump, HolderHalfBoundedAcrossN) {
  double prev = 0.0;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const double h = holder_normal(make_bump_contour(0.5, 0.1, n), 0.5);
    EXPECT_TRUE(std::isfinite(h));
    EXPECT_LT(h, 3.0);
    if (prev > 0.0) {
      EXPECT_NEAR(h / prev, 1.0, 0.02);
    }
    prev = h;
  }
}

TEST(Frames, CircleNormalIsRadial) {
  const auto fr = frames(unit_circle(64));
  EXPECT_NEAR(fr.normal[0].x, 1.0, 1e-14);
  EXPECT_NEAR(fr.normal[0].y, 0.0, 1e-14);
  EXPECT_NEAR(fr.tangent[0].x, 0.0, 1e-14);
  EXPECT_NEAR(fr.tangent[0].y, 1.0, 1e-14);
}

TEST(Frames, WeightsSumToPerimeter) {
  double s = 0.0;
  for (double w : frames(unit_circle(256)).weight) s += w;
  EXPECT_NEAR(s, 2 * pi, 1e-3);
  double sc = 0.0;
  for (double w : frames(unit_circle(256), DerivativeScheme::centered_difference).weight) sc += w;
  EXPECT_NEAR(sc, 2 * pi, 1e-3);
}

TEST(Frames, EllipsePerimeterAgainstQuadratureOracle) {
  const double ref = oracle::ellipse_perimeter(2, 1);
  EXPECT_NEAR(ref, 9.6884482205, 1e-9);
  EXPECT_NEAR(oracle::ellipse_perimeter_elliptic(2, 1), ref, 1e-12);
  EXPECT_NEAR(perimeter(make_ellipse_contour(2, 1, 0, 256)), ref, 1e-10);
  EXPECT_NEAR(perimeter(make_ellipse_contour(2, 1, 0, 256), IntegralScheme::polygon), ref, 1e-3);
}

TEST(Frames, OrthogonalAndOutward) {
  for (const auto& c : {make_ellipse_contour(3, 0.5, 1.0, 128), make_bump_contour(0.5, 0.1, 256),
                        make_radial_contour([](double s) { return 1 + 0.05 * std::cos(3 * s); }, 200)}) {
    const auto fr = frames(c);
    const Point2 ctr = centroid(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_NEAR(dot(fr.normal[i], fr.tangent[i]), 0.0, 1e-12);
      EXPECT_GT(dot(fr.normal[i], c[i] - ctr), 0.0);
    }
  }
}

TEST(Frames, DuplicateMarkersRejected) {
  const auto circle = unit_circle(32);
  std::vector<Point2> pts(circle.begin(), circle.end());
  pts[5] = pts[4];
  EXPECT_THROW(frames(Contour(pts)), GeometryError);
}

TEST(Measures, CircleArea) {
  EXPECT_NEAR(area(unit_circle(256)), pi, 2e-4);
  EXPECT_NEAR(area(unit_circle(256), IntegralScheme::polygon), pi, 4e-4);
}

TEST(Measures, EllipseAreaRotationInvariant) {
  for (double th : {0.0, 0.3, pi / 4, 1.4, -1.0}) {
    const auto c = make_ellipse_contour(2, 1, th, 256);
    EXPECT_NEAR(area(c), 2 * pi, 1e-3);
    const Point2 ctr = centroid(c);
    EXPECT_NEAR(ctr.x, 0.0, 1e-10);
    EXPECT_NEAR(ctr.y, 0.0, 1e-10);
  }
}

TEST(Measures, PolygonAreaConvergesSecondOrder) {
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const double err = std::abs(area(make_ellipse_contour(2, 1, 0.2, n), IntegralScheme::polygon) - 2 * pi);
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.9);
    }
    prev = err;
    EXPECT_LT(std::abs(area(make_ellipse_contour(2, 1, 0.2, n)) - 2 * pi), 1e-12);
  }
}

TEST(Measures, SecondMoments) {
  const Mat2 m0 = second_moments(unit_circle(256));
  EXPECT_NEAR(m0(0, 0), 0.25, 1e-4);
  EXPECT_NEAR(m0(1, 1), 0.25, 1e-4);
  EXPECT_NEAR(m0(0, 1), 0.0, 1e-4);
  const Mat2 m1 = second_moments(make_ellipse_contour(2, 1, 0, 256));
  EXPECT_NEAR(m1(0, 0), 1.0, 1e-3);
  EXPECT_NEAR(m1(1, 1), 0.25, 1e-3);
  const auto e = symmetric_eigen(second_moments(make_ellipse_contour(2, 1, pi / 4, 256)));
  EXPECT_NEAR(e.lambda1, 1.0, 1e-3);
  EXPECT_NEAR(e.lambda2, 0.25, 1e-3);
  EXPECT_NEAR(e.angle, pi / 4, 1e-6);
}

TEST(FitEllipse, TiltedRoundTrip) {
  const auto f = fit_ellipse(make_ellipse_contour(2, 1, 0.3, 512));
  EXPECT_NEAR(f.a, 2, 1e-6);
  EXPECT_NEAR(f.b, 1, 1e-6);
  EXPECT_NEAR(f.theta, 0.3, 1e-6);
}

TEST(FitEllipse, CircleTieBreak) {
  const auto f = fit_ellipse(make_ellipse_contour(1.5, 1.5, 0.7, 128));
  EXPECT_NEAR(f.a, 1.5, 1e-12);
  EXPECT_NEAR(f.b, 1.5, 1e-12);
  EXPECT_EQ(f.theta, 0.0);
}

TEST(FitEllipse, SquareAgainstBruteForceMoments) {
  // Gauss-Legendre product rule over [-1,1]^2: int x^2 dA / 4.
  const auto& gl = gauss_legendre(8);
  double ixx = 0.0, a = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i)
    for (std::size_t j = 0; j < gl.size(); ++j) {
      ixx += gl.weights[i] * gl.weights[j] * gl.nodes[i] * gl.nodes[i];
      a += gl.weights[i] * gl.weights[j];
    }
  const double lambda = ixx / a;
  EXPECT_NEAR(lambda, 1.0 / 3.0, 1e-14);
  const auto f = fit_ellipse(square(16), IntegralScheme::polygon);
  EXPECT_NEAR(f.a, 2 * std::sqrt(lambda), 1e-12);
  EXPECT_NEAR(f.b, 2 * std::sqrt(lambda), 1e-12);
  EXPECT_EQ(f.theta, 0.0);
}

TEST(IsSimple, EllipsesAndFigureEight) {
  for (double th : {0.0, 0.5, 1.5}) EXPECT_TRUE(is_simple(make_ellipse_contour(3, 0.2, th, 200)));
  std::vector<Point2> eight;
  for (int k = 0; k < 64; ++k) {
    const double s = 2 * pi * k / 64;
    eight.push_back({std::sin(s), std::sin(s) * std::cos(s)});
  }
  EXPECT_FALSE(is_simple(std::span<const Point2>(eight)));
}

TEST(Resample, UniformCircleIsFixedPoint) {
  const auto c = unit_circle(256);
  const auto r = resample(c, 256);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(norm(r[i] - c[i]), 0.0, 1e-10);
}

TEST(Resample, EquidistributesArclength) {
  const auto c = make_ellipse_contour(3, 0.5, 0.2, 512);
  EXPECT_GT(spacing_ratio(c), 4.0);
  const auto r = resample(c, 512);
  EXPECT_NEAR(spacing_ratio(r), 1.0, 1e-2);
}

TEST(Resample, PreservesAreaAndSimplicity) {
  const auto c = make_ellipse_contour(3, 0.2, 0, 512);
  const double exact = pi * 3 * 0.2;
  const auto r = resample(c, 512);
  // the inscribed polygon moves with the markers; it stays within O(h^2)
  EXPECT_LE(std::abs(area(r, IntegralScheme::polygon) - exact) / exact, 2e-4);
  EXPECT_LE(std::abs(area(r) - area(c)) / area(c), 1e-6);
  for (const auto& t : {make_bump_contour(0.5, 0.1, 512), make_ellipse_contour(2, 1, 1.0, 256),
                        make_radial_contour([](double s) { return 1 + 0.05 * std::cos(3 * s); }, 256)}) {
    const auto rt = resample(t, t.size());
    EXPECT_TRUE(is_simple(rt));
    EXPECT_LE(std::abs(area(rt) - area(t)) / area(t), 1e-6);
  }
}

TEST(Resample, ChangesMarkerCount) {
  const auto r = resample(make_ellipse_contour(2, 1, 0, 256), 300);
  EXPECT_EQ(r.size(), 300u);
  EXPECT_NEAR(area(r), 2 * pi, 1e-6);
}

TEST(Reflect, ConjugateKeepsOrientation) {
  const auto c = make_ellipse_contour(2, 1, 0.4, 64);
  const auto r = reflect_conjugate(c);
  EXPECT_NEAR(area(r), area(c), 1e-12);
  EXPECT_NEAR(fit_ellipse(r).theta, -0.4, 1e-10);
  EXPECT_EQ(r[0], (Point2{c[0].x, -c[0].y}));
}

TEST(Convexity, EllipseConvexBumpContains) {
  EXPECT_TRUE(is_convex(make_ellipse_contour(2, 1, 0.3, 64)));
  const auto star = make_radial_contour([](double s) { return 1 + 0.4 * std::cos(5 * s); }, 200);
  EXPECT_FALSE(is_convex(star));
  EXPECT_TRUE(contains(star, {0, 0}));
  EXPECT_FALSE(contains(star, {2, 0}));
}

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  for (int n : {1, 2, 5, 8, 16}) {
    const auto& gl = gauss_legendre(n);
    ASSERT_EQ(gl.size(), static_cast<std::size_t>(n));
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      gl.apply(0.0, 2.0, [&](double x, double w) { s += w * std::pow(x, p); });
      EXPECT_NEAR(s, std::pow(2.0, p + 1) / (p + 1), 1e-12 * std::pow(2.0, p + 1)) << n << ' ' << p;
    }
  }
}
