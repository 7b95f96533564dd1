#include <catch2/catch_amalgamated.hpp>

#include "horomass/metrics.hpp"
#include "horomass/surfaces.hpp"

#include <cmath>

using namespace horomass;

namespace {

double power_integral(double a, double b, int p) {
  return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

Mat hyperbolic_b(const Frame& frame, const Vec& x) {
  return background_metric_jet(BackgroundKind::Hyperbolic, frame, x, false).g;
}

double grid_area_b(const SurfaceGrid& grid) {
  return integrate_grid(grid, [](const Frame& fr, const Vec& x, const Mat& T) {
    return area_density(hyperbolic_b(fr, x), T);
  });
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials to rule degree") {
  for (int order : {2, 5, 8, 16, 64}) {
    const double a = -0.7, b = 2.3;
    const Rule1D rule = gauss_legendre(order, a, b);
    REQUIRE(rule.size() == order);
    double wsum = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
      REQUIRE(rule.x[i] > a);
      REQUIRE(rule.x[i] < b);
      wsum += rule.w[i];
    }
    CHECK_THAT(wsum, Catch::Matchers::WithinRel(b - a, 1e-14));
    for (int p = 0; p <= 2 * order - 1; p += std::max(1, order / 2)) {
      double s = 0.0;
      for (int i = 0; i < rule.size(); ++i) s += rule.w[i] * std::pow(rule.x[i], p);
      CHECK_THAT(s, Catch::Matchers::WithinRel(power_integral(a, b, p), 1e-12));
    }
  }
  // Degree 2*order is the first failure: make sure the check above is sharp.
  const Rule1D r2 = gauss_legendre(2, 0.0, 1.0);
  double s4 = 0.0;
  for (int i = 0; i < r2.size(); ++i) s4 += r2.w[i] * std::pow(r2.x[i], 4);
  CHECK(std::abs(s4 - 0.2) > 1e-4);
}

TEST_CASE("offset trapezoid nodes avoid coordinate planes and converge spectrally") {
  const Rule1D rule = trapezoid_periodic(64);
  double wsum = 0.0, min_axis_dist = 1.0;
  for (int i = 0; i < rule.size(); ++i) {
    wsum += rule.w[i];
    min_axis_dist = std::min({min_axis_dist, std::abs(std::cos(rule.x[i])),
                              std::abs(std::sin(rule.x[i]))});
  }
  CHECK_THAT(wsum, Catch::Matchers::WithinRel(2.0 * M_PI, 1e-14));
  CHECK(min_axis_dist > 1e-2);

  // int_0^{2pi} e^{cos phi} dphi = 2 pi I_0(1); 16 nodes already reach
  // machine precision for this entire integrand.
  const double exact = 2.0 * M_PI * std::cyl_bessel_i(0.0, 1.0);
  for (int order : {16, 64}) {
    const Rule1D r = trapezoid_periodic(order);
    double s = 0.0;
    for (int i = 0; i < r.size(); ++i) s += r.w[i] * std::exp(std::cos(r.x[i]));
    CHECK_THAT(s, Catch::Matchers::WithinRel(exact, 1e-13));
  }
}

TEST_CASE("graded radial panels span the footprint and integrate powers") {
  for (double sigma : {0.5, 1.0, 3.7, 20.0}) {
    const auto edges = graded_edges(sigma);
    REQUIRE(edges.size() >= 2);
    CHECK(edges.front() == 0.0);
    CHECK_THAT(edges.back(), Catch::Matchers::WithinRel(sigma, 1e-14));
    for (size_t i = 1; i < edges.size(); ++i) CHECK(edges[i] > edges[i - 1]);

    const Rule1D rule = graded_gauss(sigma, 16);
    for (int p : {0, 1, 2, 7}) {
      double s = 0.0;
      for (int i = 0; i < rule.size(); ++i) s += rule.w[i] * std::pow(rule.x[i], p);
      CHECK_THAT(s, Catch::Matchers::WithinRel(power_integral(0.0, sigma, p), 1e-12));
    }
  }
}

TEST_CASE("sphere nodes integrate axisymmetric polynomials exactly") {
  const Orders orders;
  for (int d : {2, 3, 4, 5}) {
    const SphereNodes nodes = sphere_nodes(d, orders);
    double area = 0.0, c2 = 0.0;
    for (size_t i = 0; i < nodes.omega.size(); ++i) {
      CHECK_THAT(nodes.omega[i].norm(), Catch::Matchers::WithinAbs(1.0, 1e-14));
      area += nodes.w[i];
      c2 += nodes.w[i] * nodes.omega[i][0] * nodes.omega[i][0];
    }
    CHECK_THAT(area, Catch::Matchers::WithinRel(unit_sphere_area(d - 1), 1e-12));
    // mean of omega_1^2 over the sphere is 1/d; d >= 4 wraps quadrate the
    // analytic sin^{d-2} weight, which floors a shade above 1e-12.
    CHECK_THAT(c2, Catch::Matchers::WithinRel(unit_sphere_area(d - 1) / d, 1e-10));
  }
}

TEST_CASE("surface grids reproduce closed-form background areas") {
  for (int n : {3, 4}) {
    const Frame hyp = plain_frame(ChartId::Hyperboloidal);
    const Frame horo = plain_frame(ChartId::Horospherical);
    const Orders orders;
    const double L = 1.3, sigma = 2.4, r = 5.0;

    CHECK_THAT(grid_area_b(sphere_grid(hyp, r, n, orders)),
               Catch::Matchers::WithinRel(sphere_area_b(n, r), 1e-10));
    CHECK_THAT(grid_area_b(horoface_grid(horo, L, sigma, n, orders)),
               Catch::Matchers::WithinRel(horoface_area_b(n, L, sigma), 1e-10));
    CHECK_THAT(grid_area_b(lateral_grid(horo, L, sigma, n, orders)),
               Catch::Matchers::WithinRel(lateral_area_b(n, L, sigma), 1e-10));
    // codim-2 edge at height L: round sphere of radius e^L sigma
    const double edge_exact = unit_sphere_area(n - 2) * std::pow(std::exp(L) * sigma, n - 2);
    CHECK_THAT(grid_area_b(edge_grid(horo, L, sigma, n, orders)),
               Catch::Matchers::WithinRel(edge_exact, 1e-10));
  }

  // Euclidean sphere in the Cartesian chart shares the sphere formula.
  const SurfaceGrid cart = sphere_grid(plain_frame(ChartId::Cartesian), 2.0, 3, Orders{});
  const double area = integrate_grid(cart, [](const Frame&, const Vec&, const Mat& T) {
    return area_density(Mat::Identity(3, 3), T);
  });
  CHECK_THAT(area, Catch::Matchers::WithinRel(sphere_area_b(3, 2.0), 1e-12));
}

TEST_CASE("surface integration reports honest half-order error estimates") {
  const Frame horo = plain_frame(ChartId::Horospherical);
  Orders coarse;
  coarse.radial = 8;
  const double L = 0.8, sigma = 2.0;
  const int n = 3;

  // f = sqrt(rho) against the b-measure; the kink at 0 leaves visible
  // quadrature error at order 8.
  auto f = [](const Frame& fr, const Vec& x, const Mat& T) {
    return std::sqrt(x.tail(x.size() - 1).norm()) * area_density(hyperbolic_b(fr, x), T);
  };
  const double exact = std::exp(2.0 * L) * 2.0 * M_PI * std::pow(sigma, 2.5) / 2.5;

  const SurfacePair sp = horoface_surface(horo, L, sigma, n, coarse);
  const QuadResult qr = integrate_surface(sp.full, sp.half, f);
  CHECK(qr.quad_error ==
        std::abs(integrate_grid(sp.full, f) - integrate_grid(sp.half, f)));
  CHECK(qr.quad_error > 1e-10);
  CHECK(std::abs(qr.value - exact) <= 2.0 * qr.quad_error);

  Orders fine;
  fine.radial = 32;
  const SurfacePair sp2 = horoface_surface(horo, L, sigma, n, fine);
  const QuadResult qr2 = integrate_surface(sp2.full, sp2.half, f);
  CHECK(std::abs(qr2.value - exact) < std::abs(qr.value - exact));
  CHECK(qr2.quad_error < qr.quad_error);
}

TEST_CASE("node evaluation is bitwise deterministic across worker counts") {
  const Frame horo = plain_frame(ChartId::Horospherical);
  const SurfaceGrid grid = horoface_grid(horo, 1.0, 3.0, 3, Orders{});
  auto f = [](const Frame& fr, const Vec& x, const Mat& T) {
    return std::exp(-x.tail(2).squaredNorm()) * area_density(hyperbolic_b(fr, x), T);
  };
  const double v1 = integrate_grid(grid, f, 1);
  const double v8 = integrate_grid(grid, f, 8);
  CHECK(v1 == v8);

  auto fm = [&](const Frame& fr, const Vec& x, const Mat& T) {
    const double d = area_density(hyperbolic_b(fr, x), T);
    Vec out(3);
    out << d, x.tail(2).squaredNorm() * d, std::sin(x[1]) * d;
    return out;
  };
  const Vec m1 = integrate_grid_multi(grid, 3, fm, 1);
  const Vec m8 = integrate_grid_multi(grid, 3, fm, 8);
  for (int c = 0; c < 3; ++c) CHECK(m1[c] == m8[c]);
}

TEST_CASE("horosphere tail bound follows its exponent budget") {
  // q = n: the bound is L-independent and falls like rho^{-4} in n = 3.
  const double t1 = tail_bound_horosphere(3, 3.0, 2.0, 1.5, 0.7);
  const double t2 = tail_bound_horosphere(3, 3.0, 5.0, 1.5, 0.7);
  CHECK_THAT(t1, Catch::Matchers::WithinRel(t2, 1e-13));
  const double td = tail_bound_horosphere(3, 3.0, 2.0, 3.0, 0.7);
  CHECK_THAT(t1 / td, Catch::Matchers::WithinRel(16.0, 1e-12));

  // linear in the measured constant
  CHECK_THAT(tail_bound_horosphere(3, 3.0, 2.0, 1.5, 1.4),
             Catch::Matchers::WithinRel(2.0 * t1, 1e-13));

  // borderline exponent q = (n-1)/2 has no finite tail
  CHECK_THROWS_AS(tail_bound_horosphere(3, 1.0, 2.0, 1.5, 0.7), InvalidExponent);
  CHECK_THROWS_AS(tail_bound_horosphere(3, 3.0, 2.0, 0.0, 0.7), ValidationError);
}

TEST_CASE("series extrapolation recovers exponential limits") {
  std::vector<SeriesPoint> pts;
  for (double L : {2.0, 2.5, 3.0, 3.5, 4.0})
    pts.push_back({L, 5.0 + 2.0 * std::exp(-1.5 * L), 0.0});
  const FitResult fit = extrapolate(pts);
  CHECK(fit.rate_valid);
  CHECK_THAT(fit.limit, Catch::Matchers::WithinAbs(5.0, 1e-10));
  CHECK_THAT(fit.rate, Catch::Matchers::WithinRel(1.5, 1e-9));
  CHECK_THAT(fit.amplitude, Catch::Matchers::WithinRel(2.0, 1e-7));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("series extrapolation settles on converged data") {
  std::vector<SeriesPoint> pts = {{1.0, 7.0, 1e-9},
                                  {2.0, 7.0 + 2e-10, 1e-9},
                                  {3.0, 7.0 - 1e-10, 1e-9}};
  const FitResult fit = extrapolate(pts);
  CHECK_FALSE(fit.rate_valid);
  CHECK_THAT(fit.limit, Catch::Matchers::WithinAbs(7.0, 1e-9));
  CHECK(fit.uncertainty <= 1e-8);
}

TEST_CASE("series extrapolation rejects unusable inputs") {
  std::vector<SeriesPoint> alternating;
  for (int i = 0; i < 4; ++i)
    alternating.push_back({static_cast<double>(i), 5.0 + 2.0 * std::pow(-0.8, i), 0.0});
  CHECK_THROWS_AS(extrapolate(alternating), ExtrapolationUnstable);

  std::vector<SeriesPoint> growing;
  for (int i = 0; i < 4; ++i)
    growing.push_back({static_cast<double>(i), 5.0 + std::pow(1.4, i), 0.0});
  CHECK_THROWS_AS(extrapolate(growing), ExtrapolationUnstable);

  CHECK_THROWS_AS(extrapolate({{1.0, 0.0, 0.0}, {2.0, 1.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(extrapolate({{1.0, 0.0, 0.0}, {2.0, 1.0, 0.0}, {2.5, 1.5, 0.0}}),
                  ValidationError);
}
