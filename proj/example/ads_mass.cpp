// Computes the mass of the AdS-Schwarzschild model three independent ways
// (sphere flux, horosphere curvature integral, truncated face) and
// extrapolates each route against the exact value 2 m (n-1) omega_{n-1}.

#include "horomass/evaluators.hpp"

#include <cstdio>
#include <vector>

using namespace horomass;

int main() {
  const int n = 3;
  const double m = 1.0;
  const MetricModel model = ads_schwarzschild(n, m);
  const double exact = 2.0 * m * (n - 1) * unit_sphere_area(n - 1);

  std::printf("exact mass: %.12g\n\n", exact);
  std::printf("%-12s %-8s %-18s %-12s\n", "route", "param", "value", "quad_error");

  const StaticPotential Vt = StaticPotential::time(n);
  std::vector<SeriesPoint> sphere_pts;
  for (double r : {8.0, 16.0, 32.0, 64.0}) {
    const MassReading rd = sphere_mass_integral(model, Vt, r);
    std::printf("%-12s %-8g %-18.12g %-12.3g\n", "sphere", r, rd.value, rd.quad_error);
    sphere_pts.push_back({std::log(r), rd.value, rd.quad_error});
  }

  const Vec a = Vec::Unit(n, 0);
  std::vector<SeriesPoint> horo_pts;
  for (double L : {3.0, 4.0, 5.0, 6.0}) {
    const MassReading rd = horosphere_mass(model, a, L, /*rho_max=*/16.0);
    std::printf("%-12s %-8g %-18.12g %-12.3g\n", "horosphere", L, rd.value, rd.quad_error);
    horo_pts.push_back({L, rd.value, std::max(rd.quad_error, rd.tail_bound)});
  }

  for (double L : {3.0, 4.0, 5.0}) {
    const MassReading rd = face_mass(model, L, std::exp(1.5 * L));
    std::printf("%-12s %-8g %-18.12g %-12.3g\n", "face", L, rd.value, rd.quad_error);
  }

  const FitResult fs = extrapolate(sphere_pts);
  const FitResult fh = extrapolate(horo_pts);
  std::printf("\nsphere limit:     %.12g  (rel. error %.2e)\n", fs.limit,
              std::abs(fs.limit / exact - 1.0));
  std::printf("horosphere limit: %.12g  (rel. error %.2e)\n", fh.limit,
              std::abs(fh.limit / exact - 1.0));
  return 0;
}
