// Builds a compactly-angular bump perturbation of hyperbolic space, once
// aligned with e_1 and once rotated, and checks that the Minkowski length
// p0^2 - |p|^2 of the mass vector is the same for both.

#include "horomass/evaluators.hpp"

#include <cstdio>
#include <vector>

using namespace horomass;

namespace {

MetricModel bump(int n, const Vec& axis) {
  PerturbationSpec spec;
  spec.kind = "angular_bump";
  spec.q = static_cast<double>(n);  // q < n has no finite mass limit
  spec.amplitude = 0.5;
  spec.axis = axis;
  spec.mu0 = 0.0;
  spec.r_min = 1.0;
  return custom_perturbation(n, spec);
}

void describe(const char* tag, const MassVector& mv) {
  std::printf("%s: p0 = %.9g, p = (%.6g, %.6g, %.6g), m^2 = %.9g%s\n", tag, mv.p0, mv.p[0],
              mv.p[1], mv.p[2], mv.minkowski_sq, mv.positive_mass_ok ? "" : "  [p0 < |p|]");
}

}  // namespace

int main() {
  const int n = 3;
  const std::vector<double> radii = {4.0, 8.0, 16.0, 32.0};

  const MassVector aligned = mass_vector(bump(n, Vec::Unit(n, 0)), radii);
  const MassVector rotated = mass_vector(bump(n, (Vec(3) << 0.6, 0.8, 0.0).finished()), radii);

  describe("aligned", aligned);
  describe("rotated", rotated);
  std::printf("relative m^2 mismatch: %.2e\n",
              std::abs(rotated.minkowski_sq / aligned.minkowski_sq - 1.0));
  return 0;
}
