#pragma once

// Deterministic quadrature: 1-D rules, tensor grids on surfaces, a
// constant-tracked horosphere tail bound, and exponential-series
// extrapolation.  Reductions use a fixed-shape pairwise tree so results are
// bit-identical for any worker count.

#include "horomass/charts.hpp"
#include "horomass/common.hpp"

#include <cmath>

namespace horomass {

struct Rule1D {
  std::vector<double> x, w;
  int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Legendre on [a, b] (Newton iteration on the Legendre recurrence).
inline Rule1D gauss_legendre(int order, double a, double b) {
  if (order < 1) throw ValidationError("quadrature order must be >= 1");
  const int m = order;
  Rule1D r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[m - 1 - i] = x;
    r.w[i] = r.w[m - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    r.x[i] = mid + half * r.x[i];
    r.w[i] *= half;
  }
  return r;
}

// Uniform rule on [0, 2pi) with offset nodes 2pi(k + 1/2)/N: never places a
// node on the coordinate planes, and keeps the node set symmetric under the
// reflections used by the half-footprint checks.
inline Rule1D trapezoid_periodic(int order) {
  if (order < 1) throw ValidationError("quadrature order must be >= 1");
  Rule1D r;
  r.x.resize(order);
  r.w.assign(order, 2.0 * M_PI / order);
  for (int k = 0; k < order; ++k) r.x[k] = 2.0 * M_PI * (k + 0.5) / order;
  return r;
}

// Geometrically graded panel edges 0, c, 2c, 4c, ..., sigma with c = min(1,
// sigma/2); resolves integrands concentrated at rho = O(1) without letting
// the node count grow in sigma.
inline std::vector<double> graded_edges(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("panel extent must be positive");
  std::vector<double> e{0.0};
  double c = std::min(1.0, 0.5 * sigma);
  e.push_back(c);
  while (e.back() < sigma * (1.0 - 1e-12)) e.push_back(std::min(2.0 * e.back(), sigma));
  return e;
}

// Composite Gauss-Legendre over graded panels.
inline Rule1D graded_gauss(double sigma, int order_per_panel) {
  const std::vector<double> e = graded_edges(sigma);
  Rule1D out;
  for (size_t p = 0; p + 1 < e.size(); ++p) {
    const Rule1D r = gauss_legendre(order_per_panel, e[p], e[p + 1]);
    out.x.insert(out.x.end(), r.x.begin(), r.x.end());
    out.w.insert(out.w.end(), r.w.begin(), r.w.end());
  }
  return out;
}

// A tensor grid of surface nodes: chart coordinates, tangent matrices
// (columns = d x / d parameter), and parameter weights.  Area densities are
// not baked in; integrands form sqrt(det(T^t gamma T)) with the metric they
// integrate against.
struct SurfaceGrid {
  Frame frame;
  std::vector<Vec> xs;
  std::vector<Mat> Ts;
  std::vector<double> ws;
  int size() const { return static_cast<int>(xs.size()); }
};

inline double area_density(const Mat& gamma, const Mat& T) {
  const Mat m = T.transpose() * gamma * T;
  const double det = m.determinant();
  if (!(det > 0.0)) throw DegenerateLevelSet("surface tangent plane is metric-degenerate");
  return std::sqrt(det);
}

struct QuadResult {
  double value = 0.0;
  double quad_error = 0.0;
};

// Weighted sum of f over grid nodes; node evaluation runs in parallel, the
// reduction shape is fixed.
template <class F>
double integrate_grid(const SurfaceGrid& grid, F&& f, int workers = 0) {
  std::vector<double> vals(grid.xs.size());
  parallel_for(
      grid.xs.size(),
      [&](size_t i) {
        const double v = grid.ws[i] * f(grid.frame, grid.xs[i], grid.Ts[i]);
        require_finite(v, "surface integrand");
        vals[i] = v;
      },
      workers);
  return pairwise_sum(vals);
}

// value from the full grid, quad_error = |full - half| for a half-order
// companion grid.
template <class F>
QuadResult integrate_surface(const SurfaceGrid& full, const SurfaceGrid& half, F&& f,
                             int workers = 0) {
  QuadResult out;
  out.value = integrate_grid(full, f, workers);
  out.quad_error = std::abs(out.value - integrate_grid(half, f, workers));
  return out;
}

// Several integrands sharing one (expensive) node evaluation; f returns a
// Vec of m components, each reduced through its own fixed pairwise tree.
template <class F>
Vec integrate_grid_multi(const SurfaceGrid& grid, int m, F&& f, int workers = 0) {
  const size_t count = grid.xs.size();
  std::vector<std::vector<double>> comp(m, std::vector<double>(count));
  parallel_for(
      count,
      [&](size_t i) {
        const Vec v = f(grid.frame, grid.xs[i], grid.Ts[i]);
        for (int c = 0; c < m; ++c) {
          const double vc = grid.ws[i] * v[c];
          require_finite(vc, "surface integrand");
          comp[c][i] = vc;
        }
      },
      workers);
  Vec out(m);
  for (int c = 0; c < m; ++c) out[c] = pairwise_sum(comp[c]);
  return out;
}

template <class F>
void integrate_surface_multi(const SurfaceGrid& full, const SurfaceGrid& half, int m, F&& f,
                             Vec& value, Vec& quad_error, int workers = 0) {
  value = integrate_grid_multi(full, m, f, workers);
  quad_error = (value - integrate_grid_multi(half, m, f, workers)).cwiseAbs();
}

// Truncation bound for horosphere-family integrals 2 int V (H_b - H_g)
// dsigma_g over {rho > rho_max} on the leaf at height L.  Chain: V = e^L on
// the leaf; |2(H_b - H_g)| dsigma_g/dsigma_b <= 8 (|h|_b + |nabla h|_b) for
// |h|_b < 1/2; dsigma_b = e^{L(n-1)} rho^{n-2} drho domega; r >= e^L rho^2/2
// on the leaf, so (|h| + |nabla h|) <= C_h (2/e^L)^q rho^{-2q} with C_h a
// measured bound on r^q (|h|_b + |nabla h|_b).
inline double tail_bound_horosphere(int n, double q, double L, double rho_max, double C_h) {
  if (!(n - 1 - 2.0 * q < 0.0))
    throw InvalidExponent("tail bound needs q > (n-1)/2; got q = " + std::to_string(q));
  if (!(rho_max > 0.0)) throw ValidationError("rho_max must be positive");
  const double p = 2.0 * q - (n - 1);  // > 0
  return 8.0 * C_h * unit_sphere_area(n - 2) * std::pow(2.0, q) * std::exp(L * (n - q)) *
         std::pow(rho_max, -p) / p;
}

struct SeriesPoint {
  double param = 0.0;  // L or ln r
  double value = 0.0;
  double quad_error = 0.0;
};

struct FitResult {
  double limit = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;  // beta in v = limit + amplitude e^{-beta param}
  double residual = 0.0;
  bool rate_valid = false;
  double uncertainty = 0.0;
};

// Three-point solve of v(param) = limit + c e^{-beta param} on the last
// three (equally spaced) points; earlier points feed the residual.  A series
// whose successive differences sit below the quadrature noise is treated as
// already converged.
inline FitResult extrapolate(const std::vector<SeriesPoint>& pts) {
  const size_t m = pts.size();
  if (m < 3) throw ValidationError("extrapolation needs at least 3 points");
  const double delta = pts[1].param - pts[0].param;
  if (!(delta > 0.0)) throw ValidationError("extrapolation parameters must increase");
  for (size_t i = 1; i < m; ++i)
    if (std::abs((pts[i].param - pts[i - 1].param) - delta) > 1e-9 * std::abs(delta))
      throw ValidationError("extrapolation needs equally spaced parameters");

  double noise = 0.0;
  for (const auto& p : pts) noise = std::max(noise, p.quad_error);

  const double v1 = pts[m - 3].value, v2 = pts[m - 2].value, v3 = pts[m - 1].value;
  const double d1 = v2 - v1, d2 = v3 - v2;

  FitResult fit;
  if (std::abs(d1) <= 4.0 * noise && std::abs(d2) <= 4.0 * noise) {
    fit.limit = v3;
    fit.residual = std::max(std::abs(d1), std::abs(d2));
    fit.uncertainty = std::max(fit.residual, pts[m - 1].quad_error);
    return fit;
  }

  const double ratio = d2 / d1;
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ExtrapolationUnstable("difference ratio " + std::to_string(ratio) +
                                " outside (0,1); series is not single-exponential");
  fit.rate = -std::log(ratio) / delta;
  fit.rate_valid = true;
  fit.limit = v3 + d2 * ratio / (1.0 - ratio);
  fit.amplitude = -d2 * ratio / (1.0 - ratio) * std::exp(fit.rate * pts[m - 1].param);

  // Residual: prediction error over all points.
  double res = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double pred = fit.limit + fit.amplitude * std::exp(-fit.rate * pts[i].param);
    res = std::max(res, std::abs(pred - pts[i].value));
  }
  fit.residual = res;
  fit.uncertainty = std::max(fit.residual, pts[m - 1].quad_error);
  return fit;
}

}  // namespace horomass
