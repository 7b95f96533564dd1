#pragma once

// Node builders for the surface families: geodesic spheres, horosphere
// leaves and truncated faces, lateral cylinder walls, and their codim-2
// edges.  Builders emit parameter weights and tangent columns; integrands
// supply the metric and take sqrt(det(T^t gamma T)) as the area density.

#include "horomass/quadrature.hpp"

namespace horomass {

struct Orders {
  int polar = 64;    // Gauss-Legendre order per polar angle
  int azimuth = 64;  // trapezoid node count on the periodic angle
  int radial = 32;   // Gauss-Legendre order per graded radial panel
  int axial = 64;    // Gauss-Legendre order along x1 on lateral walls

  Orders halved() const {
    Orders h;
    h.polar = std::max(polar / 2, 4);
    h.azimuth = std::max(azimuth / 2, 4);
    h.radial = std::max(radial / 2, 4);
    h.axial = std::max(axial / 2, 4);
    return h;
  }
};

struct SurfacePair {
  SurfaceGrid full, half;
};

struct SphereNodes {
  std::vector<Vec> omega;  // unit vectors in R^d
  std::vector<double> w;   // round-measure weights, sum = |S^{d-1}|
};

// Product-angle nodes on S^{d-1} with polar axis e_1, built by wrapping
// polar angles around a base circle.  The wrap onto S^2 integrates in
// c = cos(theta), where the measure is flat; higher wraps stay in theta,
// where sin^{d-2}(theta) is analytic.  The base circle uses offset
// trapezoid nodes: no node lands on a coordinate plane, and the set is
// symmetric under the reflections the footprint checks rely on.
inline SphereNodes sphere_nodes(int d, const Orders& orders) {
  if (d < 2) throw ValidationError("sphere nodes need dimension >= 2");
  if (d == 2) {
    const Rule1D c = trapezoid_periodic(orders.azimuth);
    SphereNodes out;
    out.omega.reserve(c.size());
    for (int i = 0; i < c.size(); ++i) {
      Vec v(2);
      v << std::cos(c.x[i]), std::sin(c.x[i]);
      out.omega.push_back(v);
      out.w.push_back(c.w[i]);
    }
    return out;
  }

  const SphereNodes inner = sphere_nodes(d - 1, orders);
  SphereNodes out;
  out.omega.reserve(orders.polar * inner.omega.size());
  if (d == 3) {
    const Rule1D pc = gauss_legendre(orders.polar, -1.0, 1.0);
    for (int i = 0; i < pc.size(); ++i) {
      const double c = pc.x[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (size_t j = 0; j < inner.omega.size(); ++j) {
        Vec v(3);
        v[0] = c;
        v.tail(2) = s * inner.omega[j];
        out.omega.push_back(v);
        out.w.push_back(pc.w[i] * inner.w[j]);
      }
    }
    return out;
  }
  const Rule1D th = gauss_legendre(orders.polar, 0.0, M_PI);
  for (int i = 0; i < th.size(); ++i) {
    const double c = std::cos(th.x[i]), s = std::sin(th.x[i]);
    const double wi = th.w[i] * std::pow(s, d - 2);
    for (size_t j = 0; j < inner.omega.size(); ++j) {
      Vec v(d);
      v[0] = c;
      v.tail(d - 1) = s * inner.omega[j];
      out.omega.push_back(v);
      out.w.push_back(wi * inner.w[j]);
    }
  }
  return out;
}

namespace detail {

// Orthonormal basis of omega-perp (columns), from the Householder map
// sending e_1 to omega.
inline Mat unit_tangent_basis(const Vec& omega) {
  const int d = static_cast<int>(omega.size());
  const Mat R = rotation_to_axis(omega);
  if (R.size() == 0) return Mat::Identity(d, d).rightCols(d - 1);
  return R.rightCols(d - 1);
}

}  // namespace detail

// Geodesic sphere r = const in the frame's chart: x = r omega, tangents
// r * (orthonormal basis of omega-perp), weights carrying the round measure.
inline SurfaceGrid sphere_grid(const Frame& frame, double r, int n, const Orders& orders) {
  if (!(r > 0.0)) throw ValidationError("sphere radius must be positive");
  const SphereNodes nodes = sphere_nodes(n, orders);
  SurfaceGrid g;
  g.frame = frame;
  g.xs.reserve(nodes.omega.size());
  for (size_t i = 0; i < nodes.omega.size(); ++i) {
    g.xs.push_back(r * nodes.omega[i]);
    g.Ts.push_back(r * detail::unit_tangent_basis(nodes.omega[i]));
    g.ws.push_back(nodes.w[i]);
  }
  return g;
}

inline SurfacePair sphere_surface(const Frame& frame, double r, int n, const Orders& orders) {
  return SurfacePair{sphere_grid(frame, r, n, orders), sphere_grid(frame, r, n, orders.halved())};
}

// Truncated horosphere face {x1 = L, |xhat| <= sigma} in a horospherical
// frame; parameters (rho, omega') with graded radial panels.
inline SurfaceGrid horoface_grid(const Frame& frame, double L, double sigma, int n,
                                 const Orders& orders) {
  if (frame.chart != ChartId::Horospherical)
    throw UnsupportedSurface("horosphere faces live in a horospherical frame");
  const Rule1D rad = graded_gauss(sigma, orders.radial);
  const SphereNodes ang = sphere_nodes(n - 1, orders);
  SurfaceGrid g;
  g.frame = frame;
  g.xs.reserve(rad.size() * ang.omega.size());
  for (int i = 0; i < rad.size(); ++i) {
    const double rho = rad.x[i];
    for (size_t j = 0; j < ang.omega.size(); ++j) {
      Vec x(n);
      x[0] = L;
      x.tail(n - 1) = rho * ang.omega[j];
      Mat T = Mat::Zero(n, n - 1);
      T.col(0).tail(n - 1) = ang.omega[j];
      T.block(1, 1, n - 1, n - 2) = rho * detail::unit_tangent_basis(ang.omega[j]);
      g.xs.push_back(x);
      g.Ts.push_back(T);
      g.ws.push_back(rad.w[i] * ang.w[j]);
    }
  }
  return g;
}

inline SurfacePair horoface_surface(const Frame& frame, double L, double sigma, int n,
                                    const Orders& orders) {
  return SurfacePair{horoface_grid(frame, L, sigma, n, orders),
                     horoface_grid(frame, L, sigma, n, orders.halved())};
}

// Lateral cylinder wall {|xhat| = sigma, x1 in [-L, L]}.
inline SurfaceGrid lateral_grid(const Frame& frame, double L, double sigma, int n,
                                const Orders& orders) {
  if (frame.chart != ChartId::Horospherical)
    throw UnsupportedSurface("cylinder walls live in a horospherical frame");
  const Rule1D ax = gauss_legendre(orders.axial, -L, L);
  const SphereNodes ang = sphere_nodes(n - 1, orders);
  SurfaceGrid g;
  g.frame = frame;
  g.xs.reserve(ax.size() * ang.omega.size());
  for (int i = 0; i < ax.size(); ++i) {
    for (size_t j = 0; j < ang.omega.size(); ++j) {
      Vec x(n);
      x[0] = ax.x[i];
      x.tail(n - 1) = sigma * ang.omega[j];
      Mat T = Mat::Zero(n, n - 1);
      T(0, 0) = 1.0;
      T.block(1, 1, n - 1, n - 2) = sigma * detail::unit_tangent_basis(ang.omega[j]);
      g.xs.push_back(x);
      g.Ts.push_back(T);
      g.ws.push_back(ax.w[i] * ang.w[j]);
    }
  }
  return g;
}

inline SurfacePair lateral_surface(const Frame& frame, double L, double sigma, int n,
                                   const Orders& orders) {
  return SurfacePair{lateral_grid(frame, L, sigma, n, orders),
                     lateral_grid(frame, L, sigma, n, orders.halved())};
}

// Codim-2 edge {x1 = x1_level, |xhat| = sigma}.
inline SurfaceGrid edge_grid(const Frame& frame, double x1_level, double sigma, int n,
                             const Orders& orders) {
  if (frame.chart != ChartId::Horospherical)
    throw UnsupportedSurface("cylinder edges live in a horospherical frame");
  const SphereNodes ang = sphere_nodes(n - 1, orders);
  SurfaceGrid g;
  g.frame = frame;
  g.xs.reserve(ang.omega.size());
  for (size_t j = 0; j < ang.omega.size(); ++j) {
    Vec x(n);
    x[0] = x1_level;
    x.tail(n - 1) = sigma * ang.omega[j];
    Mat T = Mat::Zero(n, n - 2);
    T.block(1, 0, n - 1, n - 2) = sigma * detail::unit_tangent_basis(ang.omega[j]);
    g.xs.push_back(x);
    g.Ts.push_back(T);
    g.ws.push_back(ang.w[j]);
  }
  return g;
}

inline SurfacePair edge_surface(const Frame& frame, double x1_level, double sigma, int n,
                                const Orders& orders) {
  return SurfacePair{edge_grid(frame, x1_level, sigma, n, orders),
                     edge_grid(frame, x1_level, sigma, n, orders.halved())};
}

// Closed-form b-areas of the families (hyperboloidal sphere, horospherical
// face and wall); the sphere formula doubles as the Euclidean one.
inline double sphere_area_b(int n, double r) {
  return unit_sphere_area(n - 1) * std::pow(r, n - 1);
}

inline double horoface_area_b(int n, double L, double sigma) {
  return std::exp(L * (n - 1)) * unit_sphere_area(n - 2) * std::pow(sigma, n - 1) / (n - 1);
}

inline double lateral_area_b(int n, double L, double sigma) {
  const int p = n - 2;
  return unit_sphere_area(n - 2) * std::pow(sigma, p) * (std::exp(p * L) - std::exp(-p * L)) / p;
}

}  // namespace horomass
