#pragma once

// Pointwise differential geometry on a MetricModel: Christoffel symbols,
// Hessians of scalar fields, level-set normals / second fundamental forms /
// mean curvature, and a diagnostic scalar curvature.

#include "horomass/charts.hpp"
#include "horomass/common.hpp"
#include "horomass/metrics.hpp"

namespace horomass {

struct ScalarJet {
  double v = 0.0;
  Vec dv;   // partial derivatives
  Mat d2v;  // second partials
};

struct ScalarField {
  std::function<ScalarJet(const Frame&, const Vec&)> jet;
  bool analytic = true;

  ScalarJet eval(const Frame& frame, const Vec& x) const { return jet(frame, x); }
};

// Wrap a plain evaluator in centered finite differences (relative steps 1e-5
// for the gradient, 1e-4 for the Hessian).
inline ScalarField fd_field(std::function<double(const Frame&, const Vec&)> f) {
  ScalarField out;
  out.analytic = false;
  out.jet = [f](const Frame& frame, const Vec& x) {
    const int n = static_cast<int>(x.size());
    ScalarJet j;
    j.v = f(frame, x);
    j.dv = Vec::Zero(n);
    j.d2v = Mat::Zero(n, n);
    auto step = [&](int k, double rel) { return rel * std::max(1.0, std::abs(x[k])); };
    for (int k = 0; k < n; ++k) {
      const double s = step(k, 1e-5);
      Vec xp = x, xm = x;
      xp[k] += s;
      xm[k] -= s;
      j.dv[k] = (f(frame, xp) - f(frame, xm)) / (2.0 * s);
    }
    for (int k = 0; k < n; ++k) {
      const double sk = step(k, 1e-4);
      for (int l = k; l < n; ++l) {
        double m;
        if (l == k) {
          Vec xp = x, xm = x;
          xp[k] += sk;
          xm[k] -= sk;
          m = (f(frame, xp) - 2.0 * j.v + f(frame, xm)) / (sk * sk);
        } else {
          const double sl = step(l, 1e-4);
          Vec xpp = x, xpm = x, xmp = x, xmm = x;
          xpp[k] += sk; xpp[l] += sl;
          xpm[k] += sk; xpm[l] -= sl;
          xmp[k] -= sk; xmp[l] += sl;
          xmm[k] -= sk; xmm[l] -= sl;
          m = (f(frame, xpp) - f(frame, xpm) - f(frame, xmp) + f(frame, xmm)) / (4.0 * sk * sl);
        }
        j.d2v(k, l) = m;
        j.d2v(l, k) = m;
      }
    }
    return j;
  };
  return out;
}

// Metric inverse with a condition guard (symmetric positive definite input).
inline Mat inverse_metric(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const Vec& ev = es.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw SingularMetric("metric is numerically non-invertible (condition > 1e12)");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij); Gamma[k](i,j).
inline Ten3 christoffel_from_jet(const MetricJet& mj) {
  const int n = static_cast<int>(mj.g.rows());
  const Mat ginv = inverse_metric(mj.g);
  Ten3 gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Vec low(n);  // Gamma_{l,ij}
      for (int l = 0; l < n; ++l)
        low[l] = 0.5 * (mj.dg[i](j, l) + mj.dg[j](i, l) - mj.dg[l](i, j));
      const Vec up = ginv * low;
      for (int k = 0; k < n; ++k) {
        gamma[k](i, j) = up[k];
        gamma[k](j, i) = up[k];
      }
    }
  return gamma;
}

inline Ten3 christoffel(const MetricModel& model, const Frame& frame, const Vec& x) {
  return christoffel_from_jet(model.metric_jet(frame, x, false));
}

inline Ten3 christoffel(const MetricModel& model, const Point& p) {
  return christoffel(model, plain_frame(p.chart), p.x);
}

// Covariant Hessian (nabla^2 V)_ij = d_i d_j V - Gamma^k_ij d_k V.
inline Mat hessian_from_parts(const Ten3& gamma, const ScalarJet& sj) {
  const int n = static_cast<int>(sj.dv.size());
  Mat h = sj.d2v;
  for (int k = 0; k < n; ++k) h -= sj.dv[k] * gamma[k];
  return h;
}

inline Mat hessian_scalar(const MetricModel& model, const ScalarField& V, const Frame& frame,
                          const Vec& x) {
  return hessian_from_parts(christoffel(model, frame, x), V.eval(frame, x));
}

inline double laplacian_scalar(const MetricModel& model, const ScalarField& V, const Frame& frame,
                               const Vec& x) {
  const MetricJet mj = model.metric_jet(frame, x, false);
  const Mat hess = hessian_from_parts(christoffel_from_jet(mj), V.eval(frame, x));
  return (inverse_metric(mj.g) * hess).trace();
}

struct LevelSetGeometry {
  double value = 0.0;     // V at the point
  Vec grad;               // g-gradient of V (upper components)
  Vec dv;                 // plain partials of V
  double grad_norm = 0;   // |dV|_g
  Vec nu;                 // unit normal (upper), orientation * grad / |grad|
  Vec nu_low;             // g_ij nu^j
  Mat hess;               // covariant Hessian of V
  double laplacian = 0;   // Delta_g V
  double H = 0;           // mean curvature w.r.t. nu
  Mat A;                  // second fundamental form, coordinate components; A nu = 0
};

// Geometry of the level set {V = V(p)} through p.  orientation = +1 puts nu
// along +grad V; H and A are taken with respect to that nu, so both flip with
// orientation.
inline LevelSetGeometry level_set_geometry(const MetricModel& model, const ScalarField& V,
                                           const Frame& frame, const Vec& x,
                                           int orientation = +1) {
  const MetricJet mj = model.metric_jet(frame, x, false);
  const Mat ginv = inverse_metric(mj.g);
  const ScalarJet sj = V.eval(frame, x);
  const int n = static_cast<int>(x.size());

  LevelSetGeometry out;
  out.value = sj.v;
  out.dv = sj.dv;
  out.grad = ginv * sj.dv;
  const double norm2 = sj.dv.dot(out.grad);
  out.grad_norm = std::sqrt(std::max(0.0, norm2));
  if (!(out.grad_norm > 1e-12))
    throw DegenerateLevelSet("level set is degenerate: |grad V|_g <= 1e-12");

  const double s = static_cast<double>(orientation);
  out.nu = (s / out.grad_norm) * out.grad;
  out.nu_low = mj.g * out.nu;

  out.hess = hessian_from_parts(christoffel_from_jet(mj), sj);
  out.laplacian = (ginv * out.hess).trace();
  const double hess_nn = out.nu.dot(out.hess * out.nu);
  out.H = s * (out.laplacian - hess_nn) / out.grad_norm;

  // A = P^T (nabla^2 V / |grad V|) P with P = I - nu nu_low^T.
  const Mat P = Mat::Identity(n, n) - out.nu * out.nu_low.transpose();
  out.A = (s / out.grad_norm) * (P.transpose() * out.hess * P);
  return out;
}

inline LevelSetGeometry level_set_geometry(const MetricModel& model, const ScalarField& V,
                                           const Point& p, int orientation = +1) {
  return level_set_geometry(model, V, plain_frame(p.chart), p.x, orientation);
}

enum class SurfaceKind { Sphere, Horosphere, Lateral, SphereEuclidean };

// Exact second fundamental forms on the pure background, as coordinate-space
// matrices at the given point (tangential: A nu = 0).  Spheres live in the
// hyperboloidal chart, horospheres {x_1 = L} and lateral tubes {|x_hat| = s}
// in the horospherical chart, Euclidean spheres in the Cartesian chart.
inline Mat closed_form_second_fundamental(SurfaceKind kind, const Point& p) {
  const int n = p.dim();
  switch (kind) {
    case SurfaceKind::Sphere: {
      if (p.chart != ChartId::Hyperboloidal)
        throw UnsupportedSurface("sphere closed form expects the hyperboloidal chart");
      const Vec& z = p.x;
      const double r = z.norm();
      if (r < 1e-12) throw UnsupportedSurface("sphere closed form needs r > 0");
      const double t2 = 1.0 + r * r;
      const double t = std::sqrt(t2);
      // b restricted to S_r: b - nu_low nu_low^T with nu_low = z/(r t).
      const Mat b = Mat::Identity(n, n) - (z * z.transpose()) / t2;
      const Vec nul = z / (r * t);
      return (t / r) * (b - nul * nul.transpose());
    }
    case SurfaceKind::Horosphere: {
      if (p.chart != ChartId::Horospherical)
        throw UnsupportedSurface("horosphere closed form expects the horospherical chart");
      Mat a = std::exp(2.0 * p.x[0]) * Mat::Identity(n, n);
      a(0, 0) = 0.0;
      return a;
    }
    case SurfaceKind::Lateral: {
      if (p.chart != ChartId::Horospherical)
        throw UnsupportedSurface("lateral closed form expects the horospherical chart");
      const Vec hat = p.x.tail(n - 1);
      const double rho = hat.norm();
      if (rho < 1e-12) throw UnsupportedSurface("lateral closed form needs |x_hat| > 0");
      const double e1 = std::exp(p.x[0]);
      Mat a = Mat::Zero(n, n);
      for (int al = 1; al < n; ++al)
        for (int be = 1; be < n; ++be)
          a(al, be) = (e1 / rho) * ((al == be ? 1.0 : 0.0) - hat[al - 1] * hat[be - 1] / (rho * rho));
      return a;
    }
    case SurfaceKind::SphereEuclidean: {
      if (p.chart != ChartId::Cartesian)
        throw UnsupportedSurface("Euclidean sphere closed form expects the Cartesian chart");
      const Vec& z = p.x;
      const double r = z.norm();
      if (r < 1e-12) throw UnsupportedSurface("sphere closed form needs r > 0");
      return (Mat::Identity(n, n) - (z * z.transpose()) / (r * r)) / r;
    }
  }
  throw UnsupportedSurface("unknown surface kind");
}

// Diagnostic scalar curvature R = g^{ij} R_ij assembled from Christoffel
// jets; second metric derivatives come from the model (analytic or FD).
inline double scalar_curvature(const MetricModel& model, const Frame& frame, const Vec& x) {
  const MetricJet mj = model.metric_jet(frame, x, true);
  const int n = static_cast<int>(x.size());
  const Mat ginv = inverse_metric(mj.g);
  const Ten3 gamma = christoffel_from_jet(mj);

  // dginv_m = -ginv dg_m ginv
  Ten3 dginv(n);
  for (int m = 0; m < n; ++m) dginv[m] = -ginv * mj.dg[m] * ginv;

  // dgamma[m][k](i,j) = d_m Gamma^k_ij
  std::vector<Ten3> dgamma(n, Ten3(n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Vec low(n), dlow(n);
        for (int l = 0; l < n; ++l) {
          low[l] = 0.5 * (mj.dg[i](j, l) + mj.dg[j](i, l) - mj.dg[l](i, j));
          dlow[l] = 0.5 * (mj.d2g(m, i)(j, l) + mj.d2g(m, j)(i, l) - mj.d2g(m, l)(i, j));
        }
        const Vec up = dginv[m] * low + ginv * dlow;
        for (int k = 0; k < n; ++k) {
          dgamma[m][k](i, j) = up[k];
          dgamma[m][k](j, i) = up[k];
        }
      }

  double R = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ric = 0.0;
      for (int k = 0; k < n; ++k) {
        ric += dgamma[k][k](i, j) - dgamma[i][k](k, j);
        for (int l = 0; l < n; ++l)
          ric += gamma[k](k, l) * gamma[l](i, j) - gamma[k](i, l) * gamma[l](k, j);
      }
      R += ginv(i, j) * ric;
    }
  return R;
}

inline double scalar_curvature(const MetricModel& model, const Point& p) {
  return scalar_curvature(model, plain_frame(p.chart), p.x);
}

}  // namespace horomass
