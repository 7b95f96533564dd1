#pragma once

// Coordinate charts on hyperbolic space H^n and the exact transforms between
// them.  Conventions:
//   Hyperboloidal  z in R^n, the point (z, t) with t = sqrt(1 + |z|^2) on the
//                  unit hyperboloid; b = delta_ij - z_i z_j / (1 + |z|^2).
//   HalfSpace      y in R^n with y_1 > 0; b = y_1^{-2} delta.
//   Horospherical  x in R^n; b = dx_1^2 + e^{2 x_1} (dx_2^2 + ... + dx_n^2).
//   Cartesian      flat chart for asymptotically flat backgrounds.
// Transform pairs: y_1 = 1/(t - z_1), y_i = z_i/(t - z_1), e^{x_1} = t - z_1,
// x_i = y_i.  t - z_1 > 0 holds on the whole hyperboloid.

#include "horomass/common.hpp"

namespace horomass {

enum class ChartId { Hyperboloidal, HalfSpace, Horospherical, Cartesian };

inline const char* chart_name(ChartId c) {
  switch (c) {
    case ChartId::Hyperboloidal: return "hyperboloidal";
    case ChartId::HalfSpace: return "half_space";
    case ChartId::Horospherical: return "horospherical";
    case ChartId::Cartesian: return "cartesian";
  }
  return "?";
}

struct Point {
  ChartId chart;
  Vec x;

  int dim() const { return static_cast<int>(x.size()); }
};

inline void validate_point(const Point& p) {
  if (p.dim() < 3) throw DomainError("points must have dimension >= 3");
  require_finite(p.x, "point coordinates");
  if (p.chart == ChartId::HalfSpace && !(p.x[0] > 0.0))
    throw DomainError("half-space chart requires y_1 > 0");
}

namespace detail {

inline double hat_norm2(const Vec& x) {
  double s = 0.0;
  for (int i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

}  // namespace detail

// t = cosh(x_1) + e^{x_1} |x_hat|^2 / 2 on the hyperboloid, by chart.
inline double t_coordinate(const Point& p) {
  validate_point(p);
  switch (p.chart) {
    case ChartId::Hyperboloidal:
      return std::sqrt(1.0 + p.x.squaredNorm());
    case ChartId::Horospherical: {
      const double e = std::exp(p.x[0]);
      const double t = std::cosh(p.x[0]) + 0.5 * e * detail::hat_norm2(p.x);
      require_finite(t, "t_coordinate");
      return t;
    }
    case ChartId::HalfSpace: {
      const double q = p.x[0] * p.x[0] + detail::hat_norm2(p.x);
      const double t = (q + 1.0) / (2.0 * p.x[0]);
      require_finite(t, "t_coordinate");
      return t;
    }
    case ChartId::Cartesian:
      throw DomainError("t_coordinate undefined in the Cartesian chart");
  }
  throw DomainError("unknown chart");
}

// Geodesic-sphere radius r with t^2 = 1 + r^2.  Near the hyperboloid vertex
// t - 1 underflows if formed as t - 1 directly, so r^2 is assembled as
// (t - 1)(t + 1) with t - 1 built from non-negative pieces:
//   t - 1 = 2 sinh^2(x_1 / 2) + e^{x_1} |x_hat|^2 / 2        (horospherical)
//   t - 1 = ((y_1 - 1)^2 + |y_hat|^2) / (2 y_1)              (half-space)
inline double radial_coordinate(const Point& p) {
  validate_point(p);
  switch (p.chart) {
    case ChartId::Hyperboloidal:
    case ChartId::Cartesian:
      return p.x.norm();
    case ChartId::Horospherical: {
      const double sh = std::sinh(0.5 * p.x[0]);
      const double tm1 = 2.0 * sh * sh + 0.5 * std::exp(p.x[0]) * detail::hat_norm2(p.x);
      const double r = std::sqrt(tm1 * (tm1 + 2.0));
      require_finite(r, "radial_coordinate");
      return r;
    }
    case ChartId::HalfSpace: {
      const double tm1 =
          ((p.x[0] - 1.0) * (p.x[0] - 1.0) + detail::hat_norm2(p.x)) / (2.0 * p.x[0]);
      const double r = std::sqrt(tm1 * (tm1 + 2.0));
      require_finite(r, "radial_coordinate");
      return r;
    }
  }
  throw DomainError("unknown chart");
}

inline Point to_chart(const Point& p, ChartId target) {
  validate_point(p);
  if (p.chart == target) return p;
  if (p.chart == ChartId::Cartesian || target == ChartId::Cartesian)
    throw DomainError("the Cartesian chart does not convert to hyperbolic charts");

  const int n = p.dim();
  Vec out(n);
  switch (p.chart) {
    case ChartId::Hyperboloidal: {
      const double t = std::sqrt(1.0 + p.x.squaredNorm());
      const double w = t - p.x[0];  // = e^{x_1} = 1/y_1 > 0
      if (target == ChartId::Horospherical) {
        out[0] = std::log(w);
        for (int i = 1; i < n; ++i) out[i] = p.x[i] / w;
      } else {
        out[0] = 1.0 / w;
        for (int i = 1; i < n; ++i) out[i] = p.x[i] / w;
      }
      break;
    }
    case ChartId::Horospherical: {
      if (target == ChartId::HalfSpace) {
        // x_i = y_i exactly; only the first coordinate changes form.
        const double y1 = std::exp(-p.x[0]);
        if (!(y1 > 0.0) || !std::isfinite(y1))
          throw NonFinite("e^{-x_1} under/overflows in chart transform");
        out = p.x;
        out[0] = y1;
      } else {
        const double e = std::exp(p.x[0]);
        if (!std::isfinite(e) || e == 0.0)
          throw NonFinite("e^{x_1} under/overflows in chart transform");
        out[0] = -std::sinh(p.x[0]) + 0.5 * e * detail::hat_norm2(p.x);
        for (int i = 1; i < n; ++i) out[i] = e * p.x[i];
      }
      break;
    }
    case ChartId::HalfSpace: {
      if (target == ChartId::Horospherical) {
        out = p.x;
        out[0] = -std::log(p.x[0]);
      } else {
        const double y1 = p.x[0];
        out[0] = (y1 * y1 + detail::hat_norm2(p.x) - 1.0) / (2.0 * y1);
        for (int i = 1; i < n; ++i) out[i] = p.x[i] / y1;
      }
      break;
    }
    case ChartId::Cartesian:
      throw DomainError("unreachable");
  }
  require_finite(out, "to_chart");
  return Point{target, out};
}

// A working frame: a chart together with a rotation R of the hyperboloidal
// coordinates (world point z = R * Z_chart(x)).  Rotated horospherical frames
// realize horospheres based at an arbitrary unit direction a = R e_1.
struct Frame {
  ChartId chart = ChartId::Hyperboloidal;
  Mat rot;  // empty means identity

  bool rotated() const { return rot.size() != 0; }
};

inline Frame plain_frame(ChartId c) { return Frame{c, Mat()}; }

// Orthogonal map taking e_1 to the unit vector a (Householder reflection;
// the identity when a is already e_1).
inline Mat rotation_to_axis(const Vec& a) {
  const int n = static_cast<int>(a.size());
  Vec u = a / a.norm();
  Vec v = -u;
  v[0] += 1.0;  // v = e_1 - u
  const double vv = v.squaredNorm();
  if (vv < 1e-28) return Mat();
  Mat r = Mat::Identity(n, n) - (2.0 / vv) * (v * v.transpose());
  return r;
}

// Jets of (t, z_1..z_n) as functions of the frame coordinates.  These drive
// static potentials V = c_t t - a . z in every chart.
struct TZJet {
  double t;
  Vec dt;
  Mat d2t;
  Vec z;                 // world hyperboloidal coordinates
  Mat dz;                // dz(a, i) = d z_a / d x_i
  std::vector<Mat> d2z;  // d2z[a](i, j)
};

inline TZJet tz_jet(const Frame& frame, const Vec& x) {
  const int n = static_cast<int>(x.size());
  TZJet out;
  out.dt = Vec::Zero(n);
  out.d2t = Mat::Zero(n, n);
  Vec zeta(n);
  Mat dzeta = Mat::Zero(n, n);
  std::vector<Mat> d2zeta(n, Mat::Zero(n, n));

  switch (frame.chart) {
    case ChartId::Hyperboloidal: {
      const double t = std::sqrt(1.0 + x.squaredNorm());
      out.t = t;
      out.dt = x / t;
      out.d2t = Mat::Identity(n, n) / t - (x * x.transpose()) / (t * t * t);
      zeta = x;
      dzeta = Mat::Identity(n, n);
      break;
    }
    case ChartId::Horospherical: {
      const double e = std::exp(x[0]);
      double rho2 = 0.0;
      for (int i = 1; i < n; ++i) rho2 += x[i] * x[i];
      const double s = 0.5 * e * rho2;
      out.t = std::cosh(x[0]) + s;
      out.dt[0] = std::sinh(x[0]) + s;
      for (int i = 1; i < n; ++i) out.dt[i] = e * x[i];
      out.d2t(0, 0) = out.t;
      for (int i = 1; i < n; ++i) {
        out.d2t(0, i) = out.d2t(i, 0) = e * x[i];
        out.d2t(i, i) = e;
      }
      zeta[0] = -std::sinh(x[0]) + s;
      dzeta(0, 0) = -std::cosh(x[0]) + s;
      for (int i = 1; i < n; ++i) dzeta(0, i) = e * x[i];
      d2zeta[0](0, 0) = zeta[0];
      for (int i = 1; i < n; ++i) {
        d2zeta[0](0, i) = d2zeta[0](i, 0) = e * x[i];
        d2zeta[0](i, i) = e;
      }
      for (int a = 1; a < n; ++a) {
        zeta[a] = e * x[a];
        dzeta(a, 0) = e * x[a];
        dzeta(a, a) = e;
        d2zeta[a](0, 0) = e * x[a];
        d2zeta[a](0, a) = d2zeta[a](a, 0) = e;
      }
      break;
    }
    case ChartId::HalfSpace: {
      const double y1 = x[0];
      if (!(y1 > 0.0)) throw DomainError("half-space frame requires y_1 > 0");
      double hat2 = 0.0;
      for (int i = 1; i < n; ++i) hat2 += x[i] * x[i];
      out.t = (y1 * y1 + hat2 + 1.0) / (2.0 * y1);
      out.dt[0] = (y1 * y1 - hat2 - 1.0) / (2.0 * y1 * y1);
      for (int i = 1; i < n; ++i) out.dt[i] = x[i] / y1;
      out.d2t(0, 0) = (hat2 + 1.0) / (y1 * y1 * y1);
      for (int i = 1; i < n; ++i) {
        out.d2t(0, i) = out.d2t(i, 0) = -x[i] / (y1 * y1);
        out.d2t(i, i) = 1.0 / y1;
      }
      zeta[0] = (y1 * y1 + hat2 - 1.0) / (2.0 * y1);
      dzeta(0, 0) = out.dt[0] + 1.0 / (y1 * y1);  // zeta_1 = t - 1/y_1
      for (int i = 1; i < n; ++i) dzeta(0, i) = x[i] / y1;
      d2zeta[0](0, 0) = (hat2 - 1.0) / (y1 * y1 * y1);
      for (int i = 1; i < n; ++i) {
        d2zeta[0](0, i) = d2zeta[0](i, 0) = -x[i] / (y1 * y1);
        d2zeta[0](i, i) = 1.0 / y1;
      }
      for (int a = 1; a < n; ++a) {
        zeta[a] = x[a] / y1;
        dzeta(a, 0) = -x[a] / (y1 * y1);
        dzeta(a, a) = 1.0 / y1;
        d2zeta[a](0, 0) = 2.0 * x[a] / (y1 * y1 * y1);
        d2zeta[a](0, a) = d2zeta[a](a, 0) = -1.0 / (y1 * y1);
      }
      break;
    }
    case ChartId::Cartesian:
      throw DomainError("tz_jet undefined in the Cartesian chart");
  }

  if (frame.rotated()) {
    out.z = frame.rot * zeta;
    out.dz = frame.rot * dzeta;
    out.d2z.assign(n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (frame.rot(a, b) != 0.0) out.d2z[a] += frame.rot(a, b) * d2zeta[b];
  } else {
    out.z = zeta;
    out.dz = dzeta;
    out.d2z = std::move(d2zeta);
  }
  require_finite(out.z, "tz_jet");
  return out;
}

inline Point frame_to_world(const Frame& frame, const Vec& x) {
  if (frame.chart == ChartId::Cartesian) return Point{ChartId::Cartesian, x};
  if (!frame.rotated()) return Point{frame.chart, x};
  const TZJet j = tz_jet(frame, x);
  return Point{ChartId::Hyperboloidal, j.z};
}

// Third-order jets of the map from frame coordinates to hyperboloidal world
// coordinates; enough to pull metric second derivatives between charts.
struct ChartJets {
  Vec z;                 // Z(x)
  Mat J;                 // J(a, i) = d Z_a / d x_i
  std::vector<Mat> K;    // K[a](i, k) = d^2 Z_a
  std::vector<Ten3> L;   // L[a][i](k, l) = d^3 Z_a
};

inline ChartJets chart_jets3(const Frame& frame, const Vec& x) {
  const int n = static_cast<int>(x.size());
  ChartJets cj;
  cj.z = Vec::Zero(n);
  cj.J = Mat::Zero(n, n);
  cj.K.assign(n, Mat::Zero(n, n));
  cj.L.assign(n, Ten3(n));

  switch (frame.chart) {
    case ChartId::Hyperboloidal: {
      cj.z = x;
      cj.J = Mat::Identity(n, n);
      break;
    }
    case ChartId::Horospherical: {
      const double e = std::exp(x[0]);
      double rho2 = 0.0;
      for (int i = 1; i < n; ++i) rho2 += x[i] * x[i];
      const double s = 0.5 * e * rho2;
      // zeta_1 = -sinh(x_1) + s.  Every pure-x_1 derivative alternates
      // -cosh/-sinh plus s; mixed derivatives carry e^{x_1} factors.
      cj.z[0] = -std::sinh(x[0]) + s;
      cj.J(0, 0) = -std::cosh(x[0]) + s;
      for (int i = 1; i < n; ++i) cj.J(0, i) = e * x[i];
      cj.K[0](0, 0) = -std::sinh(x[0]) + s;
      for (int i = 1; i < n; ++i) {
        cj.K[0](0, i) = cj.K[0](i, 0) = e * x[i];
        cj.K[0](i, i) = e;
      }
      cj.L[0][0](0, 0) = -std::cosh(x[0]) + s;
      for (int i = 1; i < n; ++i) {
        cj.L[0][0](0, i) = cj.L[0][0](i, 0) = e * x[i];
        cj.L[0][i](0, 0) = e * x[i];
        cj.L[0][0](i, i) = e;
        cj.L[0][i](0, i) = cj.L[0][i](i, 0) = e;
      }
      for (int a = 1; a < n; ++a) {
        cj.z[a] = e * x[a];
        cj.J(a, 0) = e * x[a];
        cj.J(a, a) = e;
        cj.K[a](0, 0) = e * x[a];
        cj.K[a](0, a) = cj.K[a](a, 0) = e;
        cj.L[a][0](0, 0) = e * x[a];
        cj.L[a][0](0, a) = cj.L[a][0](a, 0) = e;
        cj.L[a][a](0, 0) = e;
      }
      break;
    }
    default:
      throw UnsupportedSurface("chart_jets3 implemented for hyperboloidal and horospherical frames");
  }

  if (frame.rotated()) {
    ChartJets rj;
    rj.z = frame.rot * cj.z;
    rj.J = frame.rot * cj.J;
    rj.K.assign(n, Mat::Zero(n, n));
    rj.L.assign(n, Ten3(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double rab = frame.rot(a, b);
        if (rab == 0.0) continue;
        rj.K[a] += rab * cj.K[b];
        for (int i = 0; i < n; ++i) rj.L[a][i] += rab * cj.L[b][i];
      }
    return rj;
  }
  return cj;
}

// Pull a symmetric 2-tensor with derivatives through a chart map:
//   g_ij = J^a_i J^b_j G_ab evaluated at Z(x),
// with first and (optionally) second coordinate derivatives by the product
// rule.  DG[c](a,b) = d G_ab / d z_c and D2G(c,d)(a,b) = d^2 G_ab.
inline void pullback_sym2(const ChartJets& cj, const Mat& G, const Ten3* DG, const Ten4* D2G,
                          Mat& g, Ten3* dg, Ten4* d2g) {
  const int n = static_cast<int>(cj.z.size());
  const Mat& J = cj.J;
  g = J.transpose() * G * J;
  if (!dg && !d2g) return;

  // KJ[k](a, i) = K^a_{ik}; DGJ[k] = sum_c J(c,k) DG[c].
  std::vector<Mat> KJ(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) KJ[k](a, i) = cj.K[a](i, k);
  std::vector<Mat> DGJ(n, Mat::Zero(n, n));
  if (DG)
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < n; ++c)
        if (J(c, k) != 0.0) DGJ[k] += J(c, k) * (*DG)[c];

  if (dg) {
    for (int k = 0; k < n; ++k) {
      Mat a = KJ[k].transpose() * G * J;
      (*dg)[k] = a + a.transpose();
      if (DG) (*dg)[k] += J.transpose() * DGJ[k] * J;
    }
  }

  if (d2g) {
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        Mat lm = Mat::Zero(n, n);  // lm(a, i) = L^a_{ikl}
        for (int a = 0; a < n; ++a)
          for (int i = 0; i < n; ++i) lm(a, i) = cj.L[a][i](k, l);
        Mat acc = lm.transpose() * G * J;
        acc += acc.transpose().eval();
        acc += KJ[k].transpose() * G * KJ[l] + KJ[l].transpose() * G * KJ[k];
        if (DG) {
          Mat m1 = KJ[k].transpose() * DGJ[l] * J + KJ[l].transpose() * DGJ[k] * J;
          acc += m1 + m1.transpose();
          Mat dgkl = Mat::Zero(n, n);  // sum_c DG[c] K^c_{kl}
          for (int c = 0; c < n; ++c) dgkl += cj.K[c](k, l) * (*DG)[c];
          acc += J.transpose() * dgkl * J;
        }
        if (D2G) {
          Mat d2 = Mat::Zero(n, n);
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
              const double w = J(c, k) * J(d, l);
              if (w != 0.0) d2 += w * (*D2G)(c, d);
            }
          acc += J.transpose() * d2 * J;
        }
        (*d2g)(k, l) = acc;
        if (l != k) (*d2g)(l, k) = acc;
      }
  }
}

}  // namespace horomass
