#pragma once

// Metric models g = b + h on a fixed background b (hyperbolic or Euclidean).
// Models carry the perturbation h natively (analytically where possible) so
// that quantities linear in h are never formed by subtracting two O(1)
// metrics; at large radius |h| can sit far below the roundoff of g itself.

#include "horomass/charts.hpp"
#include "horomass/common.hpp"

#include <memory>

namespace horomass {

enum class BackgroundKind { Hyperbolic, Euclidean };

struct MetricJet {
  Mat g;
  Ten3 dg;
  Ten4 d2g;
  bool has_d2 = false;
};

struct PerturbJet {
  Mat h;
  Ten3 dh;
};

namespace detail {

// Jets of T_ij = c(r) z_i z_j for radial profiles c with derivatives c', c''.
inline void radial_zz_jet(const Vec& z, double c, double cp, double cpp, Mat& T, Ten3* dT,
                          Ten4* d2T) {
  const int n = static_cast<int>(z.size());
  const double r = z.norm();
  T = c * (z * z.transpose());
  if (!dT && !d2T) return;
  if (r < 1e-150) {
    if (dT)
      for (int k = 0; k < n; ++k) (*dT)[k].setZero();
    if (d2T)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Mat m = Mat::Zero(n, n);
          m(k, l) += c;
          m(l, k) += c;
          (*d2T)(k, l) = m;
        }
    return;
  }
  const double p = cp / r;
  if (dT) {
    for (int k = 0; k < n; ++k) {
      Mat m = p * z[k] * (z * z.transpose());
      for (int j = 0; j < n; ++j) {
        m(k, j) += c * z[j];
        m(j, k) += c * z[j];
      }
      (*dT)[k] = m;
    }
  }
  if (d2T) {
    const double w = (cpp - p) / (r * r);
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        Mat m = (w * z[k] * z[l]) * (z * z.transpose());
        if (l == k) m += p * (z * z.transpose());
        for (int j = 0; j < n; ++j) {
          m(l, j) += p * z[k] * z[j];
          m(j, l) += p * z[k] * z[j];
          m(k, j) += p * z[l] * z[j];
          m(j, k) += p * z[l] * z[j];
        }
        m(k, l) += c;
        m(l, k) += c;
        (*d2T)(k, l) = m;
        if (l != k) (*d2T)(l, k) = m;
      }
  }
}

// Jets of T_ij = a(r) delta_ij (conformally flat profiles).
inline void radial_diag_jet(const Vec& z, double a, double ap, double app, Mat& T, Ten3* dT,
                            Ten4* d2T) {
  const int n = static_cast<int>(z.size());
  const double r = z.norm();
  T = a * Mat::Identity(n, n);
  if (!dT && !d2T) return;
  if (r < 1e-150) throw DomainError("radial profile jets need r > 0");
  const double p = ap / r;
  if (dT)
    for (int k = 0; k < n; ++k) (*dT)[k] = (p * z[k]) * Mat::Identity(n, n);
  if (d2T) {
    const double w = (app - p) / (r * r);
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        Mat m = (w * z[k] * z[l] + (l == k ? p : 0.0)) * Mat::Identity(n, n);
        (*d2T)(k, l) = m;
        if (l != k) (*d2T)(l, k) = m;
      }
  }
}

}  // namespace detail

// Closed-form background jets.  The hyperboloidal form b = delta - z z^T/t^2
// and the horospherical/half-space forms are all rotation invariant, so the
// frame rotation never enters here.
inline MetricJet background_metric_jet(BackgroundKind kind, const Frame& frame, const Vec& x,
                                       bool need_d2) {
  const int n = static_cast<int>(x.size());
  MetricJet out;
  out.dg = Ten3(n);
  if (need_d2) {
    out.d2g = Ten4(n);
    out.has_d2 = true;
  }

  if (kind == BackgroundKind::Euclidean) {
    if (frame.chart != ChartId::Cartesian)
      throw DomainError("Euclidean background lives in the Cartesian chart");
    out.g = Mat::Identity(n, n);
    return out;
  }

  switch (frame.chart) {
    case ChartId::Hyperboloidal: {
      const double r2 = x.squaredNorm();
      const double t2 = 1.0 + r2;
      const double r = std::sqrt(r2);
      // c(r) = -1/t^2
      const double c = -1.0 / t2;
      const double cp = 2.0 * r / (t2 * t2);
      const double cpp = 2.0 / (t2 * t2) - 8.0 * r2 / (t2 * t2 * t2);
      detail::radial_zz_jet(x, c, cp, cpp, out.g, &out.dg, need_d2 ? &out.d2g : nullptr);
      out.g += Mat::Identity(n, n);
      break;
    }
    case ChartId::Horospherical: {
      const double e2 = std::exp(2.0 * x[0]);
      out.g = e2 * Mat::Identity(n, n);
      out.g(0, 0) = 1.0;
      Mat d = 2.0 * e2 * Mat::Identity(n, n);
      d(0, 0) = 0.0;
      out.dg[0] = d;
      if (need_d2) out.d2g(0, 0) = 2.0 * d;
      break;
    }
    case ChartId::HalfSpace: {
      const double y1 = x[0];
      if (!(y1 > 0.0)) throw DomainError("half-space chart requires y_1 > 0");
      out.g = Mat::Identity(n, n) / (y1 * y1);
      out.dg[0] = -2.0 / (y1 * y1 * y1) * Mat::Identity(n, n);
      if (need_d2) out.d2g(0, 0) = 6.0 / (y1 * y1 * y1 * y1) * Mat::Identity(n, n);
      break;
    }
    case ChartId::Cartesian:
      throw DomainError("hyperbolic background has no Cartesian chart");
  }
  return out;
}

class MetricModel {
 public:
  int n = 3;
  std::string name;
  BackgroundKind background = BackgroundKind::Hyperbolic;
  ChartId native_chart = ChartId::Hyperboloidal;
  double q = 0.0;      // decay rate of |h|_b
  double r_min = 0.0;  // domain: r >= r_min
  double mass_param = 0.0;
  bool analytic = true;  // native h jets available analytically

  // Native-chart perturbation jets; empty for pure backgrounds.  dh/d2h may
  // be requested only when analytic.
  std::function<void(const Vec&, Mat&, Ten3*, Ten4*)> native_h;

  bool is_background() const { return !static_cast<bool>(native_h); }

  void domain_check(const Frame& frame, const Vec& x) const {
    if (r_min <= 0.0) return;
    const double r = radial_coordinate(frame_to_plain(frame, x));
    // Roundoff tolerance: points placed nominally at r_min must pass.
    if (r < r_min * (1.0 - 1e-12))
      throw DomainError(name + ": point with r = " + std::to_string(r) +
                        " lies inside the model domain boundary r_min = " + std::to_string(r_min));
  }

  MetricJet background_jet(const Frame& frame, const Vec& x, bool need_d2 = false) const {
    return background_metric_jet(background, frame, x, need_d2);
  }

  // Models are tied to their background's chart family; asking for the metric
  // in a foreign chart is a capability gap, not a bad point.
  void chart_guard(const Frame& frame) const {
    if (native_chart == ChartId::Cartesian) {
      if (frame.chart != ChartId::Cartesian || frame.rotated())
        throw UnsupportedSurface(name + " is defined in the Cartesian chart only");
    } else if (frame.chart == ChartId::Cartesian) {
      throw UnsupportedSurface(name + " is not defined in the Cartesian chart");
    }
  }

  // Perturbation in the frame, with first derivatives (analytic pullback or
  // centered finite differences of pulled-back values, relative step 1e-5).
  PerturbJet perturbation_jet(const Frame& frame, const Vec& x, bool want_dh = true) const {
    const int nn = static_cast<int>(x.size());
    chart_guard(frame);
    PerturbJet out;
    out.dh = Ten3(nn);
    if (is_background()) {
      out.h = Mat::Zero(nn, nn);
      return out;
    }
    domain_check(frame, x);
    if (analytic) {
      const ChartJets cj = jets_for(frame, x);
      Mat H;
      Ten3 DH(nn);
      native_h(cj.z, H, want_dh ? &DH : nullptr, nullptr);
      pullback_sym2(cj, H, want_dh ? &DH : nullptr, nullptr, out.h, want_dh ? &out.dh : nullptr,
                    nullptr);
      return out;
    }
    out.h = perturbation_values(frame, x);
    if (want_dh) {
      for (int k = 0; k < nn; ++k) {
        const double step = fd_step(x, k, 1e-5);
        Vec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        (*(&out.dh))[k] =
            (perturbation_values(frame, xp) - perturbation_values(frame, xm)) / (2.0 * step);
      }
    }
    return out;
  }

  Mat perturbation_values(const Frame& frame, const Vec& x) const {
    const int nn = static_cast<int>(x.size());
    chart_guard(frame);
    if (is_background()) return Mat::Zero(nn, nn);
    domain_check(frame, x);
    const ChartJets cj = jets_for(frame, x);
    Mat H, h;
    native_h(cj.z, H, nullptr, nullptr);
    pullback_sym2(cj, H, nullptr, nullptr, h, nullptr, nullptr);
    return h;
  }

  Mat metric(const Frame& frame, const Vec& x) const {
    chart_guard(frame);
    domain_check(frame, x);
    Mat g = background_jet(frame, x, false).g;
    if (!is_background()) g += perturbation_values(frame, x);
    return g;
  }

  // Full metric jet g = b + h.  Second derivatives are produced analytically
  // when available and by second differences of h (relative step 1e-4)
  // otherwise; the background part is always analytic.
  MetricJet metric_jet(const Frame& frame, const Vec& x, bool need_d2 = false) const {
    const int nn = static_cast<int>(x.size());
    chart_guard(frame);
    domain_check(frame, x);
    MetricJet out = background_jet(frame, x, need_d2);
    if (is_background()) return out;

    if (analytic) {
      const ChartJets cj = jets_for(frame, x);
      Mat H;
      Ten3 DH(nn);
      Ten4 D2H(nn);
      native_h(cj.z, H, &DH, need_d2 ? &D2H : nullptr);
      Mat h;
      Ten3 dh(nn);
      Ten4 d2h(nn);
      pullback_sym2(cj, H, &DH, need_d2 ? &D2H : nullptr, h, &dh, need_d2 ? &d2h : nullptr);
      out.g += h;
      out.dg += dh;
      if (need_d2) out.d2g += d2h;
      return out;
    }

    const PerturbJet pj = perturbation_jet(frame, x, true);
    out.g += pj.h;
    out.dg += pj.dh;
    if (need_d2) {
      const Mat h0 = pj.h;
      for (int k = 0; k < nn; ++k) {
        const double sk = fd_step(x, k, 1e-4);
        for (int l = k; l < nn; ++l) {
          Mat m;
          if (l == k) {
            Vec xp = x, xm = x;
            xp[k] += sk;
            xm[k] -= sk;
            m = (perturbation_values(frame, xp) - 2.0 * h0 + perturbation_values(frame, xm)) /
                (sk * sk);
          } else {
            const double sl = fd_step(x, l, 1e-4);
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[k] += sk; xpp[l] += sl;
            xpm[k] += sk; xpm[l] -= sl;
            xmp[k] -= sk; xmp[l] += sl;
            xmm[k] -= sk; xmm[l] -= sl;
            m = (perturbation_values(frame, xpp) - perturbation_values(frame, xpm) -
                 perturbation_values(frame, xmp) + perturbation_values(frame, xmm)) /
                (4.0 * sk * sl);
          }
          out.d2g(k, l) += m;
          if (l != k) out.d2g(l, k) += m;
        }
      }
    }
    return out;
  }

  // |h|_b at a point (b-norm of the perturbation).
  double h_norm_b(const Frame& frame, const Vec& x) const {
    chart_guard(frame);
    if (is_background()) return 0.0;
    domain_check(frame, x);
    const Mat b = background_jet(frame, x, false).g;
    const Mat h = perturbation_values(frame, x);
    const Mat m = b.ldlt().solve(h);
    return std::sqrt(std::abs((m * m).trace()));
  }

  MetricModel force_fd() const {
    MetricModel copy = *this;
    copy.analytic = false;
    return copy;
  }

 private:
  static double fd_step(const Vec& x, int k, double rel) {
    return rel * std::max(1.0, std::abs(x[k]));
  }

  static Point frame_to_plain(const Frame& frame, const Vec& x) {
    if (frame.chart == ChartId::Cartesian) return Point{ChartId::Cartesian, x};
    if (!frame.rotated()) return Point{frame.chart, x};
    return frame_to_world(frame, x);
  }

  ChartJets jets_for(const Frame& frame, const Vec& x) const {
    if (native_chart == ChartId::Cartesian) {
      if (frame.chart != ChartId::Cartesian || frame.rotated())
        throw UnsupportedSurface(name + " is defined in the Cartesian chart only");
      ChartJets cj;
      const int nn = static_cast<int>(x.size());
      cj.z = x;
      cj.J = Mat::Identity(nn, nn);
      cj.K.assign(nn, Mat::Zero(nn, nn));
      cj.L.assign(nn, Ten3(nn));
      return cj;
    }
    return chart_jets3(frame, x);
  }
};

// ---------------------------------------------------------------------------
// Factories

inline MetricModel hyperbolic_background(int n) {
  if (n < 3) throw ValidationError("dimension must be >= 3");
  MetricModel m;
  m.n = n;
  m.name = "hyperbolic";
  m.background = BackgroundKind::Hyperbolic;
  m.native_chart = ChartId::Hyperboloidal;
  return m;
}

inline MetricModel euclidean_background(int n) {
  if (n < 3) throw ValidationError("dimension must be >= 3");
  MetricModel m;
  m.n = n;
  m.name = "euclidean";
  m.background = BackgroundKind::Euclidean;
  m.native_chart = ChartId::Cartesian;
  return m;
}

// Largest zero of p(r) = r^n + r^{n-2} - 2m (horizon radius of the
// AdS-Schwarzschild profile f = 1 + r^2 - 2 m r^{2-n}).  p is strictly
// increasing on r > 0, so bisection on a bracketing interval suffices.
inline double ads_horizon_radius(int n, double m) {
  if (!(m > 0.0)) throw ValidationError("ads_schwarzschild requires m > 0");
  auto p = [&](double r) { return std::pow(r, n) + std::pow(r, n - 2) - 2.0 * m; };
  double lo = 0.0, hi = 1.0;
  while (p(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

// psi(r) = 2 m / (f t^2 r^n) with f = t^2 - 2 m r^{2-n}, t^2 = 1 + r^2;
// h_ij = psi z_i z_j is the exact AdS-Schwarzschild deviation from b.
inline void ads_psi(int n, double m, double r, double& psi, double& psi_p, double& psi_pp) {
  const double r2 = r * r;
  const double t2 = 1.0 + r2;
  const double u = 2.0 * m * std::pow(r, 2 - n);
  const double f = t2 - u;
  const double fp = 2.0 * r + 2.0 * m * (n - 2) * std::pow(r, 1 - n);
  const double fpp = 2.0 - 2.0 * m * (n - 2) * (n - 1) * std::pow(r, -n);
  psi = 2.0 * m / (f * t2 * std::pow(r, n));
  const double s = -n / r - fp / f - 2.0 * r / t2;
  const double sp = n / (r2) - fpp / f + (fp / f) * (fp / f) - 2.0 / t2 + 4.0 * r2 / (t2 * t2);
  psi_p = psi * s;
  psi_pp = psi * (s * s + sp);
}

}  // namespace detail

inline MetricModel ads_schwarzschild(int n, double m) {
  if (n < 3) throw ValidationError("dimension must be >= 3");
  if (!(m > 0.0)) throw ValidationError("ads_schwarzschild requires m > 0");
  MetricModel model;
  model.n = n;
  model.name = "ads_schwarzschild";
  model.background = BackgroundKind::Hyperbolic;
  model.native_chart = ChartId::Hyperboloidal;
  model.q = n;
  model.mass_param = m;
  model.r_min = 1.01 * ads_horizon_radius(n, m);
  model.native_h = [n, m](const Vec& z, Mat& h, Ten3* dh, Ten4* d2h) {
    const double r = z.norm();
    double psi, pp, ppp;
    detail::ads_psi(n, m, r, psi, pp, ppp);
    detail::radial_zz_jet(z, psi, pp, ppp, h, dh, d2h);
  };
  return model;
}

inline MetricModel schwarzschild_af(int n, double m) {
  if (n != 3) throw ValidationError("schwarzschild_af is implemented for n = 3");
  if (!(m > 0.0)) throw ValidationError("schwarzschild_af requires m > 0");
  MetricModel model;
  model.n = n;
  model.name = "schwarzschild_af";
  model.background = BackgroundKind::Euclidean;
  model.native_chart = ChartId::Cartesian;
  model.q = 1.0;
  model.mass_param = m;
  model.r_min = m;  // keep clear of the r = m/2 coordinate horizon
  model.native_h = [m](const Vec& x, Mat& h, Ten3* dh, Ten4* d2h) {
    const double r = x.norm();
    const double w = 1.0 + 0.5 * m / r;  // conformal factor
    const double wp = -0.5 * m / (r * r);
    const double wpp = m / (r * r * r);
    const double a = w * w * w * w - 1.0;
    const double ap = 4.0 * w * w * w * wp;
    const double app = 12.0 * w * w * wp * wp + 4.0 * w * w * w * wpp;
    detail::radial_diag_jet(x, a, ap, app, h, dh, d2h);
  };
  return model;
}

struct PerturbationSpec {
  std::string kind;  // "angular_bump" or "ads_tail"
  double q = 3.0;
  double amplitude = 0.1;
  Vec axis;          // bump symmetry axis (hyperboloidal frame)
  double mu0 = 0.0;  // bump support: cos(theta) > mu0
  double r_min = 1.0;
  double lambda = 1.0;  // ads_tail scale
  double m = 1.0;       // ads_tail mass parameter
};

inline MetricModel custom_perturbation(int n, const PerturbationSpec& spec) {
  if (n < 3) throw ValidationError("dimension must be >= 3");
  MetricModel model;
  model.n = n;
  model.background = BackgroundKind::Hyperbolic;
  model.native_chart = ChartId::Hyperboloidal;

  if (spec.kind == "ads_tail") {
    model.name = "ads_tail";
    model.q = n;
    model.mass_param = spec.lambda * spec.m;
    model.r_min = 1.01 * ads_horizon_radius(n, spec.m);
    const double lambda = spec.lambda;
    const double m = spec.m;
    model.native_h = [n, m, lambda](const Vec& z, Mat& h, Ten3* dh, Ten4* d2h) {
      const double r = z.norm();
      double psi, pp, ppp;
      detail::ads_psi(n, m, r, psi, pp, ppp);
      detail::radial_zz_jet(z, lambda * psi, lambda * pp, lambda * ppp, h, dh, d2h);
    };
    return model;
  }

  if (spec.kind != "angular_bump")
    throw ValidationError("unknown perturbation kind: " + spec.kind);
  if (!(spec.q > 0.5 * n))
    throw ValidationError("angular_bump requires q > n/2");
  if (spec.axis.size() != n || spec.axis.norm() < 1e-14)
    throw ValidationError("angular_bump requires a nonzero axis of dimension n");
  if (!(spec.mu0 >= -1.0 && spec.mu0 < 1.0))
    throw ValidationError("angular_bump requires mu0 in [-1, 1)");
  if (!(spec.r_min > 0.0)) throw ValidationError("angular_bump requires r_min > 0");

  model.name = "angular_bump";
  model.q = spec.q;
  model.r_min = spec.r_min;
  model.analytic = false;

  const Vec axis = spec.axis / spec.axis.norm();
  const double A = spec.amplitude;
  const double q = spec.q;
  const double mu0 = spec.mu0;
  // h = A phi(mu) (1+r^2)^{-q/2} in the b-orthonormal radial-radial slot,
  // mu = cos(angle from the axis); phi is a smooth bump supported on
  // mu > mu0 with phi(1) = 1.  Coordinate form: h_ij = c z_i z_j with
  // c = A phi (1+r^2)^{-q/2 - 1} / r^2.
  model.native_h = [axis, A, q, mu0](const Vec& z, Mat& h, Ten3* dh, Ten4* d2h) {
    if (dh || d2h)
      throw UnsupportedSurface("angular_bump has no analytic derivatives");
    const double r = z.norm();
    const double mu = z.dot(axis) / r;
    double phi = 0.0;
    if (mu > mu0) {
      const double w = (mu - mu0) / (1.0 - mu0);  // in (0, 1]
      phi = std::exp(1.0 - 1.0 / (w * (2.0 - w)));
    }
    const double c = A * phi * std::pow(1.0 + r * r, -0.5 * q - 1.0) / (r * r);
    h = c * (z * z.transpose());
  };

  // Positive definiteness probe over a radius/direction grid.
  {
    std::vector<Vec> dirs;
    dirs.push_back(axis);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = 1.0;
      dirs.push_back(e);
      dirs.push_back((e + axis).normalized());
    }
    const Frame fr = plain_frame(ChartId::Hyperboloidal);
    for (double r = spec.r_min; r < 64.0 * spec.r_min; r *= 1.5) {
      for (const Vec& d : dirs) {
        const Mat g = model.metric(fr, r * d);
        Eigen::SelfAdjointEigenSolver<Mat> es(g);
        if (es.eigenvalues().minCoeff() <= 0.0)
          throw ValidationError("angular_bump: metric loses positive definiteness at r = " +
                                std::to_string(r));
      }
    }
  }
  return model;
}

struct DecayCheck {
  double fitted = 0.0;
  bool exact_zero = false;
  bool consistent = true;  // fitted >= q - 0.25
};

// Fit the decay exponent of |h|_b against r on a geometric radius ladder,
// taking the max over a fixed direction probe set at each radius.
inline DecayCheck decay_check(const MetricModel& model, double r0 = 0.0, int samples = 6) {
  DecayCheck out;
  if (model.is_background()) {
    out.exact_zero = true;
    return out;
  }
  if (r0 <= 0.0) r0 = std::max(4.0, 2.0 * model.r_min);
  const int n = model.n;
  const Frame fr = model.native_chart == ChartId::Cartesian ? plain_frame(ChartId::Cartesian)
                                                            : plain_frame(ChartId::Hyperboloidal);
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  Vec diag = Vec::Ones(n);
  dirs.push_back(diag.normalized());

  std::vector<double> lr, lh;
  for (int s = 0; s < samples; ++s) {
    const double r = r0 * std::pow(2.0, s);
    double best = 0.0;
    for (const Vec& d : dirs) best = std::max(best, model.h_norm_b(fr, r * d));
    if (best == 0.0) continue;
    lr.push_back(std::log(r));
    lh.push_back(std::log(best));
  }
  if (lr.size() < 2) {
    out.exact_zero = true;
    return out;
  }
  out.fitted = -fit_slope(lr, lh);
  out.consistent = out.fitted >= model.q - 0.25;
  return out;
}

}  // namespace horomass
