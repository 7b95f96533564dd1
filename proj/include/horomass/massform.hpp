#pragma once

// The mass 1-form U(V) on a background b, the static potentials V that feed
// it, and the surface decomposition of U(V)(nu0) into mean-curvature, trace,
// and tangential-divergence parts with remainder bookkeeping.

#include "horomass/charts.hpp"
#include "horomass/common.hpp"
#include "horomass/geomkernel.hpp"
#include "horomass/metrics.hpp"

namespace horomass {

// V = c_t * t - sum_i a_i z_i.
struct StaticPotential {
  double c_t = 1.0;
  Vec a;

  static StaticPotential time(int n) {
    StaticPotential v;
    v.a = Vec::Zero(n);
    return v;
  }
  static StaticPotential space(int n, int i) {
    StaticPotential v;
    v.c_t = 0.0;
    v.a = Vec::Zero(n);
    v.a[i] = -1.0;  // V = z_i
    return v;
  }
  static StaticPotential direction(const Vec& a) {
    StaticPotential v;
    v.a = a;
    return v;
  }
};

inline ScalarJet potential_jet(const StaticPotential& V, const Frame& frame, const Vec& x) {
  const TZJet tz = tz_jet(frame, x);
  const int n = static_cast<int>(x.size());
  ScalarJet j;
  j.v = V.c_t * tz.t;
  j.dv = V.c_t * tz.dt;
  j.d2v = V.c_t * tz.d2t;
  for (int l = 0; l < n; ++l) {
    if (V.a[l] == 0.0) continue;
    j.v -= V.a[l] * tz.z[l];
    j.dv -= V.a[l] * tz.dz.row(l).transpose();
    j.d2v -= V.a[l] * tz.d2z[l];
  }
  return j;
}

inline ScalarField potential_field(const StaticPotential& V) {
  ScalarField f;
  f.analytic = true;
  f.jet = [V](const Frame& frame, const Vec& x) { return potential_jet(V, frame, x); };
  return f;
}

struct PotentialValue {
  double value = 0.0;
  Vec b_gradient;  // upper components in the chart of p
};

inline PotentialValue eval_potential(const StaticPotential& V, const Point& p) {
  const Frame fr = plain_frame(p.chart);
  const ScalarJet j = potential_jet(V, fr, p.x);
  const Mat b = background_metric_jet(BackgroundKind::Hyperbolic, fr, p.x, false).g;
  PotentialValue out;
  out.value = j.v;
  out.b_gradient = inverse_metric(b) * j.dv;
  return out;
}

inline MetricModel background_of(const MetricModel& model) {
  MetricModel bg;
  bg.n = model.n;
  bg.name = model.name + "_background";
  bg.background = model.background;
  bg.native_chart = model.native_chart;
  return bg;
}

namespace detail {

// nabla_k h_ij on the background: dh_k - Gamma h - h Gamma.
inline Ten3 covariant_dh(const Ten3& gamma_b, const Mat& h, const Ten3& dh) {
  const int n = static_cast<int>(h.rows());
  Ten3 nh(n);
  for (int k = 0; k < n; ++k) {
    Mat m = dh[k];
    for (int l = 0; l < n; ++l) {
      // subtract Gamma^l_{ki} h_{lj} and Gamma^l_{kj} h_{il}
      m -= gamma_b[l].col(k) * h.row(l);
      m -= h.col(l) * gamma_b[l].row(k);
    }
    nh[k] = m;
  }
  return nh;
}

inline double tensor_norm2_3(const Mat& binv, const Ten3& T) {
  const int n = static_cast<int>(binv.rows());
  double s = 0.0;
  std::vector<Mat> up(n);
  for (int k = 0; k < n; ++k) up[k] = binv * T[k] * binv;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) s += binv(k, a) * (up[k].cwiseProduct(T[a])).sum();
  return s;
}

}  // namespace detail

// Everything U(V)(nu0) needs at one point, reusable across potentials.
struct MassFormContext {
  Mat b, binv;
  Ten3 gamma_b;
  Mat h;
  Ten3 nabla_h;     // covariant derivative of h w.r.t. b
  Vec div_h;        // (div_b h)_j = b^{ik} nabla_i h_kj
  Vec d_trace;      // d(tr_b h)_k = b^{ij} nabla_k h_ij
  double trace_h = 0.0;
  double h_norm = 0.0;        // |h|_b
  double nabla_h_norm = 0.0;  // |nabla h|_b
};

inline MassFormContext mass_form_context(const MetricModel& model, const Frame& frame,
                                         const Vec& x) {
  const int n = static_cast<int>(x.size());
  MassFormContext c;
  const MetricJet bj = model.background_jet(frame, x, false);
  c.b = bj.g;
  c.binv = inverse_metric(c.b);
  c.gamma_b = christoffel_from_jet(bj);
  const PerturbJet pj = model.perturbation_jet(frame, x, true);
  c.h = pj.h;
  c.nabla_h = detail::covariant_dh(c.gamma_b, pj.h, pj.dh);
  c.div_h = Vec::Zero(n);
  c.d_trace = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    c.d_trace[k] = (c.binv.cwiseProduct(c.nabla_h[k])).sum();
    for (int i = 0; i < n; ++i) c.div_h += c.binv(i, k) * c.nabla_h[i].row(k).transpose();
  }
  c.trace_h = (c.binv.cwiseProduct(c.h)).sum();
  const Mat m = c.binv * c.h;
  c.h_norm = std::sqrt(std::abs((m * m).trace()));
  c.nabla_h_norm = std::sqrt(std::abs(detail::tensor_norm2_3(c.binv, c.nabla_h)));
  return c;
}

// U(V)(nu0) = [V div_b h - V d(tr_b h) + (tr_b h) dV - h(grad_b V, .)](nu0),
// nu0 given in upper components (b-unit not enforced here).
inline double mass_one_form(const MassFormContext& c, const ScalarJet& Vj, const Vec& nu0) {
  const Vec gradV = c.binv * Vj.dv;
  const Vec one_form = Vj.v * (c.div_h - c.d_trace) + c.trace_h * Vj.dv - c.h * gradV;
  return one_form.dot(nu0);
}

inline double mass_one_form(const MetricModel& model, const StaticPotential& V, const Frame& frame,
                            const Vec& x, const Vec& nu0) {
  return mass_one_form(mass_form_context(model, frame, x), potential_jet(V, frame, x), nu0);
}

inline double mass_one_form(const MetricModel& model, const StaticPotential& V, const Point& p,
                            const Vec& nu0) {
  return mass_one_form(model, V, plain_frame(p.chart), p.x, nu0);
}

// Tangent vector X with b|_Sigma(X, W) = h(nu0, W) for tangent W: the
// tangential projection of the b-dual of h(nu0, .).
inline Vec tangential_dual_X(const MassFormContext& c, const Vec& nu0) {
  const Vec hnu = c.h * nu0;           // h(nu0, .) lowered
  const Vec dual = c.binv * hnu;       // raised
  const Vec nu_low = c.b * nu0;
  return dual - nu0 * (nu_low.dot(dual));
}

inline Vec tangential_dual_X(const MetricModel& model, const Frame& frame, const Vec& x,
                             const Vec& nu0) {
  return tangential_dual_X(mass_form_context(model, frame, x), nu0);
}

// Mean curvature of {V = const} split as H_g = H_b + dH with dH assembled
// from exact difference identities, every term carrying a factor of h or
// nabla h.  Subtracting two separately computed curvatures loses all digits
// once |h| drops below curvature roundoff (large L/r); this path stays
// relative-accurate in h, and vanishes identically when h = 0.
struct CurvatureSplit {
  double V = 0.0;
  double Hb = 0.0;        // background mean curvature w.r.t. nu0
  double dH = 0.0;        // H_g - H_b
  double Jg = 1.0;        // dsigma_g / dsigma_b
  double grad_norm_b = 0.0;
  double grad_norm_g = 0.0;
  Vec nu0;                // background unit normal (upper components)
};

inline CurvatureSplit curvature_split(const MassFormContext& c, const ScalarJet& Vj,
                                      int orientation = +1) {
  const int n = static_cast<int>(Vj.dv.size());
  const double s = static_cast<double>(orientation);
  const Mat g = c.b + c.h;
  const Mat ginv = inverse_metric(g);

  // Difference tensor D^k_ij = Gamma_g - Gamma_b = 1/2 g^{kl} (nabla_i h_jl
  // + nabla_j h_il - nabla_l h_ij), exact.
  Ten3 D(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Vec low(n);
      for (int l = 0; l < n; ++l)
        low[l] = 0.5 * (c.nabla_h[i](j, l) + c.nabla_h[j](i, l) - c.nabla_h[l](i, j));
      const Vec up = ginv * low;
      for (int k = 0; k < n; ++k) {
        D[k](i, j) = up[k];
        D[k](j, i) = up[k];
      }
    }

  const Mat hess_b = hessian_from_parts(c.gamma_b, Vj);
  Mat dhess = Mat::Zero(n, n);  // Hess_g - Hess_b = -D^k dV_k
  for (int k = 0; k < n; ++k) dhess -= Vj.dv[k] * D[k];

  const Vec grad_b = c.binv * Vj.dv;
  const Vec grad_g = ginv * Vj.dv;
  const Vec dgrad = -c.binv * (c.h * grad_g);  // ginv = binv - binv h ginv, exact
  const double n2b = Vj.dv.dot(grad_b);
  const double n2g = Vj.dv.dot(grad_g);
  const double dn2 = Vj.dv.dot(dgrad);
  const double nb = std::sqrt(n2b), ng = std::sqrt(n2g);
  if (!(nb > 1e-12) || !(ng > 1e-12))
    throw DegenerateLevelSet("level set is degenerate: |grad V| <= 1e-12");
  const double dn = dn2 / (nb + ng);  // ng - nb

  const Mat dginv = -c.binv * c.h * ginv;
  const double lap_b = (c.binv.cwiseProduct(hess_b)).sum();
  const double dlap =
      (dginv.cwiseProduct(hess_b + dhess)).sum() + (c.binv.cwiseProduct(dhess)).sum();

  const double Nb = grad_b.dot(hess_b * grad_b);
  const double dN = grad_g.dot(dhess * grad_g) + dgrad.dot(hess_b * grad_g) +
                    grad_b.dot(hess_b * dgrad);

  // H = s (lap - N/n2) / norm;  dH written so each term is a product of a
  // small exact difference with O(1) factors.
  const double term_lap = dlap / ng - lap_b * dn / (ng * nb);
  const double n3g = n2g * ng, n3b = n2b * nb;
  const double dn3 = dn * (ng * ng + ng * nb + nb * nb);  // ng^3 - nb^3
  const double term_N = dN / n3g - Nb * dn3 / (n3g * n3b);

  CurvatureSplit out;
  out.V = Vj.v;
  out.Hb = s * (lap_b - Nb / n2b) / nb;
  out.dH = s * (term_lap - term_N);
  out.grad_norm_b = nb;
  out.grad_norm_g = ng;
  out.Jg = std::sqrt((Mat::Identity(n, n) + c.binv * c.h).determinant()) * ng / nb;
  out.nu0 = (s / nb) * grad_b;
  return out;
}

inline CurvatureSplit curvature_split(const MetricModel& model, const ScalarField& V,
                                      const Frame& frame, const Vec& x, int orientation = +1) {
  return curvature_split(mass_form_context(model, frame, x), V.eval(frame, x), orientation);
}

struct MassOneFormSample {
  double value = 0.0;           // direct U(V)(nu0)
  double mean_curv_term = 0.0;  // 2 V (H_b - H_g) dsigma_g/dsigma_b
  double trace_term = 0.0;      // (tr_b^Sigma h) dV(nu0)
  double a_dot_h_term = 0.0;    // -V <A_b, h> over the tangent space
  double div_term = 0.0;        // -div_Sigma(V X)
  double remainder = 0.0;       // value - sum of the four terms
  double h_norm = 0.0;
  double remainder_scale = 0.0;  // |A_b| |h|^2 + |nabla h| |h|
};

// Decomposition of U(V)(nu0) against the level set {phi = const} through x,
// with nu0 = orientation * b-unit normal.  All terms are densities against
// dsigma_b; the mean-curvature term carries the area ratio dsigma_g/dsigma_b.
// With with_divergence = false the costly div_Sigma(V X) sample is skipped
// (div_term = 0, remainder absorbs it); callers doing whole-face integrals
// replace it by the boundary flux of V X.
inline MassOneFormSample decomposition(const MetricModel& model, const StaticPotential& V,
                                       const ScalarField& phi, const Frame& frame, const Vec& x,
                                       int orientation = +1, bool with_divergence = true) {
  const MassFormContext c = mass_form_context(model, frame, x);
  if (c.h_norm >= 0.5)
    throw SmallnessViolated("perturbation too large for the decomposition: |h|_b = " +
                            std::to_string(c.h_norm));
  const ScalarJet Vj = potential_jet(V, frame, x);

  const MetricModel bg = background_of(model);
  const LevelSetGeometry Gb = level_set_geometry(bg, phi, frame, x, orientation);
  const CurvatureSplit cs = curvature_split(c, phi.eval(frame, x), orientation);

  MassOneFormSample out;
  out.h_norm = c.h_norm;
  const Vec& nu0 = Gb.nu;
  out.value = mass_one_form(c, Vj, nu0);

  out.mean_curv_term = 2.0 * Vj.v * (-cs.dH) * cs.Jg;

  const double trace_sigma = c.trace_h - nu0.dot(c.h * nu0);
  out.trace_term = trace_sigma * Vj.dv.dot(nu0);

  out.a_dot_h_term = -Vj.v * (c.binv * Gb.A * c.binv).cwiseProduct(c.h).sum();

  if (with_divergence) {
    // div_Sigma(V X) = div_b W - b(nabla_nu W, nu) for the extension W = V X
    // built from the level-set normal field; centered differences, step 1e-5.
    auto W_field = [&](const Vec& y) -> Vec {
      const MassFormContext cy = mass_form_context(model, frame, y);
      const ScalarJet vy = potential_jet(V, frame, y);
      const ScalarJet py = phi.eval(frame, y);
      Vec grad_phi = cy.binv * py.dv;
      const double gn = std::sqrt(py.dv.dot(grad_phi));
      const Vec nu = (orientation / gn) * grad_phi;
      return vy.v * tangential_dual_X(cy, nu);
    };
    const int n = static_cast<int>(x.size());
    const Vec W0 = W_field(x);
    Mat dW(n, n);  // dW(i, k) = d_k W^i
    for (int k = 0; k < n; ++k) {
      const double s = 1e-5 * std::max(1.0, std::abs(x[k]));
      Vec xp = x, xm = x;
      xp[k] += s;
      xm[k] -= s;
      dW.col(k) = (W_field(xp) - W_field(xm)) / (2.0 * s);
    }
    double div_b_W = dW.trace();
    Vec nabla_nu_W = dW * nu0;
    for (int i = 0; i < n; ++i) {
      div_b_W += c.gamma_b[i].row(i).dot(W0);
      nabla_nu_W[i] += nu0.dot(c.gamma_b[i] * W0);
    }
    out.div_term = -(div_b_W - nu0.dot(c.b * nabla_nu_W));
  }

  out.remainder =
      out.value - (out.mean_curv_term + out.trace_term + out.a_dot_h_term + out.div_term);
  const Mat Aup = c.binv * Gb.A * c.binv;
  const double A_norm = std::sqrt(std::abs(Aup.cwiseProduct(Gb.A).sum()));
  out.remainder_scale = A_norm * c.h_norm * c.h_norm + c.nabla_h_norm * c.h_norm;
  return out;
}

}  // namespace horomass
