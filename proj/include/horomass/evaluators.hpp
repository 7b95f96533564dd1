#pragma once

// Mass evaluators over the surface families: coordinate spheres, horosphere
// leaves, truncated faces, parabolic cylinder boundaries, footprint regions,
// and the asymptotically flat flux/geometric formulas.

#include "horomass/massform.hpp"
#include "horomass/surfaces.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

namespace horomass {

struct MassReading {
  double value = 0.0;
  double quad_error = 0.0;
  double tail_bound = 0.0;
  std::string param_name;  // "r" or "L"
  double param = 0.0;
  double sigma = 0.0;    // truncation radius, 0 when not applicable
  double rho_max = 0.0;  // horosphere integration radius, 0 when not applicable
  Orders orders;
  std::string diagnostic;  // non-fatal notes
};

namespace detail {

inline ScalarField coordinate_field(int k) {
  ScalarField f;
  f.analytic = true;
  f.jet = [k](const Frame&, const Vec& x) {
    const int n = static_cast<int>(x.size());
    ScalarJet j;
    j.v = x[k];
    j.dv = Vec::Unit(n, k);
    j.d2v = Mat::Zero(n, n);
    return j;
  };
  return f;
}

inline ScalarField hat_radius_field() {
  ScalarField f;
  f.analytic = true;
  f.jet = [](const Frame&, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const Vec hat = x.tail(n - 1);
    const double rho = hat.norm();
    if (!(rho > 0.0)) throw DegenerateLevelSet("hat radius vanishes on the axis");
    ScalarJet j;
    j.v = rho;
    j.dv = Vec::Zero(n);
    j.dv.tail(n - 1) = hat / rho;
    j.d2v = Mat::Zero(n, n);
    j.d2v.bottomRightCorner(n - 1, n - 1) =
        (Mat::Identity(n - 1, n - 1) - hat * hat.transpose() / (rho * rho)) / rho;
    return j;
  };
  return f;
}

inline ScalarField radius_field() {
  ScalarField f;
  f.analytic = true;
  f.jet = [](const Frame&, const Vec& x) {
    const double r = x.norm();
    if (!(r > 0.0)) throw DegenerateLevelSet("radius vanishes at the origin");
    ScalarJet j;
    j.v = r;
    j.dv = x / r;
    j.d2v = (Mat::Identity(x.size(), x.size()) - x * x.transpose() / (r * r)) / r;
    return j;
  };
  return f;
}

inline void require_hyperbolic(const MetricModel& model, const char* who) {
  if (model.background != BackgroundKind::Hyperbolic)
    throw ValidationError(std::string(who) + " needs a hyperbolic-background model");
}

inline void require_euclidean(const MetricModel& model, const char* who) {
  if (model.background != BackgroundKind::Euclidean)
    throw ValidationError(std::string(who) + " needs a Euclidean-background model");
}

// Measured bound on r^q (|h|_b + |nabla h|_b) over a ladder of leaf points;
// feeds the analytic truncation tail.
inline double measure_decay_constant(const MetricModel& model, const Frame& frame, double L) {
  if (model.is_background()) return 0.0;
  const int n = model.n;
  std::vector<Vec> dirs;
  for (int a = 0; a < n - 1; ++a) {
    dirs.push_back(Vec::Unit(n - 1, a));
    dirs.push_back(-Vec::Unit(n - 1, a));
  }
  dirs.push_back(Vec::Ones(n - 1).normalized());
  double c = 0.0;
  for (double rho = 0.25; rho <= 5000.0; rho *= 2.0) {
    for (const Vec& u : dirs) {
      Vec x(n);
      x[0] = L;
      x.tail(n - 1) = rho * u;
      const double r = radial_coordinate({ChartId::Horospherical, x});
      const MassFormContext ctx = mass_form_context(model, frame, x);
      c = std::max(c, std::pow(r, model.q) * (ctx.h_norm + ctx.nabla_h_norm));
    }
  }
  return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spheres

// integral of U(V)(nu0) dsigma_b over the coordinate sphere S_r, outward
// b-unit normal nu0 = (t/r) z.
inline MassReading sphere_mass_integral(const MetricModel& model, const StaticPotential& V,
                                        double r, const Orders& orders = {}, int workers = 0) {
  detail::require_hyperbolic(model, "sphere_mass_integral");
  const Frame fr = plain_frame(ChartId::Hyperboloidal);
  const SurfacePair sp = sphere_surface(fr, r, model.n, orders);
  const QuadResult q = integrate_surface(
      sp.full, sp.half,
      [&](const Frame& frame, const Vec& x, const Mat& T) {
        const MassFormContext c = mass_form_context(model, frame, x);
        const double rr = x.norm();
        const Vec nu0 = (std::sqrt(1.0 + rr * rr) / rr) * x;
        return mass_one_form(c, potential_jet(V, frame, x), nu0) * area_density(c.b, T);
      },
      workers);
  MassReading out;
  out.value = q.value;
  out.quad_error = q.quad_error;
  out.param_name = "r";
  out.param = r;
  out.orders = orders;
  return out;
}

struct ComponentSeries {
  std::vector<MassReading> readings;
  FitResult fit;
};

struct MassVector {
  double p0 = 0.0;
  Vec p;
  double minkowski_sq = 0.0;
  bool positive_mass_ok = true;  // diagnostic p0 >= |p| check, not an assertion
  ComponentSeries time_series;
  std::vector<ComponentSeries> space_series;
};

// Sphere integrals of U(t), U(z_i) over a geometric r-ladder, extrapolated
// in ln r.
inline MassVector mass_vector(const MetricModel& model, const std::vector<double>& r_list,
                              const Orders& orders = {}, int workers = 0) {
  detail::require_hyperbolic(model, "mass_vector");
  if (r_list.size() < 3) throw ValidationError("mass_vector needs at least 3 radii");
  for (size_t i = 1; i < r_list.size(); ++i)
    if (!(r_list[i] > r_list[i - 1])) throw ValidationError("mass_vector radii must increase");

  const int n = model.n;
  auto component = [&](const StaticPotential& V, const std::vector<double>* scales) {
    ComponentSeries s;
    std::vector<SeriesPoint> pts;
    for (size_t i = 0; i < r_list.size(); ++i) {
      MassReading m = sphere_mass_integral(model, V, r_list[i], orders, workers);
      // A component that vanishes by symmetry still carries summation noise
      // at the scale of the unsigned integrand; floor the noise there so the
      // converged branch absorbs it.
      const double floor0 =
          scales ? 1e-13 * ((*scales)[i] + std::abs(m.value)) : 0.0;
      pts.push_back({std::log(r_list[i]), m.value, std::max(m.quad_error, floor0)});
      s.readings.push_back(std::move(m));
    }
    s.fit = extrapolate(pts);
    return s;
  };

  MassVector out;
  out.time_series = component(StaticPotential::time(n), nullptr);
  out.p0 = out.time_series.fit.limit;
  std::vector<double> scales;
  for (const MassReading& m : out.time_series.readings) scales.push_back(std::abs(m.value));
  out.p = Vec::Zero(n);
  double unc = out.time_series.fit.uncertainty;
  for (int i = 0; i < n; ++i) {
    out.space_series.push_back(component(StaticPotential::space(n, i), &scales));
    out.p[i] = out.space_series.back().fit.limit;
    unc = std::max(unc, out.space_series.back().fit.uncertainty);
  }
  out.minkowski_sq = out.p0 * out.p0 - out.p.squaredNorm();
  const double tol = 4.0 * unc * (std::abs(out.p0) + out.p.lpNorm<1>()) + 1e-18;
  out.positive_mass_ok = out.p0 >= -unc && out.minkowski_sq >= -tol;
  return out;
}

// ---------------------------------------------------------------------------
// Horospheres and truncated faces

namespace detail {

// 2 V (H_b - H_g) dsigma_g as a density against the face parameters; exact
// zero on pure backgrounds.
template <class Region>
double face_curvature_density(const MetricModel& model, const StaticPotential& V,
                              const Region& keep, const Frame& frame, const Vec& x, const Mat& T) {
  if (!keep(x)) return 0.0;
  const MassFormContext c = mass_form_context(model, frame, x);
  const CurvatureSplit cs = curvature_split(c, potential_jet(V, frame, x), +1);
  return 2.0 * cs.V * (-cs.dH) * cs.Jg * area_density(c.b, T);
}

struct AllNodes {
  bool operator()(const Vec&) const { return true; }
};

}  // namespace detail

// 2 int_{H_L, rho <= rho_max} V (H_b - H_g) dsigma_g toward {y_1 = 0}, with
// the analytic truncation tail.  rho_max <= 0 selects the automatic policy:
// start at 1 and double until tail_bound < 1e-3 |value| (at most 12
// doublings).
inline MassReading horosphere_mass(const MetricModel& model, const Vec& a, double L,
                                   double rho_max = 0.0, const Orders& orders = {},
                                   int workers = 0) {
  detail::require_hyperbolic(model, "horosphere_mass");
  if (static_cast<int>(a.size()) != model.n || std::abs(a.norm() - 1.0) > 1e-10)
    throw ValidationError("horosphere direction must be a unit n-vector");
  if (!(std::sinh(L) > model.r_min))
    throw DomainError("horosphere leaf at L = " + std::to_string(L) +
                      " dips inside the model domain (needs sinh L > r_min)");

  const Frame frame{ChartId::Horospherical, rotation_to_axis(a)};
  StaticPotential V;
  V.c_t = 1.0;
  V.a = a;
  const double C_h = detail::measure_decay_constant(model, frame, L);

  const bool fixed = rho_max > 0.0;
  double rho = fixed ? rho_max : 1.0;
  MassReading out;
  out.param_name = "L";
  out.param = L;
  out.orders = orders;
  for (int attempt = 0;; ++attempt) {
    const SurfacePair sp = horoface_surface(frame, L, rho, model.n, orders);
    const QuadResult q = integrate_surface(
        sp.full, sp.half,
        [&](const Frame& fr, const Vec& x, const Mat& T) {
          return detail::face_curvature_density(model, V, detail::AllNodes{}, fr, x, T);
        },
        workers);
    out.value = q.value;
    out.quad_error = q.quad_error;
    out.tail_bound = C_h > 0.0 ? tail_bound_horosphere(model.n, model.q, L, rho, C_h) : 0.0;
    out.rho_max = rho;
    if (fixed || out.tail_bound <= 1e-3 * std::abs(out.value) || attempt >= 12) break;
    rho *= 2.0;
  }
  if (out.tail_bound > 10.0 * std::abs(out.value) && out.tail_bound > 1e-14)
    throw TailDominates("horosphere tail bound " + std::to_string(out.tail_bound) +
                        " dominates the integral " + std::to_string(out.value) +
                        "; increase rho_max");
  return out;
}

// 2 int_{Sigma_L} V (H_b - H_g) dsigma_g over the truncated face
// {x1 = L, |xhat| < sigma} for the e_1 direction; finite domain, no tail.
inline MassReading face_mass(const MetricModel& model, double L, double sigma,
                             const Orders& orders = {}, int workers = 0) {
  detail::require_hyperbolic(model, "face_mass");
  if (!(sigma > 0.0)) throw ValidationError("face truncation radius must be positive");
  if (!(std::sinh(L) > model.r_min))
    throw DomainError("face at L = " + std::to_string(L) + " dips inside the model domain");
  const Frame frame = plain_frame(ChartId::Horospherical);
  const StaticPotential V = StaticPotential::direction(Vec::Unit(model.n, 0));
  const SurfacePair sp = horoface_surface(frame, L, sigma, model.n, orders);
  const QuadResult q = integrate_surface(
      sp.full, sp.half,
      [&](const Frame& fr, const Vec& x, const Mat& T) {
        return detail::face_curvature_density(model, V, detail::AllNodes{}, fr, x, T);
      },
      workers);
  MassReading out;
  out.value = q.value;
  out.quad_error = q.quad_error;
  out.param_name = "L";
  out.param = L;
  out.sigma = sigma;
  out.orders = orders;
  return out;
}

// ---------------------------------------------------------------------------
// sigma(L) growth condition

struct SigmaCondition {
  bool satisfied = false;
  double exponent = 0.0;  // k (n-2-2q) + (n-1-q); decay of the lateral error
  double margin = 0.0;    // -exponent
  double k_universal = 0.0;  // (n-2)/4, q-independent sufficient choice
  double k_theorem = 0.0;    // n/2, the main-theorem choice
};

// Checks whether sigma(L) = e^{kL} suppresses the lateral contribution: the
// truncation error exponent must be negative (automatic once q > n-1).
inline SigmaCondition sigma_condition_check(int n, double q, double k) {
  if (!(q > 0.5 * n)) throw ValidationError("sigma condition needs q > n/2");
  if (!(k > 0.0)) throw ValidationError("sigma exponent k must be positive");
  SigmaCondition out;
  out.exponent = k * (n - 2 - 2.0 * q) + (n - 1 - q);
  out.margin = -out.exponent;
  out.satisfied = (q > n - 1) || (out.exponent < 0.0);
  out.k_universal = 0.25 * (n - 2);
  out.k_theorem = 0.5 * n;
  return out;
}

// ---------------------------------------------------------------------------
// Parabolic cylinder boundary

// Leading decay exponents in L (with sigma = e^{kL}) of the cylinder
// contributions, from the curvature/measure/falloff bookkeeping of the
// face-wall-edge estimates: r ~ e^L rho^2 on the top leaf, r ~ max(e^L,
// e^{(2k-1)L}) on the bottom edge, V = e^{x1}.
struct CylinderDecayPrediction {
  double f_minus = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double lateral = 0.0;
};

inline CylinderDecayPrediction cylinder_decay_prediction(int n, double q, double k) {
  CylinderDecayPrediction p;
  p.f_minus = -(1.0 + q);
  p.e_plus = (n - 1 - q) + k * (n - 2 - 2.0 * q);
  p.e_minus = -1.0 + (k - 1.0) * (n - 2) - q * std::max(1.0, 2.0 * k - 1.0);
  p.lateral =
      std::max(k * (n - 2 - 2.0 * q) + std::max({0.0, n - 1 - q, q - n + 1.0}),
               k * (n - 3 - 2.0 * q) + std::max({0.0, n - 2 - q, q - n + 2.0}));
  return p;
}

struct FaceReport {
  double direct = 0.0;           // integral of U(V)(nu0) dsigma_b, outward nu0
  double quad_error = 0.0;
  double curvature_terms = 0.0;  // integral of (mean + trace + A.h) terms
  double remainder_scale = 0.0;  // integral of the pointwise remainder bound
};

struct CylinderFluxReport {
  FaceReport f_plus, f_minus, lateral;
  double edge_plus = 0.0;   // face-side flux of V X over E+ (the E+ term)
  double edge_minus = 0.0;  // face-side flux of V X over E-
  double lateral_edge_plus = 0.0;   // wall-side conormal fluxes
  double lateral_edge_minus = 0.0;
  double edge_plus_quad_error = 0.0;
  double edge_minus_quad_error = 0.0;
  double total = 0.0;             // direct route
  double total_decomposed = 0.0;  // curvature terms minus all edge fluxes
  double consistency_gap = 0.0;
  double consistency_bound = 0.0;
  bool consistent = false;
  CylinderDecayPrediction predicted;
};

// Direct and decomposed flux accounting over the boundary of the parabolic
// cylinder {|x1| <= L, |xhat| <= sigma}.
inline CylinderFluxReport cylinder_flux_report(const MetricModel& model, const StaticPotential& V,
                                               double L, double sigma, const Orders& orders = {},
                                               int workers = 0) {
  detail::require_hyperbolic(model, "cylinder_flux_report");
  if (!(sigma > 0.0)) throw ValidationError("cylinder radius must be positive");
  if (!(std::sinh(L) > model.r_min))
    throw DomainError("cylinder at L = " + std::to_string(L) + " dips inside the model domain");
  const Frame frame = plain_frame(ChartId::Horospherical);
  const int n = model.n;

  CylinderFluxReport rep;
  rep.predicted = cylinder_decay_prediction(n, model.q, std::log(sigma) / L);

  // Faces: one decomposition sample per node feeds the direct integral, the
  // curvature-term route, and the remainder budget.
  auto face_pass = [&](const SurfacePair& sp, const ScalarField& phi, int orientation) {
    Vec value, err;
    integrate_surface_multi(
        sp.full, sp.half, 3,
        [&](const Frame& fr, const Vec& x, const Mat& T) {
          const MassOneFormSample s =
              decomposition(model, V, phi, fr, x, orientation, /*with_divergence=*/false);
          const double db = area_density(model.background_jet(fr, x, false).g, T);
          Vec v(3);
          v << s.value * db, (s.mean_curv_term + s.trace_term + s.a_dot_h_term) * db,
              s.remainder_scale * db;
          return v;
        },
        value, err, workers);
    FaceReport f;
    f.direct = value[0];
    f.quad_error = err[0];
    f.curvature_terms = value[1];
    f.remainder_scale = value[2];
    return f;
  };

  const ScalarField x1_field = detail::coordinate_field(0);
  const ScalarField rho_field = detail::hat_radius_field();
  rep.f_plus = face_pass(horoface_surface(frame, L, sigma, n, orders), x1_field, +1);
  rep.f_minus = face_pass(horoface_surface(frame, -L, sigma, n, orders), x1_field, -1);
  rep.lateral = face_pass(lateral_surface(frame, L, sigma, n, orders), rho_field, +1);

  // Edges: each carries the face-side flux (conormal = outward radial in the
  // leaf) and the wall-side flux (conormal = +-e_1 along the wall).
  auto edge_pass = [&](double x1_level, int face_orientation, int wall_sign) {
    const SurfacePair sp = edge_surface(frame, x1_level, sigma, n, orders);
    Vec value, err;
    integrate_surface_multi(
        sp.full, sp.half, 2,
        [&](const Frame& fr, const Vec& x, const Mat& T) {
          const MassFormContext c = mass_form_context(model, fr, x);
          const ScalarJet vj = potential_jet(V, fr, x);
          const double db = area_density(c.b, T);
          const double e1 = std::exp(-x[0]);
          Vec eta_face = Vec::Zero(n);
          eta_face.tail(n - 1) = (e1 / sigma) * x.tail(n - 1);
          const Vec nu_face = face_orientation * Vec::Unit(n, 0);
          const Vec nu_wall = eta_face;  // outward wall normal has the same form
          const Vec eta_wall = wall_sign * Vec::Unit(n, 0);
          const Vec Xf = tangential_dual_X(c, nu_face);
          const Vec Xw = tangential_dual_X(c, nu_wall);
          Vec v(2);
          v << vj.v * eta_face.dot(c.b * Xf) * db, vj.v * eta_wall.dot(c.b * Xw) * db;
          return v;
        },
        value, err, workers);
    return std::array<double, 3>{value[0], value[1], err[0]};
  };

  const auto ep = edge_pass(L, +1, +1);
  const auto em = edge_pass(-L, -1, -1);
  rep.edge_plus = ep[0];
  rep.edge_minus = em[0];
  rep.lateral_edge_plus = ep[1];
  rep.lateral_edge_minus = em[1];
  rep.edge_plus_quad_error = ep[2];
  rep.edge_minus_quad_error = em[2];

  rep.total = rep.f_plus.direct + rep.f_minus.direct + rep.lateral.direct;
  rep.total_decomposed = rep.f_plus.curvature_terms - rep.edge_plus +
                         rep.f_minus.curvature_terms - rep.edge_minus +
                         rep.lateral.curvature_terms - rep.lateral_edge_plus -
                         rep.lateral_edge_minus;
  rep.consistency_gap = std::abs(rep.total - rep.total_decomposed);
  const double rem =
      rep.f_plus.remainder_scale + rep.f_minus.remainder_scale + rep.lateral.remainder_scale;
  const double noise = rep.f_plus.quad_error + rep.f_minus.quad_error + rep.lateral.quad_error;
  // The pointwise remainder carries an unquantified metric-dependent
  // constant; 10 covers the built-in families with margin.
  rep.consistency_bound = 10.0 * rem + 4.0 * noise + 1e-10 * (1.0 + std::abs(rep.total));
  rep.consistent = rep.consistency_gap <= rep.consistency_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Footprint regions

struct RegionSpec {
  std::function<bool(double, const Vec&)> contains;  // (y1, yhat)

  static RegionSpec everything() {
    return RegionSpec{[](double, const Vec&) { return true; }};
  }
  static RegionSpec nothing() {
    return RegionSpec{[](double, const Vec&) { return false; }};
  }
  // {yhat[axis] > 0}
  static RegionSpec half_space(int hat_axis) {
    return RegionSpec{[hat_axis](double, const Vec& yhat) { return yhat[hat_axis] > 0.0; }};
  }
  // Solid cone about a unit axis in (y1, yhat)-space, half-angle in the
  // Euclidean geometry of the half-space coordinates.
  static RegionSpec cone(const Vec& axis, double half_angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-10)
      throw ValidationError("cone axis must be a unit vector");
    if (!(half_angle > 0.0 && half_angle < M_PI / 2))
      throw ValidationError("cone half-angle must lie in (0, pi/2)");
    const double c = std::cos(half_angle);
    return RegionSpec{[axis, c](double y1, const Vec& yhat) {
      const int n = static_cast<int>(yhat.size()) + 1;
      Vec v(n);
      v[0] = y1;
      v.tail(n - 1) = yhat;
      const double vn = v.norm();
      return vn > 0.0 && axis.dot(v) >= c * vn;
    }};
  }
  // {lo <= yhat[axis] <= hi}
  static RegionSpec slab(int hat_axis, double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("slab bounds must satisfy lo < hi");
    return RegionSpec{[hat_axis, lo, hi](double, const Vec& yhat) {
      return yhat[hat_axis] >= lo && yhat[hat_axis] <= hi;
    }};
  }
  static RegionSpec complement(const RegionSpec& r) {
    auto inner = r.contains;
    return RegionSpec{[inner](double y1, const Vec& yhat) { return !inner(y1, yhat); }};
  }
};

// Theta(U, L) = e^{-L(n-1)} |U cap Sigma_L|_b: the Euclidean footprint area
// of the region on the truncated face.  Membership is tested in half-space
// coordinates, where the face sits at y1 = e^{-L} with yhat = xhat.
inline double theta(const RegionSpec& region, double L, double sigma, int n,
                    const Orders& orders = {}, int workers = 0) {
  if (!(sigma > 0.0)) throw ValidationError("theta needs a positive footprint radius");
  const Frame frame = plain_frame(ChartId::Horospherical);
  const SurfaceGrid grid = horoface_grid(frame, L, sigma, n, orders);
  const double y1 = std::exp(-L);
  const double scale = std::exp(-L * (n - 1));
  return scale * integrate_grid(
                     grid,
                     [&](const Frame& fr, const Vec& x, const Mat& T) -> double {
                       if (!region.contains(y1, Vec(x.tail(n - 1)))) return 0.0;
                       const Mat b = background_metric_jet(BackgroundKind::Hyperbolic, fr, x,
                                                           false)
                                         .g;
                       return area_density(b, T);
                     },
                     workers);
}

// 2 int_{Sigma_L \ U} V (H_b - H_g) dsigma_g.  The Theta-decay hypothesis is
// probed by a short L-ladder; a region whose footprint does not shrink fast
// enough is flagged in the diagnostic, not rejected.
inline MassReading excluded_region_mass(const MetricModel& model, const RegionSpec& region,
                                        double L, double sigma, const Orders& orders = {},
                                        int workers = 0) {
  detail::require_hyperbolic(model, "excluded_region_mass");
  if (!(std::sinh(L) > model.r_min))
    throw DomainError("face at L = " + std::to_string(L) + " dips inside the model domain");
  const Frame frame = plain_frame(ChartId::Horospherical);
  const StaticPotential V = StaticPotential::direction(Vec::Unit(model.n, 0));
  const double y1 = std::exp(-L);
  auto keep = [&](const Vec& x) {
    return !region.contains(y1, Vec(x.tail(model.n - 1)));
  };
  const SurfacePair sp = horoface_surface(frame, L, sigma, model.n, orders);
  const QuadResult q = integrate_surface(
      sp.full, sp.half,
      [&](const Frame& fr, const Vec& x, const Mat& T) {
        return detail::face_curvature_density(model, V, keep, fr, x, T);
      },
      workers);

  MassReading out;
  out.value = q.value;
  out.quad_error = q.quad_error;
  out.param_name = "L";
  out.param = L;
  out.sigma = sigma;
  out.orders = orders;

  // Fitted Theta decay vs the e^{L(q-n)} threshold.
  const Orders probe = orders.halved();
  std::vector<double> ls{L - 1.0, L - 0.5, L}, lnth;
  bool vanished = false;
  for (double l : ls) {
    const double th = theta(region, l, sigma, model.n, probe, workers);
    if (th <= 0.0) {
      vanished = true;
      break;
    }
    lnth.push_back(std::log(th));
  }
  if (!vanished) {
    const double slope = fit_slope(ls, lnth);
    if (slope >= (model.q - model.n) - 0.1)
      out.diagnostic = "footprint decay exponent " + std::to_string(slope) +
                       " does not beat e^{L(q-n)}; the excluded mass may differ from the "
                       "full-face limit";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotically flat appendix formulas

// (1 / (2 (n-1) omega_{n-1})) int_{S_r} (g_ij,j - g_jj,i) nu0^i dsigma_0 with
// the Euclidean normal and area element.
inline double adm_flux(const MetricModel& model, double r, const Orders& orders = {},
                       int workers = 0) {
  detail::require_euclidean(model, "adm_flux");
  const int n = model.n;
  const Frame fr = plain_frame(ChartId::Cartesian);
  const SurfacePair sp = sphere_surface(fr, r, n, orders);
  const Mat id = Mat::Identity(n, n);
  const QuadResult q = integrate_surface(
      sp.full, sp.half,
      [&](const Frame& frame, const Vec& x, const Mat& T) {
        const MetricJet mj = model.metric_jet(frame, x, false);
        const Vec nu = x / x.norm();
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += (mj.dg[j](i, j) - mj.dg[i](j, j)) * nu[i];
        return s * area_density(id, T);
      },
      workers);
  return q.value / (2.0 * (n - 1) * unit_sphere_area(n - 1));
}

// (1 / ((n-1) omega_{n-1})) [ int_{S_r} ((n-1)/r - H_g) dsigma_g
//   + (1/r)(|S_r|_delta - |S_r|_g) ].
inline double adm_geometric(const MetricModel& model, double r, const Orders& orders = {},
                            int workers = 0) {
  detail::require_euclidean(model, "adm_geometric");
  const int n = model.n;
  const Frame fr = plain_frame(ChartId::Cartesian);
  const SurfacePair sp = sphere_surface(fr, r, n, orders);
  const Mat id = Mat::Identity(n, n);
  const ScalarField rad = detail::radius_field();
  Vec value, err;
  integrate_surface_multi(
      sp.full, sp.half, 2,
      [&](const Frame& frame, const Vec& x, const Mat& T) {
        const MassFormContext c = mass_form_context(model, frame, x);
        const CurvatureSplit cs = curvature_split(c, rad.eval(frame, x), +1);
        const double dd = area_density(id, T);
        const double curv = ((n - 1) / r - cs.Hb) - cs.dH;  // (n-1)/r - H_g
        Vec v(2);
        v << curv * cs.Jg * dd, (1.0 - cs.Jg) * dd;
        return v;
      },
      value, err, workers);
  return (value[0] + value[1] / r) / ((n - 1) * unit_sphere_area(n - 1));
}

struct AhGeometric {
  double p0 = 0.0;
  Vec p;
  double quad_error = 0.0;
};

// Hyperbolic analogue: p0 ~ 2 [ int_{S_r} t ((t/r)(n-1) - H_g) dsigma_g
//   + (1/r)(|S_r|_b - |S_r|_g) ], p_i ~ 2 int_{S_r} z_i ((t/r)(n-1) - H_g)
// dsigma_g.
inline AhGeometric ah_geometric(const MetricModel& model, double r, const Orders& orders = {},
                                int workers = 0) {
  detail::require_hyperbolic(model, "ah_geometric");
  const int n = model.n;
  const Frame fr = plain_frame(ChartId::Hyperboloidal);
  const SurfacePair sp = sphere_surface(fr, r, n, orders);
  const ScalarField rad = detail::radius_field();
  const double t = std::sqrt(1.0 + r * r);
  Vec value, err;
  integrate_surface_multi(
      sp.full, sp.half, n + 2,
      [&](const Frame& frame, const Vec& x, const Mat& T) {
        const MassFormContext c = mass_form_context(model, frame, x);
        const CurvatureSplit cs = curvature_split(c, rad.eval(frame, x), +1);
        const double db = area_density(c.b, T);
        const double curv = ((n - 1) * t / r - cs.Hb) - cs.dH;  // H_b closed - H_g
        Vec v(n + 2);
        v[0] = t * curv * cs.Jg * db;
        v[1] = (1.0 - cs.Jg) * db;
        for (int i = 0; i < n; ++i) v[2 + i] = x[i] * curv * cs.Jg * db;
        return v;
      },
      value, err, workers);
  AhGeometric out;
  out.p0 = 2.0 * (value[0] + value[1] / r);
  out.p = 2.0 * value.tail(n);
  out.quad_error = 2.0 * (err[0] + err[1] / r);
  return out;
}

}  // namespace horomass
