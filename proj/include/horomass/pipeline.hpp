#pragma once

// Config-driven experiment runners shared by the CLI and the acceptance
// suite: model construction, evaluator sweeps, and the CSV/SVG emission for
// the mass, theta, and cylinder-report commands.

#include "horomass/config.hpp"
#include "horomass/evaluators.hpp"
#include "horomass/report.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace horomass {

struct ModelBundle {
  MetricModel model;
  std::string warning;  // non-fatal notes (node-count growth for n >= 5)
};

namespace detail {

inline Vec parse_vec(const Config& cfg, const std::string& key, int n) {
  const std::vector<double> v = cfg.get_list(key);
  if (static_cast<int>(v.size()) != n)
    throw ConfigError("config key '" + key + "' needs " + std::to_string(n) + " components");
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = v[i];
  return out;
}

inline Vec unit_or_throw(const std::string& key, Vec v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw ConfigError("config key '" + key + "' must be a nonzero vector");
  return v / norm;
}

}  // namespace detail

inline ModelBundle model_from_config(const Config& cfg) {
  ModelBundle out;
  const int n = cfg.get_int_or("model.n", 3);
  const std::string name = cfg.get_or("model.name", "hyperbolic");

  if (name == "ads" || name == "ads_schwarzschild") {
    out.model = ads_schwarzschild(n, cfg.get_double_or("model.m", 1.0));
  } else if (name == "hyperbolic") {
    out.model = hyperbolic_background(n);
  } else if (name == "euclidean") {
    out.model = euclidean_background(n);
  } else if (name == "schwarzschild_af") {
    out.model = schwarzschild_af(n, cfg.get_double_or("model.m", 1.0));
  } else if (name == "angular_bump") {
    PerturbationSpec spec;
    spec.kind = "angular_bump";
    spec.q = cfg.get_double_or("model.q", static_cast<double>(n));
    spec.amplitude = cfg.get_double_or("model.amplitude", 0.1);
    spec.axis = cfg.has("model.axis")
                    ? detail::unit_or_throw("model.axis",
                                            detail::parse_vec(cfg, "model.axis", n))
                    : Vec(Vec::Unit(n, 0));
    spec.mu0 = cfg.get_double_or("model.mu0", 0.0);
    spec.r_min = cfg.get_double_or("model.r_min", 1.0);
    out.model = custom_perturbation(n, spec);
  } else if (name == "ads_tail") {
    PerturbationSpec spec;
    spec.kind = "ads_tail";
    spec.lambda = cfg.get_double_or("model.lambda", 1.0);
    spec.m = cfg.get_double_or("model.m", 1.0);
    out.model = custom_perturbation(n, spec);
  } else {
    throw ConfigError("unknown config value for key 'model.name': '" + name + "'");
  }

  if (n >= 5)
    out.warning = "n = " + std::to_string(n) +
                  ": tensor-product sphere rules grow as order^(n-1); expect large node counts";
  return out;
}

inline Orders orders_from_config(const Config& cfg) {
  Orders o;
  o.polar = cfg.get_int_or("orders.polar", o.polar);
  o.azimuth = cfg.get_int_or("orders.azimuth", o.azimuth);
  o.radial = cfg.get_int_or("orders.radial", o.radial);
  o.axial = cfg.get_int_or("orders.axial", o.axial);
  if (o.polar < 2 || o.azimuth < 4 || o.radial < 2 || o.axial < 2)
    throw ConfigError("config orders.* values are too small to integrate anything");
  return o;
}

// ---------------------------------------------------------------------------
// mass sweeps

struct SweepResult {
  std::string evaluator;
  std::string param_name;  // "L" or "r"
  std::vector<SweepRow> rows;
  SweepFitSummary fit;
  std::string csv;
  std::string warning;
};

namespace detail {

// Three-point exponential fit over the sweep; fit columns stay empty when the
// ladder is too short, unevenly spaced, or not single-exponential.
inline SweepFitSummary try_fit(const std::vector<SeriesPoint>& pts) {
  SweepFitSummary out;
  if (pts.size() < 3) return out;
  const double delta = pts[1].param - pts[0].param;
  if (!(delta > 0.0)) return out;
  for (size_t i = 1; i < pts.size(); ++i)
    if (std::abs((pts[i].param - pts[i - 1].param) - delta) > 1e-9 * std::abs(delta)) return out;
  try {
    const FitResult fit = extrapolate(pts);
    out.valid = true;
    out.limit = fit.limit;
    out.rate_valid = fit.rate_valid;
    out.rate = fit.rate;
    out.residual = fit.residual;
  } catch (const ExtrapolationUnstable&) {
  }
  return out;
}

inline const std::vector<std::string>& mass_config_keys() {
  static const std::vector<std::string> keys = {
      "evaluator",      "direction",     "normalize",    "model.name",  "model.m",
      "model.n",        "model.q",       "model.amplitude", "model.axis", "model.mu0",
      "model.r_min",    "model.lambda",  "sweep.L",      "sweep.r",     "sweep.sigma_k",
      "sweep.rho_max",  "orders.polar",  "orders.azimuth", "orders.radial", "orders.axial",
      "output.csv",     "output.svg"};
  return keys;
}

}  // namespace detail

inline SweepResult run_mass_sweep(const Config& cfg, int workers = 0) {
  cfg.require_known(detail::mass_config_keys());
  const ModelBundle mb = model_from_config(cfg);
  const MetricModel& model = mb.model;
  const int n = model.n;
  const Orders orders = orders_from_config(cfg);
  const std::string evaluator = cfg.get("evaluator");
  const bool normalize = cfg.get_bool_or("normalize", false);
  // The mass convention carries no sphere-area normalization; the flag
  // rescales for comparison with ADM-style conventions.  The ADM evaluators
  // are already normalized, so the flag leaves them alone.
  const double scale = normalize ? 1.0 / (2.0 * (n - 1) * unit_sphere_area(n - 1)) : 1.0;

  SweepResult out;
  out.evaluator = evaluator;
  out.warning = mb.warning;

  std::vector<SeriesPoint> pts;
  const auto push = [&](double param, double fit_param, double value, double quad_error,
                        double tail_bound) {
    out.rows.push_back({param, value, quad_error, tail_bound});
    pts.push_back({fit_param, value, std::max(quad_error, tail_bound)});
  };

  if (evaluator == "horosphere" || evaluator == "face") {
    out.param_name = "L";
    const std::vector<double> Ls = cfg.get_list("sweep.L");
    if (evaluator == "horosphere") {
      Vec a = cfg.has("direction")
                  ? detail::unit_or_throw("direction", detail::parse_vec(cfg, "direction", n))
                  : Vec(Vec::Unit(n, 0));
      const double rho_max = cfg.get_double_or("sweep.rho_max", 0.0);
      for (double L : Ls) {
        const MassReading m = horosphere_mass(model, a, L, rho_max, orders, workers);
        push(L, L, scale * m.value, scale * m.quad_error, scale * m.tail_bound);
      }
    } else {
      const double k = cfg.get_double_or("sweep.sigma_k", 1.5);
      if (!(k > 0.0)) throw ConfigError("config key 'sweep.sigma_k' must be positive");
      for (double L : Ls) {
        const MassReading m = face_mass(model, L, std::exp(k * L), orders, workers);
        push(L, L, scale * m.value, scale * m.quad_error, 0.0);
      }
    }
  } else if (evaluator == "sphere" || evaluator == "ah_geometric" || evaluator == "adm_flux" ||
             evaluator == "adm_geometric") {
    out.param_name = "r";
    const std::vector<double> rs = cfg.get_list("sweep.r");
    for (double r : rs) {
      if (!(r > 0.0)) throw ConfigError("config key 'sweep.r' needs positive radii");
      if (evaluator == "sphere") {
        const MassReading m =
            sphere_mass_integral(model, StaticPotential::time(n), r, orders, workers);
        push(r, std::log(r), scale * m.value, scale * m.quad_error, 0.0);
      } else if (evaluator == "ah_geometric") {
        const AhGeometric g = ah_geometric(model, r, orders, workers);
        push(r, std::log(r), scale * g.p0, scale * g.quad_error, 0.0);
      } else if (evaluator == "adm_flux") {
        push(r, std::log(r), adm_flux(model, r, orders, workers), 0.0, 0.0);
      } else {
        push(r, std::log(r), adm_geometric(model, r, orders, workers), 0.0, 0.0);
      }
    }
  } else {
    throw ConfigError("unknown config value for key 'evaluator': '" + evaluator +
                      "' (expected horosphere, face, sphere, ah_geometric, adm_flux, or "
                      "adm_geometric)");
  }

  out.fit = detail::try_fit(pts);
  out.csv = to_csv(sweep_table(evaluator, out.param_name, out.rows, out.fit));
  return out;
}

inline std::string sweep_svg(const SweepResult& sweep) {
  ChartSeries series;
  for (const SweepRow& r : sweep.rows) {
    series.x.push_back(r.param);
    series.y.push_back(r.value);
  }
  return svg_line_chart(sweep.evaluator + " sweep", sweep.param_name, "value", series,
                        sweep.fit.valid, sweep.fit.limit);
}

// ---------------------------------------------------------------------------
// theta command

namespace detail {

inline const std::vector<std::string>& theta_config_keys() {
  static const std::vector<std::string> keys = {
      "model.name",    "model.m",        "model.n",       "model.q",      "model.amplitude",
      "model.axis",    "model.mu0",      "model.r_min",   "model.lambda", "sweep.L",
      "sweep.sigma",   "region.kind",    "region.axis",   "region.half_angle",
      "region.hat_axis", "region.lo",    "region.hi",     "orders.polar", "orders.azimuth",
      "orders.radial", "orders.axial",   "output.csv"};
  return keys;
}

inline RegionSpec region_from_config(const Config& cfg, int n) {
  const std::string kind = cfg.get_or("region.kind", "everything");
  if (kind == "everything") return RegionSpec::everything();
  if (kind == "nothing") return RegionSpec::nothing();
  if (kind == "half_space") return RegionSpec::half_space(cfg.get_int_or("region.hat_axis", 0));
  if (kind == "cone") {
    const Vec axis = cfg.has("region.axis")
                         ? unit_or_throw("region.axis", parse_vec(cfg, "region.axis", n))
                         : Vec(Vec::Unit(n, 0));
    return RegionSpec::cone(axis, cfg.get_double_or("region.half_angle", 0.7));
  }
  if (kind == "slab")
    return RegionSpec::slab(cfg.get_int_or("region.hat_axis", 0),
                            cfg.get_double_or("region.lo", -1.0),
                            cfg.get_double_or("region.hi", 1.0));
  throw ConfigError("unknown config value for key 'region.kind': '" + kind + "'");
}

}  // namespace detail

// Theta sweep rows, one fitted-exponent row against the e^{L(q-n)} threshold,
// then the excluded-region mass sweep (with its own extrapolation columns).
inline std::string run_theta(const Config& cfg, int workers = 0) {
  cfg.require_known(detail::theta_config_keys());
  const ModelBundle mb = model_from_config(cfg);
  const MetricModel& model = mb.model;
  const int n = model.n;
  const Orders orders = orders_from_config(cfg);
  const RegionSpec region = detail::region_from_config(cfg, n);
  const std::vector<double> Ls = cfg.get_list("sweep.L");
  const double sigma = cfg.get_double_or("sweep.sigma", 4.0);

  std::vector<SweepRow> theta_rows;
  std::vector<double> ls, lnth;
  bool positive = true;
  for (double L : Ls) {
    const double th = theta(region, L, sigma, n, orders, workers);
    theta_rows.push_back({L, th, 0.0, 0.0});
    if (th > 0.0) {
      ls.push_back(L);
      lnth.push_back(std::log(th));
    } else {
      positive = false;
    }
  }

  Table t = sweep_table("theta", "L", theta_rows, SweepFitSummary{});
  // Fitted footprint exponent vs the decay threshold q - n: theta must decay
  // faster than e^{L(q-n)} for the excluded mass to keep the full-face limit.
  if (positive && ls.size() >= 2) {
    const double fitted = fit_slope(ls, lnth);
    t.add_row({"theta", "threshold", fmt17(model.q - n), fmt17(fitted), "", "", "", "", ""});
  }

  if (!model.is_background()) {
    std::vector<SweepRow> exc_rows;
    std::vector<SeriesPoint> pts;
    for (double L : Ls) {
      const MassReading m = excluded_region_mass(model, region, L, sigma, orders, workers);
      exc_rows.push_back({L, m.value, m.quad_error, 0.0});
      pts.push_back({L, m.value, m.quad_error});
    }
    const Table e = sweep_table("excluded", "L", exc_rows, detail::try_fit(pts));
    for (const auto& row : e.rows) t.rows.push_back(row);
  }
  return to_csv(t);
}

// ---------------------------------------------------------------------------
// cylinder report

namespace detail {

inline const std::vector<std::string>& cylinder_config_keys() {
  static const std::vector<std::string> keys = {
      "model.name",   "model.m",       "model.n",      "model.q",       "model.amplitude",
      "model.axis",   "model.mu0",     "model.r_min",  "model.lambda",  "sweep.L",
      "sweep.sigma_k", "orders.polar", "orders.azimuth", "orders.radial", "orders.axial",
      "output.csv"};
  return keys;
}

}  // namespace detail

// One row per cylinder face per L: the face contribution, the decay exponent
// fitted over the whole L ladder, and the predicted exponent for the model's
// (n, q, k).  F+ converges to the mass itself, so it carries no prediction.
inline std::string run_cylinder_report(const Config& cfg, int workers = 0) {
  cfg.require_known(detail::cylinder_config_keys());
  const ModelBundle mb = model_from_config(cfg);
  const MetricModel& model = mb.model;
  const Orders orders = orders_from_config(cfg);
  const std::vector<double> Ls = cfg.get_list("sweep.L");
  const double k = cfg.get_double_or("sweep.sigma_k", 1.5);
  if (!(k > 0.0)) throw ConfigError("config key 'sweep.sigma_k' must be positive");
  const StaticPotential V = StaticPotential::direction(Vec::Unit(model.n, 0));

  struct FaceSeries {
    std::string name;
    bool has_prediction = false;
    double predicted = 0.0;
    std::vector<double> values, errors;
  };
  CylinderDecayPrediction pred{};
  const bool perturbed = !model.is_background();
  if (perturbed) pred = cylinder_decay_prediction(model.n, model.q, k);
  std::vector<FaceSeries> faces = {{"f_plus", false, 0.0, {}, {}},
                                   {"f_minus", perturbed, pred.f_minus, {}, {}},
                                   {"e_plus", perturbed, pred.e_plus, {}, {}},
                                   {"e_minus", perturbed, pred.e_minus, {}, {}},
                                   {"lateral", perturbed, pred.lateral, {}, {}}};

  for (double L : Ls) {
    const CylinderFluxReport rep =
        cylinder_flux_report(model, V, L, std::exp(k * L), orders, workers);
    faces[0].values.push_back(rep.f_plus.direct);
    faces[0].errors.push_back(rep.f_plus.quad_error);
    faces[1].values.push_back(rep.f_minus.direct);
    faces[1].errors.push_back(rep.f_minus.quad_error);
    faces[2].values.push_back(rep.edge_plus);
    faces[2].errors.push_back(rep.edge_plus_quad_error);
    faces[3].values.push_back(rep.edge_minus);
    faces[3].errors.push_back(rep.edge_minus_quad_error);
    faces[4].values.push_back(rep.lateral.direct);
    faces[4].errors.push_back(rep.lateral.quad_error);
  }

  Table t;
  t.header = {"face", "param_name", "param_value", "value", "quad_error", "fitted_exponent",
              "predicted_exponent"};
  for (const FaceSeries& f : faces) {
    bool fittable = Ls.size() >= 2;
    for (double v : f.values) fittable = fittable && v != 0.0;
    std::string fitted;
    if (fittable) {
      std::vector<double> lnv;
      for (double v : f.values) lnv.push_back(std::log(std::abs(v)));
      fitted = fmt17(fit_slope(Ls, lnv));
    }
    for (size_t i = 0; i < Ls.size(); ++i) {
      const bool last = (i + 1 == Ls.size());
      t.add_row({f.name, "L", fmt17(Ls[i]), fmt17(f.values[i]), fmt17(f.errors[i]),
                 last ? fitted : "", f.has_prediction ? fmt17(f.predicted) : ""});
    }
  }
  return to_csv(t);
}

}  // namespace horomass
