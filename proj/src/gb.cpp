#include "glasslab/gb.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "glasslab/errors.hpp"

namespace glasslab {

TrialField TrialField::uniform(const ModelSpec& model, int harmonic, double x) {
  TrialField t;
  for (int i = 0; i < model.n_sites(); ++i) {
    t.slots.push_back(CouplingSlot::site(i, harmonic));
    t.x.push_back(x);
  }
  return t;
}

void TrialField::validate(const ModelSpec& model) const {
  if (slots.size() != x.size())
    throw ConfigurationError("trial field slots and x must align");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].one_body()) throw ConfigurationError("trial slots must be one-body");
    if (slots[i].site_a < 0 || slots[i].site_a >= model.n_sites())
      throw ConfigurationError("trial slot site out of range");
    if (slots[i].harmonic < 0) throw ConfigurationError("trial harmonic must be >= 0");
    if (!(x[i] >= 0.0)) throw ConfigurationError("trial x must be >= 0");
  }
}

namespace {

// E[log z_i] and E[<cos m phi>_0], E[<sin m phi>_0] of a single site under
// its one-body trial slots, by quadrature over the site's own Gaussians.
struct SiteAverages {
  double log_z = 0.0;
  std::map<int, double> cos_m, sin_m;
};

SiteAverages site_averages(int q, const std::vector<std::pair<int, double>>& site_slots,
                           const std::vector<int>& needed_ms, int nodes) {
  ModelSpec site;
  site.spin.q = q;
  site.graph.n_sites = 1;
  NishimoriParams params;
  for (const auto& [m, x] : site_slots) {
    site.slots.push_back(CouplingSlot::site(0, m));
    params.x.push_back(x);
  }
  QuenchJob job(site);
  const std::size_t o_press = job.add_pressure_observable();
  std::map<int, std::pair<std::size_t, std::size_t>> obs_m;
  for (const int m : needed_ms) {
    if (obs_m.count(m)) continue;
    const std::size_t oc = job.add_correlator_observable(SiteObservable::one(cos_of(CouplingSlot::site(0, m))));
    const std::size_t os = job.add_correlator_observable(SiteObservable::one(sin_of(CouplingSlot::site(0, m))));
    obs_m[m] = {oc, os};
  }
  const std::size_t v0 = job.add_variant(params);
  const auto res = job.run(QuenchMethod::quadrature(nodes));

  SiteAverages out;
  out.log_z = res.estimate(v0, o_press).value;
  for (const auto& [m, oo] : obs_m) {
    out.cos_m[m] = res.estimate(v0, oo.first).value;
    out.sin_m[m] = res.estimate(v0, oo.second).value;
  }
  return out;
}

// Bound right-hand side and E[log Z_0], by per-site factorization under
// quadrature or by one full trial-model job under Monte Carlo.
std::pair<QuenchedEstimate, QuenchedEstimate> gb_rhs(const ModelSpec& model,
                                                     const NishimoriParams& params,
                                                     const TrialField& trial,
                                                     const QuenchMethod& method,
                                                     const GBOptions& options) {
  trial.validate(model);
  const int n = model.n_sites();

  if (method.kind == QuenchMethod::Kind::Quadrature) {
    // per-site slot lists and needed harmonics
    std::vector<std::vector<std::pair<int, double>>> slots_of((std::size_t)n);
    std::vector<std::vector<int>> ms_of((std::size_t)n);
    for (std::size_t t = 0; t < trial.slots.size(); ++t) {
      slots_of[(std::size_t)trial.slots[t].site_a].push_back(
          {trial.slots[t].harmonic, trial.x[t]});
      ms_of[(std::size_t)trial.slots[t].site_a].push_back(trial.slots[t].harmonic);
    }
    for (const auto& s : model.slots) {
      ms_of[(std::size_t)s.site_a].push_back(s.harmonic);
      if (!s.one_body()) ms_of[(std::size_t)s.site_b].push_back(s.harmonic);
    }

    std::map<std::string, SiteAverages> cache;  // sites with identical inputs
    std::vector<SiteAverages> per_site((std::size_t)n);
    for (int i = 0; i < n; ++i) {
      auto& sl = slots_of[(std::size_t)i];
      auto& ms = ms_of[(std::size_t)i];
      std::sort(sl.begin(), sl.end());
      std::sort(ms.begin(), ms.end());
      ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
      std::ostringstream key;
      key.precision(17);
      for (const auto& [m, x] : sl) key << m << ":" << x << ";";
      key << "|";
      for (const int m : ms) key << m << ",";
      auto it = cache.find(key.str());
      if (it == cache.end())
        it = cache.emplace(key.str(),
                           site_averages(model.spin.q, sl, ms, options.trial_nodes)).first;
      per_site[(std::size_t)i] = it->second;
    }

    double log_z0 = 0.0;
    for (int i = 0; i < n; ++i) log_z0 += per_site[(std::size_t)i].log_z;

    double rhs = log_z0;
    for (std::size_t s = 0; s < model.slots.size(); ++s) {
      const auto& slot = model.slots[s];
      double cos0;
      if (slot.one_body()) {
        cos0 = per_site[(std::size_t)slot.site_a].cos_m.at(slot.harmonic);
      } else {
        const auto& A = per_site[(std::size_t)slot.site_a];
        const auto& B = per_site[(std::size_t)slot.site_b];
        cos0 = A.cos_m.at(slot.harmonic) * B.cos_m.at(slot.harmonic) +
               A.sin_m.at(slot.harmonic) * B.sin_m.at(slot.harmonic);
      }
      rhs += 0.5 * params.x[s] * (1.0 + cos0);
    }
    for (std::size_t t = 0; t < trial.slots.size(); ++t) {
      const double cos0 =
          per_site[(std::size_t)trial.slots[t].site_a].cos_m.at(trial.slots[t].harmonic);
      rhs -= 0.5 * trial.x[t] * (1.0 + cos0);
    }

    QuenchedEstimate rhs_e, z0_e;
    rhs_e.value = rhs;
    rhs_e.method = method;
    z0_e.value = log_z0;
    z0_e.method = method;
    return {rhs_e, z0_e};
  }

  // Monte Carlo: full trial model, every term a linear function of
  // per-sample averages.
  ModelSpec tm;
  tm.spin = model.spin;
  tm.graph.n_sites = model.graph.n_sites;
  tm.slots = trial.slots;
  NishimoriParams tp{trial.x};
  QuenchJob job(tm);
  const std::size_t o_press = job.add_pressure_observable();
  std::vector<std::size_t> o_model(model.slots.size()), o_trial(trial.slots.size());
  for (std::size_t s = 0; s < model.slots.size(); ++s)
    o_model[s] = job.add_correlator_observable(SiteObservable::one(cos_of(model.slots[s])));
  for (std::size_t t = 0; t < trial.slots.size(); ++t)
    o_trial[t] = job.add_correlator_observable(SiteObservable::one(cos_of(trial.slots[t])));
  const std::size_t v0 = job.add_variant(tp);
  const auto res = job.run(method);

  std::vector<QuenchJob::Result::Term> terms{{v0, o_press, 1.0}};
  double constant = 0.0;
  for (std::size_t s = 0; s < model.slots.size(); ++s) {
    terms.push_back({v0, o_model[s], 0.5 * params.x[s]});
    constant += 0.5 * params.x[s];
  }
  for (std::size_t t = 0; t < trial.slots.size(); ++t) {
    terms.push_back({v0, o_trial[t], -0.5 * trial.x[t]});
    constant -= 0.5 * trial.x[t];
  }
  QuenchedEstimate rhs_e = res.combine(terms);
  rhs_e.value += constant;
  return {rhs_e, res.estimate(v0, o_press)};
}

}  // namespace

QuenchedEstimate trial_pressure_direct(const ModelSpec& model, const TrialField& trial,
                                       const QuenchMethod& method) {
  trial.validate(model);
  ModelSpec tm;
  tm.spin = model.spin;
  tm.graph.n_sites = model.graph.n_sites;
  tm.slots = trial.slots;
  return quenched_pressure(tm, NishimoriParams{trial.x}, method);
}

GBReport gb_bound(const ModelSpec& model, const NishimoriParams& params,
                  const TrialField& trial, const QuenchMethod& method,
                  const GBOptions& options) {
  GBReport rep;
  rep.lhs = quenched_pressure(model, params, method);
  auto [rhs, z0] = gb_rhs(model, params, trial, method, options);
  rep.rhs = rhs;
  rep.slack = rep.lhs.value - rep.rhs.value;
  rep.slack_std_error =
      std::sqrt(rep.lhs.std_error * rep.lhs.std_error + rep.rhs.std_error * rep.rhs.std_error);
  rep.tolerance = std::max(options.tol, 3.0 * rep.slack_std_error);
  rep.pass = rep.slack >= -rep.tolerance;
  return rep;
}

InterpolationReport interpolation_curve(const ModelSpec& model, const NishimoriParams& params,
                                        const TrialField& trial, std::vector<double> t_grid,
                                        const QuenchMethod& method, const GBOptions& options) {
  trial.validate(model);
  if (t_grid.size() < 3)
    throw ConfigurationError("interpolation grid needs at least 3 points");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw ConfigurationError("interpolation grid must be sorted");
  for (const double t : t_grid)
    if (t < 0.0 || t > 1.0) throw ConfigurationError("interpolation grid must lie in [0,1]");

  // Combined model: target slots plus trial slots. A slot appearing on both
  // sides carries two independent Gaussian channels, which is equivalent in
  // distribution to one channel with the summed x.
  ModelSpec combined = model;
  std::vector<int> trial_pos(trial.slots.size());
  for (std::size_t t = 0; t < trial.slots.size(); ++t) {
    const int at = combined.find_slot(trial.slots[t]);
    if (at >= 0) {
      trial_pos[t] = at;
    } else {
      combined.slots.push_back(trial.slots[t]);
      combined.graph.one_body_sites.push_back(trial.slots[t].site_a);
      trial_pos[t] = (int)combined.slots.size() - 1;
    }
  }

  QuenchJob job(combined);
  const std::size_t o_press = job.add_pressure_observable();
  auto variant_at = [&](double t) {
    NishimoriParams p = NishimoriParams::zeros(combined.n_slots());
    for (std::size_t s = 0; s < model.slots.size(); ++s) p.x[s] = t * params.x[s];
    for (std::size_t k = 0; k < trial.slots.size(); ++k)
      p.x[(std::size_t)trial_pos[k]] += (1.0 - t) * trial.x[k];
    return p;
  };
  std::vector<std::size_t> v_of(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) v_of[i] = job.add_variant(variant_at(t_grid[i]));

  const bool has0 = t_grid.front() == 0.0;
  const bool has1 = t_grid.back() == 1.0;
  const double delta = 1e-5;
  std::size_t v_delta = 0;
  if (has0 && has1) v_delta = job.add_variant(variant_at(delta));

  const auto res = job.run(method);

  InterpolationReport rep;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    rep.curve.push_back({t_grid[i], res.estimate(v_of[i], o_press)});

  // discrete convexity: second divided differences (x2) of consecutive triples
  rep.convex_ok = true;
  rep.min_curvature = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 2 < t_grid.size(); ++i) {
    const double t1 = t_grid[i], t2 = t_grid[i + 1], t3 = t_grid[i + 2];
    const double c1 = 2.0 / ((t2 - t1) * (t3 - t1));
    const double c2 = -2.0 / ((t2 - t1) * (t3 - t2));
    const double c3 = 2.0 / ((t3 - t1) * (t3 - t2));
    const auto curv = res.combine(
        {{v_of[i], o_press, c1}, {v_of[i + 1], o_press, c2}, {v_of[i + 2], o_press, c3}});
    rep.min_curvature = std::min(rep.min_curvature, curv.value);
    if (curv.value < -std::max(options.tol, 3.0 * curv.std_error)) rep.convex_ok = false;
  }

  // Endpoints against independently computed trial/target pressures, using
  // the same method and node count: inactive Gaussian dimensions integrate
  // out exactly, so the comparison is free of quadrature truncation.
  rep.endpoints_ok = true;
  rep.tolerance = options.tol;
  if (has0) {
    const auto z0 = trial_pressure_direct(model, trial, method);
    const auto& c0 = rep.curve.front().pressure;
    rep.endpoint0_error = std::abs(c0.value - z0.value);
    const double tol0 = std::max(options.tol, 3.0 * std::sqrt(c0.std_error * c0.std_error +
                                                              z0.std_error * z0.std_error));
    if (rep.endpoint0_error > tol0) rep.endpoints_ok = false;
  }
  if (has1) {
    const auto p1 = quenched_pressure(model, params, method);
    const auto& c1 = rep.curve.back().pressure;
    rep.endpoint1_error = std::abs(c1.value - p1.value);
    const double tol1 = std::max(options.tol, 3.0 * std::sqrt(c1.std_error * c1.std_error +
                                                              p1.std_error * p1.std_error));
    if (rep.endpoint1_error > tol1) rep.endpoints_ok = false;
  }

  // tangent inequality at t = 0: f(1) >= f(0) + f'(0)
  if (has0 && has1) {
    const double inv = 1.0 / delta;
    const auto gap = res.combine({{v_of.back(), o_press, 1.0},
                                  {v_of.front(), o_press, -1.0 + inv},
                                  {v_delta, o_press, -inv}});
    rep.tangent_slack = gap.value;
    rep.tangent_ok = gap.value >= -std::max(options.tol, 3.0 * gap.std_error);
  } else {
    rep.tangent_ok = true;
  }
  return rep;
}

GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double x_tol, int max_iterations) {
  if (!(b > a)) throw ConfigurationError("golden section requires b > a");
  const double inv_phi = 2.0 / (1.0 + std::sqrt(5.0));
  GoldenResult best;
  double fa = f(a), fb = f(b);
  double u = b - inv_phi * (b - a), v = a + inv_phi * (b - a);
  double fu = f(u), fv = f(v);
  best.evaluations = 4;
  for (int i = 0; i < max_iterations && (b - a) > x_tol; ++i) {
    if (fu < fv) {  // maximum is right of u
      a = u;
      fa = fu;
      u = v;
      fu = fv;
      v = a + inv_phi * (b - a);
      fv = f(v);
    } else {
      b = v;
      fb = fv;
      v = u;
      fv = fu;
      u = b - inv_phi * (b - a);
      fu = f(u);
    }
    ++best.evaluations;
  }
  best.x = u;
  best.value = fu;
  for (const auto& [xx, ff] : {std::pair{a, fa}, {b, fb}, {v, fv}}) {
    if (ff > best.value) {
      best.x = xx;
      best.value = ff;
    }
  }
  return best;
}

namespace {

void validate_meanfield_model(const ModelSpec& model, int z) {
  if (model.spin.q != 2)
    throw ConfigurationError("mean-field specialization requires the Ising case q = 2");
  for (const auto& s : model.slots)
    if (s.one_body() || s.harmonic != 1)
      throw ConfigurationError("mean-field specialization requires two-body m = 1 slots only");
  for (int i = 0; i < model.n_sites(); ++i)
    if (model.graph.degree(i) != z)
      throw ConfigurationError("site " + std::to_string(i) + " has degree " +
                               std::to_string(model.graph.degree(i)) +
                               ", not the declared coordination z = " + std::to_string(z));
}

}  // namespace

double rs_meanfield_rhs(const ModelSpec& model, double beta, int z, double m,
                        const GBOptions& options) {
  const NishimoriParams params = NishimoriParams::uniform(model.n_slots(), beta * beta);
  const TrialField trial = TrialField::uniform(model, 1, beta * beta * (double)z * m);
  const auto [rhs, z0] =
      gb_rhs(model, params, trial, QuenchMethod::quadrature(options.trial_nodes), options);
  (void)z0;
  return rhs.value;
}

MeanFieldReport rs_meanfield_bound(const ModelSpec& model, int z, double beta,
                                   const QuenchMethod& method,
                                   const MeanFieldOptions& options) {
  validate_meanfield_model(model, z);
  if (!(beta > 0.0)) throw ConfigurationError("beta must be positive");

  MeanFieldReport rep;
  rep.beta = beta;
  rep.z = z;

  const auto rhs_of = [&](double m) { return rs_meanfield_rhs(model, beta, z, m, options.gb); };
  const GoldenResult g = golden_section_max(rhs_of, 0.0, options.m_max, options.m_tol);
  rep.m_star = g.x;
  rep.rhs_at_m_star = g.value;

  for (int i = 0; i < options.scan_points; ++i) {
    const double m = options.m_max * (double)i / (double)(options.scan_points - 1);
    rep.scan.push_back({m, rhs_of(m)});
  }

  const NishimoriParams params = NishimoriParams::uniform(model.n_slots(), beta * beta);
  const TrialField trial =
      TrialField::uniform(model, 1, beta * beta * (double)z * rep.m_star);
  rep.bound = gb_bound(model, params, trial, method, options.gb);
  return rep;
}

}  // namespace glasslab
