#include "glasslab/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "glasslab/errors.hpp"

namespace glasslab {

namespace {

// A one-dimensional difference stencil: (x value, coefficient) pairs.
struct Stencil {
  std::vector<std::pair<double, double>> points;
  double step = 0.0;
};

bool use_central(double x, double h) { return x >= 0.01 && x - h >= 0.0; }

Stencil first_derivative_stencil(double x, double h_scale, double h_boundary) {
  Stencil s;
  double h = h_scale * std::max(1.0, x);
  if (use_central(x, h)) {
    s.points = {{x - h, -0.5 / h}, {x + h, 0.5 / h}};
  } else {
    // second-order one-sided at the x >= 0 boundary; the step must be small
    // enough that the O(h^2 f''') bias clears the agreement tolerances
    h = std::min(h_scale, h_boundary);
    s.points = {{x, -1.5 / h}, {x + h, 2.0 / h}, {x + 2 * h, -0.5 / h}};
  }
  s.step = h;
  return s;
}

Stencil second_derivative_stencil(double x, double h_scale, double h_boundary) {
  Stencil s;
  double h = h_scale * std::max(1.0, x);
  if (use_central(x, h)) {
    const double c = 1.0 / (h * h);
    s.points = {{x - h, c}, {x, -2.0 * c}, {x + h, c}};
  } else {
    h = h_boundary;
    const double c = 1.0 / (h * h);
    s.points = {{x, 2.0 * c}, {x + h, -5.0 * c}, {x + 2 * h, 4.0 * c}, {x + 3 * h, -c}};
  }
  s.step = h;
  return s;
}

// Registry of parameter variants deduplicated by their exact x vector.
struct VariantSet {
  QuenchJob& job;
  std::map<std::vector<double>, std::size_t> index;

  std::size_t get(const NishimoriParams& p) {
    auto it = index.find(p.x);
    if (it != index.end()) return it->second;
    const std::size_t v = job.add_variant(p);
    index.emplace(p.x, v);
    return v;
  }
};

struct PairProducts {
  std::size_t ca, sa, cb, sb, cc, cs, sc, ss;
};

PairProducts register_pair(QuenchJob& job, const CouplingSlot& a, const CouplingSlot& b) {
  PairProducts p;
  p.ca = job.add_product(SiteObservable::one(cos_of(a)));
  p.sa = job.add_product(SiteObservable::one(sin_of(a)));
  p.cb = job.add_product(SiteObservable::one(cos_of(b)));
  p.sb = job.add_product(SiteObservable::one(sin_of(b)));
  p.cc = job.add_product(SiteObservable::pair(cos_of(a), cos_of(b)));
  p.cs = job.add_product(SiteObservable::pair(cos_of(a), sin_of(b)));
  p.sc = job.add_product(SiteObservable::pair(sin_of(a), cos_of(b)));
  p.ss = job.add_product(SiteObservable::pair(sin_of(a), sin_of(b)));
  return p;
}

// Per-sample sum of the four squared truncated correlations of two slots.
ScalarObservable four_squares_observable(const PairProducts& p) {
  return {"four_squares", [p](const GibbsState& s) {
            const double ca = s.correlator(p.ca), sa = s.correlator(p.sa);
            const double cb = s.correlator(p.cb), sb = s.correlator(p.sb);
            const double t_cc = s.correlator(p.cc) - ca * cb;
            const double t_cs = s.correlator(p.cs) - ca * sb;
            const double t_sc = s.correlator(p.sc) - sa * cb;
            const double t_ss = s.correlator(p.ss) - sa * sb;
            return t_cc * t_cc + t_cs * t_cs + t_sc * t_sc + t_ss * t_ss;
          }};
}

}  // namespace

DerivativeReport thm1_check(const ModelSpec& model, const NishimoriParams& params,
                            std::size_t slot_index, const QuenchMethod& method,
                            const TheoremOptions& options) {
  if (slot_index >= model.n_slots()) throw ConfigurationError("slot index out of range");
  const CouplingSlot slot = model.slots[slot_index];
  const double x = params.x[slot_index];

  QuenchJob job(model);
  const std::size_t p_cos = job.add_product(SiteObservable::one(cos_of(slot)));
  const std::size_t o_press = job.add_pressure_observable();
  const std::size_t o_analytic = job.add_observable(
      {"half_one_plus_cos",
       [p_cos](const GibbsState& s) { return 0.5 * (1.0 + s.correlator(p_cos)); }});

  VariantSet vs{job, {}};
  const std::size_t v_base = vs.get(params);
  const Stencil st = first_derivative_stencil(x, options.fd_step_first, options.fd_step_first);
  std::vector<QuenchJob::Result::Term> fd_terms, residual_terms;
  for (const auto& [xv, coeff] : st.points) {
    const std::size_t v = vs.get(params.with(slot_index, xv));
    fd_terms.push_back({v, o_press, coeff});
    residual_terms.push_back({v, o_press, coeff});
  }
  residual_terms.push_back({v_base, o_analytic, -1.0});

  const auto res = job.run(method);

  DerivativeReport rep;
  rep.slot_a = rep.slot_b = slot;
  rep.second_order = false;
  rep.analytic = res.estimate(v_base, o_analytic);
  rep.fd_pressure = res.combine(fd_terms);
  rep.residual = res.combine(residual_terms);
  rep.fd_step = st.step;
  rep.tolerance = std::max(options.tol_first, 3.0 * rep.residual.std_error);
  rep.pass = std::abs(rep.residual.value) <= rep.tolerance;
  const double bound_slack = 3.0 * rep.analytic.std_error + 1e-12;
  rep.bound_ok = rep.analytic.value >= -bound_slack && rep.analytic.value <= 1.0 + bound_slack;
  return rep;
}

DerivativeReport thm2_check(const ModelSpec& model, const NishimoriParams& params,
                            std::size_t slot_a, std::size_t slot_b, const QuenchMethod& method,
                            const TheoremOptions& options) {
  if (slot_a >= model.n_slots() || slot_b >= model.n_slots())
    throw ConfigurationError("slot index out of range");
  const CouplingSlot a = model.slots[slot_a], b = model.slots[slot_b];

  QuenchJob job(model);
  const PairProducts pp = register_pair(job, a, b);
  const std::size_t o_press = job.add_pressure_observable();
  const std::size_t o_fs = job.add_observable(four_squares_observable(pp));
  const std::size_t o_ca = job.add_observable(
      {"cos_a", [pp](const GibbsState& s) { return s.correlator(pp.ca); }});

  VariantSet vs{job, {}};
  const std::size_t v_base = vs.get(params);

  // 2 * d2 P / dx_a dx_b
  std::vector<QuenchJob::Result::Term> fd2_terms;
  double step = 0.0;
  if (slot_a == slot_b) {
    const Stencil st =
        second_derivative_stencil(params.x[slot_a], options.fd_step_second, options.fd_step_boundary);
    for (const auto& [xv, coeff] : st.points)
      fd2_terms.push_back({vs.get(params.with(slot_a, xv)), o_press, 2.0 * coeff});
    step = st.step;
  } else {
    const Stencil sa = first_derivative_stencil(params.x[slot_a], options.fd_step_second, options.fd_step_boundary);
    const Stencil sb = first_derivative_stencil(params.x[slot_b], options.fd_step_second, options.fd_step_boundary);
    for (const auto& [xa, ca] : sa.points)
      for (const auto& [xb, cb] : sb.points)
        fd2_terms.push_back(
            {vs.get(params.with(slot_a, xa).with(slot_b, xb)), o_press, 2.0 * ca * cb});
    step = std::max(sa.step, sb.step);
  }

  // d/dx_b of E[<cos a>]
  const Stencil sc = first_derivative_stencil(params.x[slot_b], options.fd_step_second, options.fd_step_boundary);
  std::vector<QuenchJob::Result::Term> fdc_terms;
  for (const auto& [xv, coeff] : sc.points)
    fdc_terms.push_back({vs.get(params.with(slot_b, xv)), o_ca, coeff});

  const auto res = job.run(method);

  DerivativeReport rep;
  rep.slot_a = a;
  rep.slot_b = b;
  rep.second_order = true;
  rep.analytic = res.estimate(v_base, o_fs);
  rep.fd_pressure = res.combine(fd2_terms);
  rep.fd_correlation = res.combine(fdc_terms);
  rep.fd_step = step;

  auto r1_terms = fd2_terms;
  r1_terms.push_back({v_base, o_fs, -1.0});
  rep.residual = res.combine(r1_terms);
  auto r2_terms = fdc_terms;
  r2_terms.push_back({v_base, o_fs, -1.0});
  const QuenchedEstimate residual2 = res.combine(r2_terms);

  const double tol1 = std::max(options.tol_second, 3.0 * rep.residual.std_error);
  const double tol2 = std::max(options.tol_second, 3.0 * residual2.std_error);
  rep.tolerance = tol1;
  rep.bound_ok = rep.analytic.value >= -(3.0 * rep.analytic.std_error + 1e-12);
  rep.pass = std::abs(rep.residual.value) <= tol1 && std::abs(residual2.value) <= tol2;
  return rep;
}

const char* assembly_name(HessianAssembly a) {
  switch (a) {
    case HessianAssembly::FourSquares: return "four_squares";
    case HessianAssembly::CsAuxiliary: return "cs_auxiliary";
    case HessianAssembly::FiniteDifference: return "finite_difference";
  }
  return "?";
}

namespace {

// <(c_a + s_a)(c_b + s_b)> over two independent replicas at fixed disorder,
// evaluated by the explicit double loop over table rows. c/s are the centered
// two-replica auxiliary variables.
ScalarObservable cs_kernel_observable(std::size_t slot_a, std::size_t slot_b,
                                      const PairProducts& pp) {
  return {"cs_kernel", [slot_a, slot_b, pp](const GibbsState& s) {
            const GibbsEvaluator& ev = *s.evaluator;
            const double mu_ca = s.correlator(pp.ca), mu_sa = s.correlator(pp.sa);
            const double mu_cb = s.correlator(pp.cb), mu_sb = s.correlator(pp.sb);
            const std::size_t rows = ev.n_rows();
            double acc = 0.0;
            for (std::size_t r1 = 0; r1 < rows; ++r1) {
              const double p1 = s.prob[(Eigen::Index)r1];
              const double ua1 = ev.cos_value(r1, slot_a) - mu_ca;
              const double wa1 = ev.sin_value(r1, slot_a) - mu_sa;
              const double ub1 = ev.cos_value(r1, slot_b) - mu_cb;
              const double wb1 = ev.sin_value(r1, slot_b) - mu_sb;
              for (std::size_t r2 = 0; r2 < rows; ++r2) {
                const double p2 = s.prob[(Eigen::Index)r2];
                const double c_a = ua1 * (ev.cos_value(r2, slot_a) - mu_ca);
                const double s_a = wa1 * (ev.sin_value(r2, slot_a) - mu_sa);
                const double c_b = ub1 * (ev.cos_value(r2, slot_b) - mu_cb);
                const double s_b = wb1 * (ev.sin_value(r2, slot_b) - mu_sb);
                acc += p1 * p2 * (c_a + s_a) * (c_b + s_b);
              }
            }
            return acc;
          }};
}

}  // namespace

HessianReport hessian_psd(const ModelSpec& model, const NishimoriParams& params,
                          const QuenchMethod& method, HessianAssembly assembly,
                          const HessianOptions& options) {
  const std::size_t d = model.n_slots();
  if (d == 0) throw ConfigurationError("hessian requires at least one slot");
  if (d > options.max_slots)
    throw CapacityError("hessian limited to " + std::to_string(options.max_slots) + " slots");

  HessianReport rep;
  rep.slots = model.slots;
  rep.assembly = assembly;
  rep.matrix.setZero((Eigen::Index)d, (Eigen::Index)d);
  rep.std_errors.setZero((Eigen::Index)d, (Eigen::Index)d);

  if (assembly == HessianAssembly::FiniteDifference) {
    QuenchJob job(model);
    const std::size_t o_press = job.add_pressure_observable();
    VariantSet vs{job, {}};
    std::vector<std::vector<QuenchJob::Result::Term>> entry_terms(d * d);
    for (std::size_t ia = 0; ia < d; ++ia) {
      const Stencil st = second_derivative_stencil(params.x[ia], options.fd.fd_step_second,
                                                   options.fd.fd_step_boundary);
      for (const auto& [xv, coeff] : st.points)
        entry_terms[ia * d + ia].push_back({vs.get(params.with(ia, xv)), o_press, coeff});
      for (std::size_t ib = ia + 1; ib < d; ++ib) {
        const Stencil sa = first_derivative_stencil(params.x[ia], options.fd.fd_step_second, options.fd.fd_step_boundary);
        const Stencil sb = first_derivative_stencil(params.x[ib], options.fd.fd_step_second, options.fd.fd_step_boundary);
        for (const auto& [xa, ca] : sa.points)
          for (const auto& [xb, cb] : sb.points)
            entry_terms[ia * d + ib].push_back(
                {vs.get(params.with(ia, xa).with(ib, xb)), o_press, ca * cb});
      }
    }
    const auto res = job.run(method);
    for (std::size_t ia = 0; ia < d; ++ia)
      for (std::size_t ib = ia; ib < d; ++ib) {
        const auto est = res.combine(entry_terms[ia * d + ib]);
        rep.matrix((Eigen::Index)ia, (Eigen::Index)ib) = est.value;
        rep.matrix((Eigen::Index)ib, (Eigen::Index)ia) = est.value;
        rep.std_errors((Eigen::Index)ia, (Eigen::Index)ib) = est.std_error;
        rep.std_errors((Eigen::Index)ib, (Eigen::Index)ia) = est.std_error;
      }
    rep.max_asymmetry = 0.0;  // symmetric stencils by construction
  } else {
    QuenchJob job(model);
    std::vector<std::size_t> obs_index(d * d);
    for (std::size_t ia = 0; ia < d; ++ia)
      for (std::size_t ib = 0; ib < d; ++ib) {
        const PairProducts pp = register_pair(job, model.slots[ia], model.slots[ib]);
        obs_index[ia * d + ib] =
            assembly == HessianAssembly::FourSquares
                ? job.add_observable(four_squares_observable(pp))
                : job.add_observable(cs_kernel_observable(ia, ib, pp));
      }
    const std::size_t v0 = job.add_variant(params);
    const auto res = job.run(method);
    Eigen::MatrixXd raw((Eigen::Index)d, (Eigen::Index)d);
    for (std::size_t ia = 0; ia < d; ++ia)
      for (std::size_t ib = 0; ib < d; ++ib) {
        const auto est = res.estimate(v0, obs_index[ia * d + ib]);
        raw((Eigen::Index)ia, (Eigen::Index)ib) = 0.5 * est.value;
        rep.std_errors((Eigen::Index)ia, (Eigen::Index)ib) = 0.5 * est.std_error;
      }
    rep.max_asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + raw.cwiseAbs().maxCoeff();
    if (rep.max_asymmetry > options.symmetry_tol * scale)
      throw NumericalError("hessian assembly asymmetric beyond tolerance: " +
                           std::to_string(rep.max_asymmetry));
    rep.matrix = 0.5 * (raw + raw.transpose());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.matrix);
  if (es.info() != Eigen::Success) throw NumericalError("hessian eigenvalue solve failed");
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.spectral_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.psd_ok = rep.min_eigenvalue >= -options.psd_tol_scale * (1.0 + rep.spectral_norm);
  return rep;
}

}  // namespace glasslab
