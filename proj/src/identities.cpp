#include "glasslab/identities.hpp"

#include <algorithm>
#include <cmath>

#include "glasslab/errors.hpp"

namespace glasslab {

const char* identity_name(IdentityId id) {
  switch (id) {
    case IdentityId::I1: return "I1";
    case IdentityId::I2: return "I2";
    case IdentityId::I3: return "I3";
    case IdentityId::I4: return "I4";
    case IdentityId::I5: return "I5";
  }
  return "?";
}

namespace {

// Indices of the single and pair correlators of two slots in a QuenchJob.
struct SlotPairProducts {
  std::size_t ca, sa, cb, sb;       // <cos a>, <sin a>, <cos b>, <sin b>
  std::size_t cc, cs, sc, ss;       // <cos a cos b>, <cos a sin b>, ...
};

SlotPairProducts register_products(QuenchJob& job, const CouplingSlot& a,
                                   const CouplingSlot& b) {
  SlotPairProducts p;
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

// lhs/rhs of each identity as per-sample functions of the correlators. The
// rhs multi-replica averages are written in factorized form, replicas being
// independent at fixed disorder.
std::pair<ScalarObservable, ScalarObservable> identity_sides(IdentityId id,
                                                             const SlotPairProducts& p) {
  auto v = [](const GibbsState& s, std::size_t i) { return s.correlator(i); };
  switch (id) {
    case IdentityId::I1:
      return {{"lhs", [p, v](const GibbsState& s) { return v(s, p.ca); }},
              {"rhs", [p, v](const GibbsState& s) {
                 const double ca = v(s, p.ca), sa = v(s, p.sa);
                 return ca * ca + sa * sa;
               }}};
    case IdentityId::I2:
      return {{"lhs", [p, v](const GibbsState& s) { return v(s, p.cc); }},
              {"rhs", [p, v](const GibbsState& s) {
                 const double cc = v(s, p.cc), cs = v(s, p.cs), sc = v(s, p.sc),
                              ss = v(s, p.ss);
                 return cc * cc + cs * cs + sc * sc + ss * ss;
               }}};
    case IdentityId::I3:
      return {{"lhs", [p, v](const GibbsState& s) { return v(s, p.ca) * v(s, p.cb); }},
              {"rhs", [p, v](const GibbsState& s) {
                 return v(s, p.cc) * v(s, p.ca) * v(s, p.cb) +
                        v(s, p.cs) * v(s, p.ca) * v(s, p.sb) +
                        v(s, p.sc) * v(s, p.sa) * v(s, p.cb) +
                        v(s, p.ss) * v(s, p.sa) * v(s, p.sb);
               }}};
    case IdentityId::I4:
      return {{"lhs", [p, v](const GibbsState& s) {
                 return v(s, p.cc) * v(s, p.cb) + v(s, p.cs) * v(s, p.sb);
               }},
              {"rhs", [p, v](const GibbsState& s) {
                 return v(s, p.cc) * v(s, p.ca) * v(s, p.cb) +
                        v(s, p.cs) * v(s, p.ca) * v(s, p.sb) +
                        v(s, p.sc) * v(s, p.sa) * v(s, p.cb) +
                        v(s, p.ss) * v(s, p.sa) * v(s, p.sb);
               }}};
    case IdentityId::I5:
      return {{"lhs", [p, v](const GibbsState& s) {
                 const double cb = v(s, p.cb), sb = v(s, p.sb);
                 return v(s, p.ca) * (cb * cb + sb * sb);
               }},
              {"rhs", [p, v](const GibbsState& s) {
                 const double ca = v(s, p.ca), sa = v(s, p.sa);
                 const double cb = v(s, p.cb), sb = v(s, p.sb);
                 return (ca * ca + sa * sa) * (cb * cb + sb * sb);
               }}};
  }
  throw ConfigurationError("unknown identity id");
}

}  // namespace

IdentityCase off_line_control(const ModelSpec& model, const NishimoriParams& params,
                              IdentityId id, const CouplingSlot& slot_a,
                              const CouplingSlot& slot_b, double bias_factor,
                              const QuenchMethod& method, const IdentityOptions& options) {
  if (!(bias_factor > 0.0))
    throw ConfigurationError("bias factor must be positive");

  QuenchJob job(model);
  job.set_mean_bias(bias_factor);
  const SlotPairProducts p = register_products(job, slot_a, slot_b);
  auto [lhs_obs, rhs_obs] = identity_sides(id, p);
  const std::size_t o_lhs = job.add_observable(lhs_obs);
  const std::size_t o_rhs = job.add_observable(rhs_obs);
  const std::size_t v0 = job.add_variant(params);
  const auto res = job.run(method);

  IdentityCase c;
  c.id = id;
  c.slot_a = slot_a;
  c.slot_b = slot_b;
  c.bias_factor = bias_factor;
  c.lhs = res.estimate(v0, o_lhs);
  c.rhs = res.estimate(v0, o_rhs);
  c.diff = res.combine({{v0, o_lhs, 1.0}, {v0, o_rhs, -1.0}});
  c.tolerance = method.kind == QuenchMethod::Kind::Quadrature
                    ? options.tol_quadrature
                    : std::max(3.0 * c.diff.std_error, options.tol_floor);
  c.pass = std::abs(c.diff.value) <= c.tolerance;
  const int ia = model.find_slot(slot_a), ib = model.find_slot(slot_b);
  c.weak = (ia >= 0 && params.x[(std::size_t)ia] == 0.0) ||
           (ib >= 0 && params.x[(std::size_t)ib] == 0.0) || ia < 0 || ib < 0;
  return c;
}

IdentityCase check_identity(const ModelSpec& model, const NishimoriParams& params,
                            IdentityId id, const CouplingSlot& slot_a,
                            const CouplingSlot& slot_b, const QuenchMethod& method,
                            const IdentityOptions& options) {
  return off_line_control(model, params, id, slot_a, slot_b, 1.0, method, options);
}

std::vector<IdentityCase> identity_sweep(const ModelSpec& model, const NishimoriParams& params,
                                         const QuenchMethod& method, double bias_factor,
                                         std::size_t max_pairs, const IdentityOptions& options) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < model.n_slots(); ++i)
    if (params.x[i] > 0.0) active.push_back(i);

  std::vector<IdentityCase> out;
  for (const std::size_t i : active)
    out.push_back(off_line_control(model, params, IdentityId::I1, model.slots[i],
                                   model.slots[i], bias_factor, method, options));

  std::size_t pairs = 0;
  for (const std::size_t i : active) {
    for (const std::size_t j : active) {
      if (pairs >= max_pairs) break;
      ++pairs;
      for (IdentityId id :
           {IdentityId::I2, IdentityId::I3, IdentityId::I4, IdentityId::I5})
        out.push_back(off_line_control(model, params, id, model.slots[i], model.slots[j],
                                       bias_factor, method, options));
    }
  }
  return out;
}

}  // namespace glasslab
