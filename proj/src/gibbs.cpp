#include "glasslab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "glasslab/errors.hpp"

namespace glasslab {

namespace {

void check_config(const ModelSpec& model, const std::vector<int>& config) {
  if ((int)config.size() != model.n_sites())
    throw ConfigurationError("configuration must assign a state to every site");
  for (int s : config)
    if (s < 0 || s >= model.spin.q)
      throw ConfigurationError("configuration state out of range for Z_q");
}

void check_aligned(const ModelSpec& model, const NishimoriParams& params,
                   const DisorderSample& sample) {
  if (params.x.size() != model.n_slots())
    throw ConfigurationError("params must provide x for every declared slot");
  if (sample.j.size() != model.n_slots() || sample.k.size() != model.n_slots())
    throw ConfigurationError("disorder sample must cover every declared slot");
  for (double v : params.x)
    if (!(v >= 0.0)) throw ConfigurationError("slot x must be >= 0");
}

// m * (oriented angle) mod q as an integer residue.
int slot_signature(const CouplingSlot& slot, const std::vector<int>& config, int q) {
  long d = slot.one_body() ? config[slot.site_a]
                           : config[slot.site_a] - config[slot.site_b];
  long r = ((long)slot.harmonic * d) % q;
  return (int)((r % q + q) % q);
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= (std::size_t)(x + 1);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

double evaluate_potential(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample, const std::vector<int>& config,
                          double mean_bias) {
  check_aligned(model, params, sample);
  check_config(model, config);
  double u = 0.0;
  for (std::size_t i = 0; i < model.slots.size(); ++i) {
    const auto& slot = model.slots[i];
    const int sig = slot_signature(slot, config, model.spin.q);
    const double c = model.spin.cos_state(sig);
    const double s = model.spin.sin_state(sig);
    const double rx = std::sqrt(params.x[i]);
    u -= (rx * sample.j[i] + mean_bias * params.x[i]) * c + rx * sample.k[i] * s;
  }
  return u;
}

GibbsEvaluator::GibbsEvaluator(const ModelSpec& model, std::vector<SiteObservable> products,
                               std::size_t enumeration_cap)
    : model_(model), products_(std::move(products)) {
  model_.validate();
  const int q = model_.spin.q;
  const int n = model_.n_sites();

  double total = 1.0;
  for (int i = 0; i < n; ++i) total *= (double)q;
  if (total > (double)enumeration_cap) {
    std::ostringstream os;
    os << "enumeration of q^N = " << q << "^" << n << " = " << total
       << " configurations exceeds the cap " << enumeration_cap;
    throw CapacityError(os.str());
  }
  const std::size_t n_configs = (std::size_t)(total + 0.5);

  // Table slots: model slots first, then any slots that appear only in
  // requested products.
  table_slots_ = model_.slots;
  for (const auto& p : products_)
    for (const auto& a : p.atoms) {
      if (a.slot.site_a < 0 || a.slot.site_a >= n ||
          (!a.slot.one_body() && (a.slot.site_b < 0 || a.slot.site_b >= n)))
        throw ConfigurationError("observable slot site out of range");
      if (std::find(table_slots_.begin(), table_slots_.end(), a.slot) == table_slots_.end())
        table_slots_.push_back(a.slot);
    }
  const std::size_t ts = table_slots_.size();

  // Group configurations by integer signature.
  std::unordered_map<std::vector<int>, std::size_t, VecHash> row_of;
  std::vector<std::vector<int>> sigs;
  std::vector<double> mult;
  std::vector<int> config(n, 0), sig(ts);
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (std::size_t s = 0; s < ts; ++s) sig[s] = slot_signature(table_slots_[s], config, q);
    auto [it, inserted] = row_of.try_emplace(sig, sigs.size());
    if (inserted) {
      sigs.push_back(sig);
      mult.push_back(0.0);
    }
    mult[it->second] += 1.0;
    // next configuration (mixed-radix increment)
    for (int i = 0; i < n; ++i) {
      if (++config[i] < q) break;
      config[i] = 0;
    }
  }

  const std::size_t rows = sigs.size();
  cosv_.resize((Eigen::Index)rows, (Eigen::Index)ts);
  sinv_.resize((Eigen::Index)rows, (Eigen::Index)ts);
  sig_.resize((Eigen::Index)rows, (Eigen::Index)ts);
  mult_.resize((Eigen::Index)rows);
  for (std::size_t r = 0; r < rows; ++r) {
    mult_[(Eigen::Index)r] = mult[r];
    for (std::size_t s = 0; s < ts; ++s) {
      sig_((Eigen::Index)r, (Eigen::Index)s) = sigs[r][s];
      cosv_((Eigen::Index)r, (Eigen::Index)s) = model_.spin.cos_state(sigs[r][s]);
      sinv_((Eigen::Index)r, (Eigen::Index)s) = model_.spin.sin_state(sigs[r][s]);
    }
  }

  obs_.resize((Eigen::Index)rows, (Eigen::Index)products_.size());
  for (std::size_t p = 0; p < products_.size(); ++p) {
    std::vector<int> cols;
    for (const auto& a : products_[p].atoms) cols.push_back(table_slot_index(a.slot));
    for (std::size_t r = 0; r < rows; ++r) {
      double v = 1.0;
      for (std::size_t a = 0; a < products_[p].atoms.size(); ++a) {
        const auto col = (Eigen::Index)cols[a];
        v *= products_[p].atoms[a].trig == Trig::Cos ? cosv_((Eigen::Index)r, col)
                                                     : sinv_((Eigen::Index)r, col);
      }
      obs_((Eigen::Index)r, (Eigen::Index)p) = v;
    }
  }

}

int GibbsEvaluator::table_slot_index(const CouplingSlot& slot) const {
  for (std::size_t i = 0; i < table_slots_.size(); ++i)
    if (table_slots_[i] == slot) return (int)i;
  return -1;
}

void GibbsEvaluator::evaluate(const NishimoriParams& params, const DisorderSample& sample,
                              GibbsState& out, double mean_bias) const {
  check_aligned(model_, params, sample);
  const auto ts = (Eigen::Index)table_slots_.size();
  const auto ns = (Eigen::Index)model_.n_slots();
  out.coef_a.setZero(ts);
  out.coef_b.setZero(ts);
  for (Eigen::Index i = 0; i < ns; ++i) {
    const double x = params.x[(std::size_t)i];
    const double rx = std::sqrt(x);
    out.coef_a[i] = rx * sample.j[(std::size_t)i] + mean_bias * x;
    out.coef_b[i] = rx * sample.k[(std::size_t)i];
  }
  // energy = -U per row
  out.energy.noalias() = cosv_ * out.coef_a;
  out.energy.noalias() += sinv_ * out.coef_b;
  const double m = out.energy.maxCoeff();
  out.prob = mult_.array() * (out.energy.array() - m).exp();
  const double w_total = out.prob.sum();
  out.log_z = m + std::log(w_total);
  out.prob /= w_total;
  out.correlators.noalias() = obs_.transpose() * out.prob;
  out.evaluator = this;
}

GibbsState GibbsEvaluator::evaluate(const NishimoriParams& params, const DisorderSample& sample,
                                    double mean_bias) const {
  GibbsState out;
  evaluate(params, sample, out, mean_bias);
  return out;
}

double GibbsEvaluator::replica_average_direct(const GibbsState& state,
                                              const ReplicaPattern& pattern,
                                              std::size_t replicated_cap) const {
  const int k = pattern.arity();
  if (k < 1 || k > 4)
    throw ConfigurationError("replica pattern arity must be between 1 and 4");
  const double full = std::pow((double)model_.spin.q, (double)k * model_.n_sites());
  if (full > (double)replicated_cap) {
    std::ostringstream os;
    os << "replicated enumeration of q^(kN) = " << full << " configurations exceeds the cap "
       << replicated_cap;
    throw CapacityError(os.str());
  }
  struct Fac {
    int col;
    Trig trig;
    int ra, rb;
  };
  std::vector<Fac> facs;
  for (const auto& f : pattern.factors) {
    const int col = table_slot_index(f.slot);
    if (col < 0)
      throw ConfigurationError("pattern slot " + f.slot.label() + " not present in the table");
    facs.push_back({col, f.trig, f.rep_a, f.rep_b});
  }
  const int q = model_.spin.q;
  const std::size_t rows = n_rows();
  std::vector<std::size_t> idx((std::size_t)k, 0);
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (int r = 0; r < k; ++r) w *= state.prob[(Eigen::Index)idx[(std::size_t)r]];
    double v = 1.0;
    for (const auto& f : facs) {
      int s = signature(idx[(std::size_t)f.ra], (std::size_t)f.col);
      if (f.rb >= 0) {
        s -= signature(idx[(std::size_t)f.rb], (std::size_t)f.col);
        s = (s % q + q) % q;
      }
      v *= f.trig == Trig::Cos ? model_.spin.cos_state(s) : model_.spin.sin_state(s);
    }
    acc += w * v;
    int r = 0;
    for (; r < k; ++r) {
      if (++idx[(std::size_t)r] < rows) break;
      idx[(std::size_t)r] = 0;
    }
    if (r == k) break;
  }
  return acc;
}

double GibbsEvaluator::replica_average_factorized(const GibbsState& state,
                                                  const ReplicaPattern& pattern) const {
  const auto terms = expand_pattern(pattern);
  double acc = 0.0;
  for (const auto& term : terms) {
    double v = term.coeff;
    for (const auto& [rep, prod] : term.by_replica) {
      // locate the product among registered products
      int pi = -1;
      for (std::size_t p = 0; p < products_.size(); ++p)
        if (products_[p] == prod) {
          pi = (int)p;
          break;
        }
      if (pi >= 0) {
        v *= state.correlator((std::size_t)pi);
      } else {
        // evaluate the product directly against the rows
        std::vector<std::pair<int, Trig>> cols;
        for (const auto& a : prod.atoms) {
          const int col = table_slot_index(a.slot);
          if (col < 0)
            throw ConfigurationError("pattern slot " + a.slot.label() +
                                     " not present in the table");
          cols.push_back({col, a.trig});
        }
        double mean = 0.0;
        for (std::size_t r = 0; r < n_rows(); ++r) {
          double pv = 1.0;
          for (const auto& [col, trig] : cols)
            pv *= trig == Trig::Cos ? cos_value(r, (std::size_t)col)
                                    : sin_value(r, (std::size_t)col);
          mean += state.prob[(Eigen::Index)r] * pv;
        }
        v *= mean;
      }
      if (v == 0.0) break;
    }
    acc += v;
  }
  return acc;
}

double GibbsSolution::correlator(const SiteObservable& o) const {
  SiteObservable key = o;
  key.canonicalize();
  for (const auto& [obs, val] : correlators)
    if (obs == key) return val;
  throw ConfigurationError("correlator " + key.label() + " was not computed");
}

GibbsSolution exact_gibbs(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample,
                          const std::vector<SiteObservable>& requests,
                          std::size_t enumeration_cap) {
  std::vector<SiteObservable> products;
  for (const auto& slot : model.slots) {
    products.push_back(SiteObservable::one(cos_of(slot)));
    products.push_back(SiteObservable::one(sin_of(slot)));
  }
  for (auto r : requests) {
    r.canonicalize();
    if (std::find(products.begin(), products.end(), r) == products.end())
      products.push_back(std::move(r));
  }
  GibbsEvaluator eval(model, products, enumeration_cap);
  GibbsState state = eval.evaluate(params, sample);
  GibbsSolution out;
  out.log_z = state.log_z;
  for (std::size_t p = 0; p < products.size(); ++p)
    out.correlators.push_back({products[p], state.correlator(p)});
  return out;
}

double replica_correlator(const ModelSpec& model, const NishimoriParams& params,
                          const DisorderSample& sample, const ReplicaPattern& pattern,
                          bool factorized, std::size_t replicated_cap) {
  std::vector<SiteObservable> products;
  GibbsEvaluator eval(model, products);
  GibbsState state = eval.evaluate(params, sample);
  return factorized ? eval.replica_average_factorized(state, pattern)
                    : eval.replica_average_direct(state, pattern, replicated_cap);
}

DisorderSample gauge_transform(const ModelSpec& model, const NishimoriParams& params,
                               const DisorderSample& sample, const std::vector<int>& theta) {
  check_aligned(model, params, sample);
  if ((int)theta.size() != model.n_sites())
    throw ConfigurationError("theta must assign an angle to every site");
  for (int t : theta)
    if (t < 0 || t >= model.spin.q)
      throw ConfigurationError("theta state outside the spin space");

  DisorderSample out = sample;
  for (std::size_t i = 0; i < model.slots.size(); ++i) {
    const auto& slot = model.slots[i];
    const int sig = slot_signature(slot, theta, model.spin.q);
    const double c = model.spin.cos_state(sig);
    const double s = model.spin.sin_state(sig);
    // The full coupling amplitude (J + sqrt(x)) - iK rotates by m*delta(theta):
    // the Gaussian mean sqrt(x) participates in the rotation.
    const double rx = std::sqrt(params.x[i]);
    const double a = sample.j[i] + rx;
    const double b = sample.k[i];
    out.j[i] = a * c + b * s - rx;
    out.k[i] = b * c - a * s;
  }
  return out;
}

}  // namespace glasslab
