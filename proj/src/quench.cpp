#include "glasslab/quench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "glasslab/errors.hpp"
#include "glasslab/gauss_hermite.hpp"
#include "glasslab/parallel.hpp"
#include "glasslab/rng.hpp"

namespace glasslab {

QuenchMethod QuenchMethod::quadrature(int nodes) {
  QuenchMethod m;
  m.kind = Kind::Quadrature;
  m.nodes_per_dim = nodes;
  return m;
}

QuenchMethod QuenchMethod::monte_carlo(std::int64_t n_samples, std::uint64_t seed) {
  QuenchMethod m;
  m.kind = Kind::MonteCarlo;
  m.n_samples = n_samples;
  m.seed = seed;
  return m;
}

std::string QuenchMethod::describe() const {
  std::ostringstream os;
  if (kind == Kind::Quadrature)
    os << "quadrature(nodes=" << nodes_per_dim << ")";
  else
    os << "monte_carlo(samples=" << n_samples << ",seed=" << seed << ")";
  return os.str();
}

QuenchJob::QuenchJob(ModelSpec model) : model_(std::move(model)) { model_.validate(); }

std::size_t QuenchJob::add_product(SiteObservable product) {
  product.canonicalize();
  for (std::size_t i = 0; i < products_.size(); ++i)
    if (products_[i] == product) return i;
  products_.push_back(std::move(product));
  return products_.size() - 1;
}

std::size_t QuenchJob::add_observable(ScalarObservable obs) {
  observables_.push_back(std::move(obs));
  return observables_.size() - 1;
}

std::size_t QuenchJob::add_correlator_observable(const SiteObservable& product) {
  const std::size_t p = add_product(product);
  SiteObservable prod = products_[p];
  return add_observable(
      {prod.label(), [p](const GibbsState& s) { return s.correlator(p); }});
}

std::size_t QuenchJob::add_pressure_observable() {
  return add_observable({"log_z", [](const GibbsState& s) { return s.log_z; }});
}

std::size_t QuenchJob::add_variant(NishimoriParams params) {
  if (params.x.size() != model_.n_slots())
    throw ConfigurationError("variant params must cover the model's slot set");
  for (double v : params.x)
    if (!(v >= 0.0)) throw ConfigurationError("slot x must be >= 0");
  variants_.push_back(std::move(params));
  return variants_.size() - 1;
}

namespace {

struct ActiveDims {
  std::vector<std::size_t> slots;  // indices into model slots, active in some variant
  std::size_t d() const { return 2 * slots.size(); }
};

ActiveDims active_dims(const ModelSpec& model, const std::vector<NishimoriParams>& variants) {
  ActiveDims a;
  for (std::size_t i = 0; i < model.n_slots(); ++i) {
    for (const auto& v : variants)
      if (v.x[i] > 0.0) {
        a.slots.push_back(i);
        break;
      }
  }
  return a;
}

[[noreturn]] void throw_nonfinite(const std::string& obs_name, const ModelSpec& model,
                                  const DisorderSample& sample) {
  std::ostringstream os;
  os << "non-finite value of observable '" << obs_name << "' at disorder sample {";
  for (std::size_t i = 0; i < model.n_slots(); ++i) {
    if (i) os << ", ";
    os << model.slots[i].label() << ": J=" << sample.j[i] << " K=" << sample.k[i];
  }
  os << "}";
  throw NumericalError(os.str());
}

}  // namespace

QuenchJob::Result QuenchJob::run(const QuenchMethod& method) const {
  if (variants_.empty()) throw ConfigurationError("quench job has no parameter variants");
  if (observables_.empty()) throw ConfigurationError("quench job has no observables");

  const ActiveDims active = active_dims(model_, variants_);
  const std::size_t d = active.d();
  const std::size_t vo = variants_.size() * observables_.size();
  const GibbsEvaluator eval(model_, products_, enumeration_cap_);
  const int workers = worker_count();

  Result res;
  res.method_ = method;
  res.n_variants_ = variants_.size();
  res.n_observables_ = observables_.size();

  const bool want_csv = !csv_path_.empty();
  std::vector<double> csv_values;  // [draw][vo], filled in draw order

  auto pass = [&](auto&& draw_sample, std::size_t n_draws, std::size_t block_size,
                  bool record_csv) {
    const std::size_t n_blocks = (n_draws + block_size - 1) / block_size;
    std::vector<std::vector<double>> partials(n_blocks);
    if (record_csv) csv_values.assign(n_draws * vo, 0.0);
    for_blocks(n_draws, block_size, workers,
               [&](std::size_t b, std::size_t begin, std::size_t end) {
                 GibbsState state;
                 DisorderSample sample = DisorderSample::zeros(model_.n_slots());
                 std::vector<double> local(vo, 0.0);
                 for (std::size_t t = begin; t < end; ++t) {
                   const double w = draw_sample(t, sample);
                   for (std::size_t v = 0; v < variants_.size(); ++v) {
                     eval.evaluate(variants_[v], sample, state, mean_bias_);
                     for (std::size_t o = 0; o < observables_.size(); ++o) {
                       const double val = observables_[o].fn(state);
                       if (!std::isfinite(val))
                         throw_nonfinite(observables_[o].name, model_, sample);
                       local[v * observables_.size() + o] += w * val;
                       if (record_csv)
                         csv_values[t * vo + v * observables_.size() + o] = val;
                     }
                   }
                 }
                 partials[b] = std::move(local);
               });
    return partials;
  };

  auto column_sums = [&](const std::vector<std::vector<double>>& partials) {
    std::vector<double> sums(vo, 0.0);
    std::vector<double> col(partials.size());
    for (std::size_t c = 0; c < vo; ++c) {
      for (std::size_t b = 0; b < partials.size(); ++b) col[b] = partials[b][c];
      sums[c] = pairwise_sum(col);
    }
    return sums;
  };

  if (method.kind == QuenchMethod::Kind::Quadrature) {
    const int nodes = method.nodes_per_dim;
    if (nodes < 2) throw ConfigurationError("quadrature requires at least 2 nodes per dimension");
    if (std::pow((double)nodes, (double)d) > kQuadratureNodeCap) {
      std::ostringstream os;
      os << "quadrature over " << nodes << "^" << d << " nodes exceeds the cap "
         << kQuadratureNodeCap << "; use Monte Carlo for this disorder dimension";
      throw CapacityError(os.str());
    }

    auto quad_pass = [&](int n_nodes, bool record_csv) {
      const GaussHermiteRule& rule = gauss_hermite(n_nodes);
      std::size_t total = 1;
      for (std::size_t i = 0; i < d; ++i) total *= (std::size_t)n_nodes;
      auto partials = pass(
          [&](std::size_t t, DisorderSample& sample) {
            double w = 1.0;
            for (const std::size_t slot : active.slots) {
              const std::size_t dj = t % (std::size_t)n_nodes;
              t /= (std::size_t)n_nodes;
              const std::size_t dk = t % (std::size_t)n_nodes;
              t /= (std::size_t)n_nodes;
              sample.j[slot] = rule.nodes[dj];
              sample.k[slot] = rule.nodes[dk];
              w *= rule.weights[dj] * rule.weights[dk];
            }
            return w;
          },
          total, 2048, record_csv);
      return std::pair{column_sums(partials), total};
    };

    auto [values, total] = quad_pass(nodes, want_csv);
    res.value_ = std::move(values);
    res.n_effective_ = (std::int64_t)total;
    res.value_half_ = quad_pass(nodes / 2, false).first;

    if (want_csv) {
      std::ofstream out(csv_path_);
      out << "draw";
      for (std::size_t v = 0; v < variants_.size(); ++v)
        for (const auto& ob : observables_) out << ",v" << v << ":" << ob.name;
      out << "\n";
      out.precision(17);
      for (std::size_t t = 0; t < total; ++t) {
        out << t;
        for (std::size_t c = 0; c < vo; ++c) out << "," << csv_values[t * vo + c];
        out << "\n";
      }
    }
    return res;
  }

  // Monte Carlo
  const std::int64_t requested = method.n_samples;
  if (requested < 16)
    throw ConfigurationError("Monte Carlo requires at least 16 samples (>= 16 batches)");
  const std::size_t n_batches =
      std::clamp<std::size_t>((std::size_t)(requested / 256), 16, 1024);
  const std::size_t batch_size = (std::size_t)requested / n_batches;
  const std::size_t n_used = n_batches * batch_size;

  const CounterRng rng(method.seed);
  std::vector<std::uint64_t> stream_j(model_.n_slots()), stream_k(model_.n_slots());
  for (const std::size_t slot : active.slots) {
    stream_j[slot] = CounterRng::slot_stream(model_.slots[slot], 0);
    stream_k[slot] = CounterRng::slot_stream(model_.slots[slot], 1);
  }

  auto partials = pass(
      [&](std::size_t t, DisorderSample& sample) {
        for (const std::size_t slot : active.slots) {
          sample.j[slot] = rng.normal(stream_j[slot], t);
          sample.k[slot] = rng.normal(stream_k[slot], t);
        }
        return 1.0;
      },
      n_used, batch_size, want_csv);

  res.batch_sums_ = std::move(partials);
  res.batch_size_ = batch_size;
  res.n_effective_ = (std::int64_t)n_used;

  if (want_csv) {
    std::ofstream out(csv_path_);
    out << "sample";
    for (std::size_t v = 0; v < variants_.size(); ++v)
      for (const auto& ob : observables_) out << ",v" << v << ":" << ob.name;
    out << "\n";
    out.precision(17);
    for (std::size_t t = 0; t < n_used; ++t) {
      out << t;
      for (std::size_t c = 0; c < vo; ++c) out << "," << csv_values[t * vo + c];
      out << "\n";
    }
  }
  return res;
}

double QuenchJob::Result::mc_mean(const std::vector<Term>& terms) const {
  std::vector<double> col(batch_sums_.size());
  for (std::size_t b = 0; b < batch_sums_.size(); ++b) {
    double s = 0.0;
    for (const auto& t : terms)
      s += t.coeff * batch_sums_[b][t.variant * n_observables_ + t.observable];
    col[b] = s;
  }
  return pairwise_sum(col) / (double)n_effective_;
}

QuenchedEstimate QuenchJob::Result::combine(const std::vector<Term>& terms) const {
  for (const auto& t : terms)
    if (t.variant >= n_variants_ || t.observable >= n_observables_)
      throw ConfigurationError("combination term out of range");

  QuenchedEstimate e;
  e.method = method_;
  e.n_effective = n_effective_;
  if (method_.kind == QuenchMethod::Kind::Quadrature) {
    double v = 0.0, vh = 0.0;
    for (const auto& t : terms) {
      v += t.coeff * value_[t.variant * n_observables_ + t.observable];
      vh += t.coeff * value_half_[t.variant * n_observables_ + t.observable];
    }
    e.value = v;
    e.std_error = 0.0;
    e.convergence_delta = std::abs(v - vh);
    return e;
  }
  const double mean = mc_mean(terms);
  const std::size_t B = batch_sums_.size();
  double ss = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    double s = 0.0;
    for (const auto& t : terms)
      s += t.coeff * batch_sums_[b][t.variant * n_observables_ + t.observable];
    const double m_b = s / (double)batch_size_;
    ss += (m_b - mean) * (m_b - mean);
  }
  e.value = mean;
  e.std_error = std::sqrt(ss / (double)(B - 1) / (double)B);
  return e;
}

QuenchedEstimate QuenchJob::Result::estimate(std::size_t variant, std::size_t observable) const {
  return combine({{variant, observable, 1.0}});
}

QuenchedEstimate quenched_average(const ModelSpec& model, const NishimoriParams& params,
                                  const std::vector<SiteObservable>& products,
                                  const std::function<double(const GibbsState&)>& fn,
                                  const QuenchMethod& method) {
  QuenchJob job(model);
  for (const auto& p : products) job.add_product(p);
  job.add_observable({"observable", fn});
  job.add_variant(params);
  return job.run(method).estimate(0, 0);
}

QuenchedEstimate quenched_pressure(const ModelSpec& model, const NishimoriParams& params,
                                   const QuenchMethod& method) {
  QuenchJob job(model);
  job.add_pressure_observable();
  job.add_variant(params);
  return job.run(method).estimate(0, 0);
}

std::vector<QuenchedEstimate> common_random_numbers(const ModelSpec& model,
                                                    const std::vector<NishimoriParams>& params_list,
                                                    const QuenchMethod& method) {
  if (params_list.empty()) throw ConfigurationError("common_random_numbers needs parameters");
  QuenchJob job(model);
  job.add_pressure_observable();
  for (const auto& p : params_list) job.add_variant(p);
  auto res = job.run(method);
  std::vector<QuenchedEstimate> out;
  for (std::size_t v = 0; v < params_list.size(); ++v) out.push_back(res.estimate(v, 0));
  return out;
}

}  // namespace glasslab
