#include <cmath>
#include <random>

#include <doctest.h>

#include "glasslab/errors.hpp"
#include "glasslab/gibbs.hpp"
#include "glasslab/model.hpp"
#include "support/oracles.hpp"

using namespace glasslab;

namespace {

// random disorder/config helpers with a fixed-seed generator per test
DisorderSample random_sample(const ModelSpec& model, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  DisorderSample s = DisorderSample::zeros(model.n_slots());
  for (std::size_t i = 0; i < model.n_slots(); ++i) {
    s.j[i] = n01(gen);
    s.k[i] = n01(gen);
  }
  return s;
}

std::vector<int> random_config(const ModelSpec& model, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> d(0, model.spin.q - 1);
  std::vector<int> c((std::size_t)model.n_sites());
  for (auto& v : c) v = d(gen);
  return c;
}

std::vector<oracle::Slot> to_oracle(const ModelSpec& model, const NishimoriParams& params,
                                    const DisorderSample& sample) {
  std::vector<oracle::Slot> out;
  for (std::size_t i = 0; i < model.n_slots(); ++i) {
    const auto& s = model.slots[i];
    out.push_back({s.one_body(), s.site_a, s.site_b, s.harmonic, params.x[i], sample.j[i],
                   sample.k[i]});
  }
  return out;
}

}  // namespace

TEST_CASE("spin space trig values are exact at the special angles") {
  SpinSpace ising{2};
  CHECK(ising.cos_state(0) == 1.0);
  CHECK(ising.cos_state(1) == -1.0);
  CHECK(ising.sin_state(0) == 0.0);
  CHECK(ising.sin_state(1) == 0.0);  // sin(pi) exactly zero

  SpinSpace z4{4};
  CHECK(z4.cos_state(1) == 0.0);  // cos(pi/2)
  CHECK(z4.sin_state(1) == 1.0);
  CHECK(z4.sin_state(3) == -1.0);
  CHECK(z4.cos_state(2) == -1.0);

  SpinSpace z3{3};
  CHECK(z3.cos_state(1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(z3.sin_state(1) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
}

TEST_CASE("model validation rejects malformed structures") {
  ModelSpec m = ModelSpec::single_bond(2);
  CHECK_NOTHROW(m.validate());

  SUBCASE("bond endpoint out of range") {
    m.graph.bonds[0] = {0, 5};
    CHECK_THROWS_AS(m.validate(), ConfigurationError);
  }
  SUBCASE("slot references a bond not in the list") {
    m.slots.push_back(CouplingSlot::bond(0, 1, 2));
    m.slots.push_back(CouplingSlot::bond(1, 0, 3));  // normalizes to (0,1), fine
    CHECK_NOTHROW(m.validate());
    m.graph.bonds.clear();
    CHECK_THROWS_AS(m.validate(), ConfigurationError);
  }
  SUBCASE("duplicate slot") {
    m.slots.push_back(CouplingSlot::bond(1, 0, 1));
    CHECK_THROWS_AS(m.validate(), ConfigurationError);
  }
  SUBCASE("q below 2") {
    m.spin.q = 1;
    CHECK_THROWS_AS(m.validate(), ConfigurationError);
  }
}

TEST_CASE("canonical coupling converts to x on the line and rejects off-line triples") {
  CanonicalCoupling ok{2.0, 0.5, 1.0};  // D/sigma2 = 2 = beta
  CHECK(ok.to_x() == doctest::Approx(2.0).epsilon(1e-14));  // x = beta*D
  CanonicalCoupling off{2.0, 0.5, 1.1};
  CHECK_THROWS_AS(off.to_x(), ConfigurationError);
}

TEST_CASE("model document parsing") {
  const char* doc = R"({
    "spin_space": {"q": 3},
    "sites": 3,
    "bonds": [[0,1],[1,2]],
    "slots": [{"bond": [0,1], "m": 1, "x": 0.5},
              {"bond": [1,2], "m": 1, "x": 0.25},
              {"site": 0, "m": 1, "x": 0.1}],
    "seed": 42
  })";
  auto [model, params] = model_from_json(doc);
  CHECK(model.spin.q == 3);
  CHECK(model.n_sites() == 3);
  CHECK(model.n_slots() == 3);
  CHECK(model.default_seed == 42);
  CHECK(params.x == std::vector<double>{0.5, 0.25, 0.1});
  CHECK(model.graph.one_body_sites == std::vector<int>{0});

  CHECK_THROWS_AS(model_from_json("{not json"), ConfigurationError);
  CHECK_THROWS_AS(model_from_json("{}"), ConfigurationError);
  CHECK_THROWS_AS(model_from_json(R"({"spin_space":{"q":2},"sites":2,"bonds":[[0,1]],
    "slots":[{"bond":[0,1],"m":1,"x":-1}]})"),
                  ConfigurationError);
}

TEST_CASE("potential: zero couplings give zero potential") {
  const ModelSpec model = ModelSpec::chain(3, 3);
  const NishimoriParams params = NishimoriParams::zeros(model.n_slots());
  std::mt19937_64 gen(7);
  const DisorderSample s = random_sample(model, gen);
  for (int rep = 0; rep < 5; ++rep)
    CHECK(evaluate_potential(model, params, s, random_config(model, gen)) == 0.0);
}

TEST_CASE("potential: Ising single bond at aligned configuration") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  DisorderSample s = DisorderSample::zeros(1);
  s.k[0] = 0.77;  // sin channel never contributes for q = 2
  CHECK(evaluate_potential(model, params, s, {0, 0}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("potential: Z4 bond with quarter-turn angle difference") {
  const ModelSpec model = ModelSpec::single_bond(4);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  DisorderSample s = DisorderSample::zeros(1);
  s.j[0] = 0.5;
  s.k[0] = 0.25;
  // delta phi = pi/2: cos kills J and mean terms, leaving -sqrt(1)*0.25*1
  CHECK(evaluate_potential(model, params, s, {1, 0}) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("potential: errors on malformed requests") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const DisorderSample s = DisorderSample::zeros(1);
  CHECK_THROWS_AS(evaluate_potential(model, params, s, {0}), ConfigurationError);
  CHECK_THROWS_AS(evaluate_potential(model, params, s, {0, 2}), ConfigurationError);
  CHECK_THROWS_AS(evaluate_potential(model, NishimoriParams::zeros(2), s, {0, 0}),
                  ConfigurationError);
  CHECK_THROWS_AS(evaluate_potential(model, params, DisorderSample::zeros(2), {0, 0}),
                  ConfigurationError);
}

TEST_CASE("potential is affine in each disorder entry (three-point collinearity)") {
  const ModelSpec model = ModelSpec::chain(4, 3);
  const NishimoriParams params{{0.5, 1.5}};
  std::mt19937_64 gen(11);
  const auto config = random_config(model, gen);
  DisorderSample s = random_sample(model, gen);
  auto channel = [](DisorderSample& d, int which) -> std::vector<double>& {
    return which == 0 ? d.j : d.k;
  };
  for (std::size_t slot = 0; slot < model.n_slots(); ++slot) {
    for (int which : {0, 1}) {
      DisorderSample a = s, b = s, mid = s;
      channel(a, which)[slot] = 0.0;
      channel(b, which)[slot] = 2.0;
      channel(mid, which)[slot] = 1.0;
      const double ua = evaluate_potential(model, params, a, config);
      const double ub = evaluate_potential(model, params, b, config);
      const double um = evaluate_potential(model, params, mid, config);
      CHECK(um == doctest::Approx(0.5 * (ua + ub)).epsilon(1e-14));
    }
  }
}

TEST_CASE("exact_gibbs: free system has uniform-measure correlators") {
  const ModelSpec model = ModelSpec::chain(5, 3);
  const NishimoriParams params = NishimoriParams::zeros(model.n_slots());
  const DisorderSample s = DisorderSample::zeros(model.n_slots());
  const auto bond = CouplingSlot::bond(0, 1, 1);
  const auto sol = exact_gibbs(model, params, s,
                               {SiteObservable::one(cos_of(CouplingSlot::bond(0, 1, 5))),
                                SiteObservable::one(cos_of(CouplingSlot::bond(0, 1, 10)))});
  CHECK(sol.log_z == doctest::Approx(3.0 * std::log(5.0)).epsilon(1e-14));
  CHECK(sol.correlator(SiteObservable::one(cos_of(bond))) == doctest::Approx(0.0));
  // m = q acts as m = 0 on Z_q: <cos> = 1
  CHECK(sol.correlator(SiteObservable::one(cos_of(CouplingSlot::bond(0, 1, 5)))) ==
        doctest::Approx(1.0));
  CHECK(sol.correlator(SiteObservable::one(cos_of(CouplingSlot::bond(0, 1, 10)))) ==
        doctest::Approx(1.0));
}

TEST_CASE("exact_gibbs: Ising single bond matches the closed form") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  DisorderSample s = DisorderSample::zeros(1);
  s.j[0] = 0.3;
  const double h = std::sqrt(1.0) * 0.3 + 1.0;
  const auto sol = exact_gibbs(model, params, s);
  CHECK(sol.log_z == doctest::Approx(std::log(4.0 * std::cosh(h))).epsilon(1e-14));
  CHECK(sol.correlator(SiteObservable::one(cos_of(model.slots[0]))) ==
        doctest::Approx(std::tanh(h)).epsilon(1e-14));
  CHECK(sol.correlator(SiteObservable::one(sin_of(model.slots[0]))) == 0.0);
}

TEST_CASE("exact_gibbs: Z3 bond against the 9-configuration oracle") {
  const ModelSpec model = ModelSpec::single_bond(3);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const DisorderSample s = DisorderSample::zeros(1);
  const auto slots = to_oracle(model, params, s);

  const auto sol = exact_gibbs(model, params, s);
  CHECK(sol.log_z == doctest::Approx(oracle::log_z(3, 2, slots)).epsilon(1e-13));
  const double cos_oracle = oracle::average(3, 2, slots, [&](const std::vector<int>& c) {
    return std::cos(oracle::angle(3, 1, c[0] - c[1]));
  });
  CHECK(sol.correlator(SiteObservable::one(cos_of(model.slots[0]))) ==
        doctest::Approx(cos_oracle).epsilon(1e-13));
}

TEST_CASE("exact_gibbs agrees with brute force on random mixed instances") {
  std::mt19937_64 gen(2024);
  for (const int q : {2, 3, 4, 5}) {
    ModelSpec model = ModelSpec::chain(q, 3);
    model.slots.push_back(CouplingSlot::bond(0, 1, 2));  // second harmonic
    model.slots.push_back(CouplingSlot::site(1, 1));
    model.graph.one_body_sites = {1};
    std::uniform_real_distribution<double> ux(0.0, 2.0);
    NishimoriParams params;
    for (std::size_t i = 0; i < model.n_slots(); ++i) params.x.push_back(ux(gen));
    const DisorderSample s = random_sample(model, gen);
    const auto slots = to_oracle(model, params, s);

    const auto sol = exact_gibbs(model, params, s);
    CHECK(sol.log_z == doctest::Approx(oracle::log_z(q, 3, slots)).epsilon(1e-12));
    for (const auto& slot : model.slots) {
      const double want = oracle::average(q, 3, slots, [&](const std::vector<int>& c) {
        const int d = slot.one_body() ? c[(std::size_t)slot.site_a]
                                      : c[(std::size_t)slot.site_a] - c[(std::size_t)slot.site_b];
        return std::sin(oracle::angle(q, slot.harmonic, d));
      });
      CHECK(sol.correlator(SiteObservable::one(sin_of(slot))) ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact_gibbs: correlator bounds hold") {
  std::mt19937_64 gen(5);
  const ModelSpec model = ModelSpec::ring(4, 3);
  const NishimoriParams params = NishimoriParams::uniform(model.n_slots(), 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto sol = exact_gibbs(model, params, random_sample(model, gen));
    for (const auto& slot : model.slots) {
      const double c = sol.correlator(SiteObservable::one(cos_of(slot)));
      const double s = sol.correlator(SiteObservable::one(sin_of(slot)));
      CHECK(std::abs(c) <= 1.0 + 1e-14);
      CHECK(std::abs(s) <= 1.0 + 1e-14);
      CHECK(c * c + s * s <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("exact_gibbs: enumeration cap raises a capacity error") {
  const ModelSpec model = ModelSpec::chain(16, 6);  // 16^6 = 16.7M > 2^20
  const NishimoriParams params = NishimoriParams::zeros(model.n_slots());
  const DisorderSample s = DisorderSample::zeros(model.n_slots());
  CHECK_THROWS_AS((void)exact_gibbs(model, params, s), CapacityError);
}

TEST_CASE("replica correlator: zero coupling kills the two-replica overlap") {
  const ModelSpec model = ModelSpec::single_bond(3);
  const NishimoriParams params = NishimoriParams::zeros(1);
  const DisorderSample s = DisorderSample::zeros(1);
  const auto pattern = ReplicaPattern::overlap_cos(model.slots[0], 0, 1);
  CHECK(replica_correlator(model, params, s, pattern, true) == doctest::Approx(0.0));
  CHECK(replica_correlator(model, params, s, pattern, false) == doctest::Approx(0.0));
}

TEST_CASE("replica correlator: Ising overlap equals tanh^2") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  DisorderSample s = DisorderSample::zeros(1);
  s.j[0] = 0.3;
  const double t = std::tanh(1.3);
  const auto pattern = ReplicaPattern::overlap_cos(model.slots[0], 0, 1);
  CHECK(replica_correlator(model, params, s, pattern, true) ==
        doctest::Approx(t * t).epsilon(1e-14));
  CHECK(replica_correlator(model, params, s, pattern, false) ==
        doctest::Approx(t * t).epsilon(1e-14));
}

TEST_CASE("replica correlator: direct and factorized paths agree everywhere") {
  std::mt19937_64 gen(99);
  const ModelSpec model = ModelSpec::single_bond(3);
  NishimoriParams params = NishimoriParams::uniform(1, 0.5);
  DisorderSample s = DisorderSample::zeros(1);
  s.j[0] = 0.2;
  s.k[0] = -0.1;

  SUBCASE("two-replica overlap on the 81-state space") {
    const auto pattern = ReplicaPattern::overlap_cos(model.slots[0], 0, 1);
    const double direct = replica_correlator(model, params, s, pattern, false);
    const double fact = replica_correlator(model, params, s, pattern, true);
    CHECK(direct == doctest::Approx(fact).epsilon(1e-12));
    // and against the raw-configuration oracle
    const auto slots = to_oracle(model, params, s);
    const double want =
        oracle::replica_average(3, 2, slots, 2, [&](const std::vector<std::vector<int>>& r) {
          const double d1 = oracle::angle(3, 1, r[0][0] - r[0][1]);
          const double d2 = oracle::angle(3, 1, r[1][0] - r[1][1]);
          return std::cos(d1 - d2);
        });
    CHECK(direct == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("random patterns of arity 2..4 on q in {2,3}") {
    for (const int q : {2, 3}) {
      const ModelSpec m2 = ModelSpec::chain(q, 2);
      NishimoriParams p2 = NishimoriParams::uniform(1, 0.7);
      std::normal_distribution<double> n01;
      DisorderSample s2 = DisorderSample::zeros(1);
      s2.j[0] = n01(gen);
      s2.k[0] = n01(gen);
      for (int arity = 2; arity <= 4; ++arity) {
        ReplicaPattern pat;
        pat.factors.push_back({m2.slots[0], Trig::Cos, 0, arity - 1});
        pat.factors.push_back({m2.slots[0], Trig::Sin, arity - 1, arity >= 3 ? 1 : 0});
        if (arity >= 3) pat.factors.push_back({m2.slots[0], Trig::Cos, 2, -1});
        const double direct = replica_correlator(m2, p2, s2, pat, false);
        const double fact = replica_correlator(m2, p2, s2, pat, true);
        CHECK(direct == doctest::Approx(fact).epsilon(1e-12));
      }
    }
  }

  SUBCASE("arity above 4 is rejected") {
    ReplicaPattern pat;
    pat.factors.push_back({model.slots[0], Trig::Cos, 0, 4});
    CHECK_THROWS_AS((void)replica_correlator(model, params, s, pat, true), ConfigurationError);
  }
}

TEST_CASE("gauge transform: identity angles leave the sample unchanged") {
  const ModelSpec model = ModelSpec::ring(4, 3);
  const NishimoriParams params = NishimoriParams::uniform(model.n_slots(), 1.3);
  std::mt19937_64 gen(3);
  const DisorderSample s = random_sample(model, gen);
  const auto out = gauge_transform(model, params, s, {0, 0, 0});
  CHECK(out.j == s.j);
  CHECK(out.k == s.k);
}

TEST_CASE("gauge transform: potential invariance configuration by configuration") {
  std::mt19937_64 gen(17);
  for (const int q : {2, 3, 4}) {
    ModelSpec model = ModelSpec::chain(q, 3);
    model.slots.push_back(CouplingSlot::site(2, 1));
    model.graph.one_body_sites = {2};
    NishimoriParams params;
    std::uniform_real_distribution<double> ux(0.0, 3.0);
    for (std::size_t i = 0; i < model.n_slots(); ++i) params.x.push_back(ux(gen));
    std::uniform_int_distribution<int> dq(0, q - 1);

    for (int rep = 0; rep < 10; ++rep) {
      const DisorderSample s = random_sample(model, gen);
      std::vector<int> theta((std::size_t)model.n_sites());
      for (auto& t : theta) t = dq(gen);
      const DisorderSample ts = gauge_transform(model, params, s, theta);

      std::vector<int> cfg((std::size_t)model.n_sites(), 0);
      while (true) {
        std::vector<int> shifted = cfg;
        for (std::size_t i = 0; i < shifted.size(); ++i)
          shifted[i] = ((cfg[i] - theta[i]) % q + q) % q;
        const double u0 = evaluate_potential(model, params, s, cfg);
        const double u1 = evaluate_potential(model, params, ts, shifted);
        CHECK(u1 == doctest::Approx(u0).epsilon(1e-12));
        std::size_t i = 0;
        for (; i < cfg.size(); ++i) {
          if (++cfg[i] < q) break;
          cfg[i] = 0;
        }
        if (i == cfg.size()) break;
      }
    }
  }
}

TEST_CASE("gauge transform: log Z invariant for 100 random pairs per model") {
  std::mt19937_64 gen(29);
  for (const int q : {2, 3, 4}) {
    const ModelSpec model = ModelSpec::ring(q, 4);
    const NishimoriParams params = NishimoriParams::uniform(model.n_slots(), 0.8);
    std::uniform_int_distribution<int> dq(0, q - 1);
    for (int rep = 0; rep < 100; ++rep) {
      const DisorderSample s = random_sample(model, gen);
      std::vector<int> theta((std::size_t)model.n_sites());
      for (auto& t : theta) t = dq(gen);
      const auto a = exact_gibbs(model, params, s);
      const auto b = exact_gibbs(model, params, gauge_transform(model, params, s, theta));
      CHECK(b.log_z == doctest::Approx(a.log_z).epsilon(1e-12));
    }
  }
}

TEST_CASE("gauge transform: Z4 quarter turn rotates the coupling pair") {
  const ModelSpec model = ModelSpec::single_bond(4);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  DisorderSample s = DisorderSample::zeros(1);
  s.j[0] = 0.5;
  s.k[0] = -0.2;
  const auto out = gauge_transform(model, params, s, {1, 0});  // theta = (pi/2, 0)
  // (J + sqrt(x)) - iK rotated by pi/2
  CHECK(out.j[0] == doctest::Approx(-0.2 - 1.0).epsilon(1e-14));
  CHECK(out.k[0] == doctest::Approx(-(0.5 + 1.0)).epsilon(1e-14));
  const auto a = exact_gibbs(model, params, s);
  const auto b = exact_gibbs(model, params, out);
  CHECK(b.log_z == doctest::Approx(a.log_z).epsilon(1e-12));
}

TEST_CASE("gauge transform: theta outside the spin space is rejected") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const DisorderSample s = DisorderSample::zeros(1);
  CHECK_THROWS_AS((void)gauge_transform(model, params, s, {2, 0}), ConfigurationError);
  CHECK_THROWS_AS((void)gauge_transform(model, params, s, {0}), ConfigurationError);
}

TEST_CASE("Ising reduction: sin channel identically zero, two-valued oracle agrees") {
  std::mt19937_64 gen(31);
  const ModelSpec model = ModelSpec::chain(2, 3);
  const NishimoriParams params{{0.7, 1.9}};
  for (int rep = 0; rep < 10; ++rep) {
    const DisorderSample s = random_sample(model, gen);
    const auto sol = exact_gibbs(model, params, s);
    for (const auto& slot : model.slots)
      CHECK(sol.correlator(SiteObservable::one(sin_of(slot))) == 0.0);

    // dedicated +-1 spin oracle: H-effective per bond h_i = sqrt(x) J + x
    double z = 0.0;
    double corr01 = 0.0;
    for (int s0 : {-1, 1})
      for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) {
          const double h0 = (std::sqrt(params.x[0]) * s.j[0] + params.x[0]) * s0 * s1;
          const double h1 = (std::sqrt(params.x[1]) * s.j[1] + params.x[1]) * s1 * s2;
          const double w = std::exp(h0 + h1);
          z += w;
          corr01 += w * s0 * s1;
        }
    CHECK(sol.log_z == doctest::Approx(std::log(z)).epsilon(1e-13));
    CHECK(sol.correlator(SiteObservable::one(cos_of(model.slots[0]))) ==
          doctest::Approx(corr01 / z).epsilon(1e-13));
  }
}
