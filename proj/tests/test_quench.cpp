#include <cmath>
#include <cstdlib>

#include <doctest.h>

#include "glasslab/errors.hpp"
#include "glasslab/gauss_hermite.hpp"
#include "glasslab/parallel.hpp"
#include "glasslab/quench.hpp"
#include "glasslab/rng.hpp"
#include "support/oracles.hpp"

using namespace glasslab;

TEST_CASE("Gauss-Hermite rules integrate Gaussian moments exactly") {
  for (const int n : {2, 3, 5, 8, 32, 64, 256, 512}) {
    const auto& rule = gauss_hermite(n);
    double w = 0, m1 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
      w += rule.weights[(std::size_t)i];
      m1 += rule.weights[(std::size_t)i] * rule.nodes[(std::size_t)i];
      m2 += rule.weights[(std::size_t)i] * std::pow(rule.nodes[(std::size_t)i], 2);
      m4 += rule.weights[(std::size_t)i] * std::pow(rule.nodes[(std::size_t)i], 4);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    if (n >= 3) CHECK(m4 == doctest::Approx(3.0).epsilon(1e-11));
  }
}

TEST_CASE("normal quantile inverts the normal CDF to near machine precision") {
  for (const double u : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1 - 1e-9}) {
    const double z = normal_quantile(u);
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(cdf == doctest::Approx(u).epsilon(1e-12));
  }
  // symmetry where 1-u is exactly representable relative to u
  for (const double u : {0.01, 0.1, 0.25, 0.4}) {
    CHECK(normal_quantile(1.0 - u) ==
          doctest::Approx(-normal_quantile(u)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)normal_quantile(0.0), NumericalError);
}

TEST_CASE("counter RNG: reproducible, well-mixed, stream-independent") {
  const CounterRng rng(12345);
  CHECK(rng.normal(7, 99) == rng.normal(7, 99));
  CHECK(rng.normal(7, 99) != rng.normal(7, 100));
  CHECK(rng.normal(7, 99) != rng.normal(8, 99));
  CHECK(CounterRng(1).normal(7, 99) != CounterRng(2).normal(7, 99));

  const std::uint64_t sj = CounterRng::slot_stream(CouplingSlot::bond(0, 1, 1), 0);
  const std::uint64_t sk = CounterRng::slot_stream(CouplingSlot::bond(0, 1, 1), 1);
  const std::uint64_t s2 = CounterRng::slot_stream(CouplingSlot::bond(0, 2, 1), 0);
  CHECK(sj != sk);
  CHECK(sj != s2);

  const std::size_t n = 200000;
  double sum = 0, sq = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal(sj, i);
    const double b = rng.normal(sk, i);
    sum += a;
    sq += a * a;
    cross += a * b;
  }
  CHECK(sum / (double)n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(sq / (double)n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(cross / (double)n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
}

TEST_CASE("quenched pressure: free system is exact with zero error") {
  const ModelSpec model = ModelSpec::chain(3, 3);
  const NishimoriParams params = NishimoriParams::zeros(model.n_slots());
  for (const auto method : {QuenchMethod::quadrature(16), QuenchMethod::monte_carlo(4096, 1)}) {
    const auto est = quenched_pressure(model, params, method);
    CHECK(est.value == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-14));
    CHECK(est.std_error == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("quenched pressure: single-bond Ising against the adaptive oracle") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const double want =
      oracle::gauss_expect([](double j) { return std::log(4.0 * std::cosh(j + 1.0)); });

  const auto quad = quenched_pressure(model, params, QuenchMethod::quadrature(64));
  CHECK(quad.value == doctest::Approx(want).epsilon(1e-10));
  CHECK(quad.n_effective == 64 * 64);

  const auto mc = quenched_pressure(model, params, QuenchMethod::monte_carlo(1000000, 7));
  CHECK(std::abs(mc.value - want) <= 3.0 * mc.std_error);
  CHECK(mc.std_error > 0.0);
}

TEST_CASE("quenched correlator: E[tanh(J+1)] via the engine") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const double want = oracle::gauss_expect([](double j) { return std::tanh(j + 1.0); });
  const auto est = quenched_average(
      model, params, {SiteObservable::one(cos_of(model.slots[0]))},
      [](const GibbsState& s) { return s.correlator(0); }, QuenchMethod::quadrature(64));
  CHECK(est.value == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("quenched pressure is strictly increasing in x (single-bond Ising)") {
  const ModelSpec model = ModelSpec::single_bond(2);
  double prev = -1e300;
  for (const double x : {0.25, 0.5, 1.0, 2.0}) {
    const auto est =
        quenched_pressure(model, NishimoriParams::uniform(1, x), QuenchMethod::quadrature(64));
    CHECK(est.value > prev);
    prev = est.value;
  }
}

TEST_CASE("two-bond chain: quadrature (d=4) and Monte Carlo agree within 3 sigma") {
  const ModelSpec model = ModelSpec::chain(3, 3);
  const NishimoriParams params = NishimoriParams::uniform(2, 0.5);
  const auto quad = quenched_pressure(model, params, QuenchMethod::quadrature(32));
  const auto mc = quenched_pressure(model, params, QuenchMethod::monte_carlo(200000, 11));
  CHECK(std::abs(quad.value - mc.value) <= 3.0 * mc.std_error);
}

TEST_CASE("quadrature convergence flag: node doubling is tight on single bonds") {
  const ModelSpec model = ModelSpec::single_bond(2);
  for (const double x : {0.25, 1.0, 4.0}) {
    const auto est = quenched_pressure(model, NishimoriParams::uniform(1, x),
                                       QuenchMethod::quadrature(512));
    CHECK(est.convergence_delta < 1e-10);  // |value(512) - value(256)|
  }
}

TEST_CASE("common random numbers: identical params give identical values") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams p = NishimoriParams::uniform(1, 1.0);
  const auto ests = common_random_numbers(model, {p, p}, QuenchMethod::monte_carlo(10000, 3));
  CHECK(ests[0].value == ests[1].value);  // bitwise
}

TEST_CASE("common random numbers: FD variance strongly reduced vs independent draws") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const double x = 1.0, h = 1e-2;
  const NishimoriParams p0 = NishimoriParams::uniform(1, x);
  const NishimoriParams p1 = NishimoriParams::uniform(1, x + h);

  QuenchJob job(model);
  job.add_pressure_observable();
  job.add_variant(p0);
  job.add_variant(p1);
  const auto res = job.run(QuenchMethod::monte_carlo(100000, 5));
  const auto crn_diff = res.combine({{1, 0, 1.0}, {0, 0, -1.0}});

  const auto a = quenched_pressure(model, p0, QuenchMethod::monte_carlo(100000, 101));
  const auto b = quenched_pressure(model, p1, QuenchMethod::monte_carlo(100000, 202));
  const double indep_se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);

  CHECK(crn_diff.std_error * 10.0 < indep_se);
  CHECK(std::abs(crn_diff.value - (b.value - a.value)) <=
        3.0 * (crn_diff.std_error + indep_se));
}

TEST_CASE("common random numbers: central second difference is finite and stable") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const double x = 1.0, h = 5e-3;
  const auto ests = common_random_numbers(
      model,
      {NishimoriParams::uniform(1, x - h), NishimoriParams::uniform(1, x),
       NishimoriParams::uniform(1, x + h)},
      QuenchMethod::monte_carlo(200000, 13));
  const double second = (ests[0].value - 2.0 * ests[1].value + ests[2].value) / (h * h);
  CHECK(std::isfinite(second));
  CHECK(std::abs(second) < 5.0);  // smooth desk-scale curvature
}

TEST_CASE("Jensen sanity: E[log Z] <= log E[Z] with the closed-form annealed average") {
  const ModelSpec model = ModelSpec::single_bond(2);
  for (const double x : {0.5, 1.0, 2.0}) {
    const auto p = quenched_pressure(model, NishimoriParams::uniform(1, x),
                                     QuenchMethod::quadrature(64));
    const double annealed = std::log(4.0) + 0.5 * x + std::log(std::cosh(x));
    CHECK(p.value <= annealed + 1e-12);
  }
}

TEST_CASE("quadrature dimension cap raises a capacity error naming Monte Carlo") {
  const ModelSpec model = ModelSpec::ring(2, 4);  // 4 slots -> d = 8
  const NishimoriParams params = NishimoriParams::uniform(4, 1.0);
  try {
    (void)quenched_pressure(model, params, QuenchMethod::quadrature(32));
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("Monte Carlo") != std::string::npos);
  }
}

TEST_CASE("non-finite observables are reported with the offending sample") {
  const ModelSpec model = ModelSpec::single_bond(2);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  QuenchJob job(model);
  job.add_observable({"explodes", [](const GibbsState&) { return std::log(-1.0); }});
  job.add_variant(params);
  try {
    (void)job.run(QuenchMethod::quadrature(4));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("explodes") != std::string::npos);
    CHECK(std::string(e.what()).find("J=") != std::string::npos);
  }
}

TEST_CASE("estimates are identical across runs and worker counts") {
  const ModelSpec model = ModelSpec::chain(3, 3);
  const NishimoriParams params = NishimoriParams::uniform(2, 0.7);
  const auto method = QuenchMethod::monte_carlo(50000, 99);

  setenv("GLASSLAB_WORKERS", "1", 1);
  const auto a = quenched_pressure(model, params, method);
  setenv("GLASSLAB_WORKERS", "4", 1);
  const auto b = quenched_pressure(model, params, method);
  setenv("GLASSLAB_WORKERS", "8", 1);
  const auto c = quenched_pressure(model, params, method);
  unsetenv("GLASSLAB_WORKERS");

  CHECK(a.value == b.value);
  CHECK(b.value == c.value);
  CHECK(a.std_error == c.std_error);

  setenv("GLASSLAB_WORKERS", "1", 1);
  const auto qa = quenched_pressure(model, params, QuenchMethod::quadrature(16));
  setenv("GLASSLAB_WORKERS", "8", 1);
  const auto qb = quenched_pressure(model, params, QuenchMethod::quadrature(16));
  unsetenv("GLASSLAB_WORKERS");
  CHECK(qa.value == qb.value);
}

TEST_CASE("pairwise summation helper is deterministic and correct") {
  std::vector<double> v;
  double plain = 0.0;
  for (int i = 0; i < 1000; ++i) {
    v.push_back(std::sin((double)i));
    plain += v.back();
  }
  CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
  CHECK(pairwise_sum(v) == pairwise_sum(v));
  CHECK(pairwise_sum({}) == 0.0);
  CHECK(pairwise_sum({3.5}) == 3.5);
}

TEST_CASE("Monte Carlo error bars are calibrated: 3-sigma coverage over 100 seeds") {
  const ModelSpec model = ModelSpec::single_bond(3);
  const NishimoriParams params = NishimoriParams::uniform(1, 1.0);
  const auto quad = quenched_pressure(model, params, QuenchMethod::quadrature(64));
  int within = 0;
  const int n_seeds = 100;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    const auto mc =
        quenched_pressure(model, params, QuenchMethod::monte_carlo(20000, (std::uint64_t)seed));
    if (std::abs(mc.value - quad.value) <= 3.0 * mc.std_error) ++within;
  }
  CHECK(within >= 99);
}
