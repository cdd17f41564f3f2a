#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wfforge/rng.hpp"
#include "wfforge/stats.hpp"

using namespace wfforge;
using Catch::Approx;

TEST_CASE("empirical cdf: basics and tie merging") {
  SECTION("single value") {
    const auto e = empirical_cdf({5.0});
    REQUIRE(e.points == std::vector<double>{5.0});
    REQUIRE(e.probs == std::vector<double>{1.0});
  }
  SECTION("four distinct values") {
    const auto e = empirical_cdf({1, 2, 3, 4});
    REQUIRE(e.probs == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  }
  SECTION("ties merge to the last index") {
    const auto e = empirical_cdf({2, 2, 4});
    REQUIRE(e.points == std::vector<double>{2.0, 4.0});
    CHECK(e.probs[0] == Approx(2.0 / 3.0));
    CHECK(e.probs[1] == Approx(1.0));
  }
  SECTION("empty sample") {
    CHECK_THROWS_MATCHES(empirical_cdf({}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::EmptySample; }));
  }
}

TEST_CASE("quantiles: closed-form spot checks") {
  CHECK(quantile(Family::Uniform, std::vector<double>{2.0, 4.0}, 0.5) == Approx(3.0));
  CHECK(quantile(Family::Exponential, std::vector<double>{2.0}, 1.0 - std::exp(-1.0)) ==
        Approx(0.5));
  CHECK(quantile(Family::Normal, std::vector<double>{10.0, 3.0}, 0.5) == Approx(10.0));
  CHECK(quantile(Family::Pareto, std::vector<double>{1.0, 2.0}, 0.5) == Approx(4.0));
  CHECK(quantile(Family::Triangular, std::vector<double>{0.0, 1.0, 2.0}, 0.5) == Approx(1.0));
}

TEST_CASE("cdf and quantile are inverse on every family") {
  const std::vector<std::pair<Family, std::vector<double>>> cases = {
      {Family::Uniform, {1.0, 5.0}},
      {Family::Normal, {10.0, 2.0}},
      {Family::Lognormal, {1.0, 0.4}},
      {Family::Exponential, {0.7}},
      {Family::Gamma, {3.0, 2.0}},
      {Family::Weibull, {1.8, 4.0}},
      {Family::Beta, {2.0, 5.0, 1.0, 3.0}},
      {Family::Pareto, {2.5, 1.5}},
      {Family::Triangular, {0.0, 2.0, 5.0}},
  };
  for (const auto& [family, params] : cases) {
    for (double u : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double x = quantile(family, params, u);
      CHECK(cdf(family, params, x) == Approx(u).margin(1e-9));
    }
    // monotone CDF on an increasing grid
    double prev = -1.0;
    const double lo = quantile(family, params, 0.001);
    const double hi = quantile(family, params, 0.999);
    for (int i = 0; i <= 50; ++i) {
      const double x = lo + (hi - lo) * i / 50.0;
      const double c = cdf(family, params, x);
      CHECK(c >= prev - 1e-12);
      prev = c;
    }
  }
}

TEST_CASE("fit_best: uniform sample is recognized, with minimal MSE") {
  Rng rng(42);
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) values.push_back(rng.uniform01());
  const auto best = fit_best(values);
  CHECK(best.family == Family::Uniform);

  // direct MSE recomputation for every candidate on the same sample
  const auto ecdf = empirical_cdf(values);
  const auto fits = fit_all(values);
  for (const auto& fit : fits) {
    const double recomputed = cdf_mse(ecdf, fit.family, fit.params);
    CHECK(recomputed == Approx(fit.mse).margin(1e-12));
    CHECK(best.mse <= recomputed + 1e-15);
  }
}

TEST_CASE("fit_best: degenerate samples stay empirical") {
  SECTION("constant sample") {
    const auto fit = fit_best(std::vector<double>{7, 7, 7, 7, 7});
    CHECK(fit.family == Family::Empirical);
    CHECK(fit.min == 7.0);
    CHECK(fit.max == 7.0);
  }
  SECTION("short sample") {
    const auto fit = fit_best(std::vector<double>{1.0, 2.0, 9.0});
    CHECK(fit.family == Family::Empirical);
    CHECK(fit.params == std::vector<double>{1.0, 2.0, 9.0});
  }
  SECTION("empty sample") {
    CHECK_THROWS_MATCHES(fit_best(std::vector<double>{}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::EmptySample; }));
  }
}

TEST_CASE("fit results carry the exact sample extremes") {
  // the shape a recipe entry exposes: min 48.846, max 192.232
  std::vector<double> values{48.846, 60.0, 75.5, 110.2, 130.0, 150.75, 192.232};
  const auto fit = fit_best(values);
  CHECK(fit.min == 48.846);
  CHECK(fit.max == 192.232);
  CHECK_FALSE(fit.params.empty());
}

TEST_CASE("sampling: empirical, truncation, and moments") {
  SECTION("empirical over one value") {
    FitResult fit = make_empirical({10.0});
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(sample_from(fit, rng) == 10.0);
  }
  SECTION("gamma draws stay in range with a sane mean") {
    Rng source(42);
    std::vector<double> values;
    for (int i = 0; i < 2000; ++i) {
      values.push_back(quantile(Family::Gamma, std::vector<double>{3.0, 2.0}, source.uniform01()));
    }
    const auto fit = fit_family(values, Family::Gamma).value();
    double mean_src = 0;
    for (double v : values) mean_src += v;
    mean_src /= static_cast<double>(values.size());

    Rng rng(7);
    double mean = 0;
    for (int i = 0; i < 10000; ++i) {
      const double x = sample_from(fit, rng);
      REQUIRE(x >= fit.min);
      REQUIRE(x <= fit.max);
      mean += x;
    }
    mean /= 10000.0;
    CHECK(std::abs(mean - mean_src) / mean_src < 0.15);
  }
  SECTION("deterministic draws for a fixed seed") {
    const auto fit = fit_best(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) CHECK(sample_from(fit, a) == sample_from(fit, b));
  }
}

TEST_CASE("fitting is deterministic") {
  Rng rng(5);
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) {
    values.push_back(quantile(Family::Weibull, std::vector<double>{2.0, 5.0}, rng.uniform01()));
  }
  const auto a = fit_best(values);
  const auto b = fit_best(values);
  CHECK(a.family == b.family);
  CHECK(a.params == b.params);
  CHECK(a.mse == b.mse);
}

TEST_CASE("external distribution names map onto supported families") {
  SECTION("native names pass through") {
    const auto m = map_external_distribution("gamma", std::vector<double>{3.0, 2.0}, 0.5, 20.0);
    CHECK(m.fit.family == Family::Gamma);
    CHECK_FALSE(m.note.has_value());
  }
  SECTION("skewnorm becomes a normal, with a note") {
    const auto m = map_external_distribution(
        "skewnorm", std::vector<double>{11115267.652937062, -2.9628504044929433e-05,
                                        56.03957070238482},
        48.846, 192.232);
    CHECK(m.fit.family == Family::Normal);
    REQUIRE(m.note.has_value());
    CHECK(m.fit.min == 48.846);
    CHECK(m.fit.max == 192.232);
    // truncated draws still land inside [min, max]
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double x = sample_from(m.fit, rng);
      REQUIRE(x >= m.fit.min);
      REQUIRE(x <= m.fit.max);
    }
  }
  SECTION("scipy triang maps exactly") {
    // triang(c, loc, scale): support [loc, loc+scale], mode at loc+c*scale
    const auto m =
        map_external_distribution("triang", std::vector<double>{0.25, 2.0, 8.0}, 2.0, 10.0);
    REQUIRE(m.fit.family == Family::Triangular);
    CHECK(m.fit.params == std::vector<double>{2.0, 4.0, 10.0});
  }
  SECTION("exotic names fall back to uniform over the observed range") {
    const auto m = map_external_distribution("levy", std::vector<double>{1.0, 2.0}, 5.0, 9.0);
    CHECK(m.fit.family == Family::Uniform);
    CHECK(m.fit.params == std::vector<double>{5.0, 9.0});
    REQUIRE(m.note.has_value());
  }
}

TEST_CASE("property: every fitted family keeps draws inside [min, max]") {
  Rng source(2026);
  for (Family family : kParametricFamilies) {
    std::vector<double> params;
    switch (family) {
      case Family::Uniform: params = {2.0, 9.0}; break;
      case Family::Normal: params = {50.0, 4.0}; break;
      case Family::Lognormal: params = {0.0, 1.0}; break;
      case Family::Exponential: params = {0.35}; break;
      case Family::Gamma: params = {2.0, 3.0}; break;
      case Family::Weibull: params = {0.8, 5.0}; break;
      case Family::Beta: params = {2.0, 5.0, 0.0, 1.0}; break;
      case Family::Pareto: params = {2.5, 1.0}; break;
      case Family::Triangular: params = {0.0, 3.0, 10.0}; break;
      case Family::Empirical: continue;
    }
    std::vector<double> values;
    for (int i = 0; i < 300; ++i) values.push_back(quantile(family, params, source.uniform01()));
    const auto fit = fit_best(values);
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
      const double x = sample_from(fit, rng);
      REQUIRE(x >= fit.min);
      REQUIRE(x <= fit.max);
    }
  }
}
