#include "reliab/reliability.h"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

using namespace reliab;

namespace {

Params params(double lambda, double c = 1.0, double t = 0.0, double r = 0.0) {
  Params p;
  p.lambda_fail = lambda;
  p.coverage_c = c;
  p.transient_t = t;
  p.recover_r = r;
  return p;
}

// closed forms written out independently of the library
double ref_tmr(double x) { return 3 * x * x - 2 * x * x * x; }
double ref_spare(double x, double c) {
  return (6 * c - 3 * c * c) * x * x * (1 - x) * (1 - x) + ref_tmr(x);
}
double ref_alpha(double lt, double rt) {
  return 3 * std::exp(-2 * (1 - rt) * lt) - 2 * std::exp(-3 * (1 - rt) * lt);
}

}  // namespace

TEST_CASE("component and voted-triple reliability") {
  Params p = params(1.0);
  double t_half = std::log(2.0);  // R(t) = 0.5
  CHECK(evaluate(Model::simplex, p, t_half) == doctest::Approx(0.5));
  CHECK(evaluate(Model::tmr, p, t_half) == doctest::Approx(0.5));
  CHECK(evaluate(Model::simplex, p, 0.0) == doctest::Approx(1.0));
  CHECK(evaluate(Model::tmr, p, 0.0) == doctest::Approx(1.0));

  // early on the triple beats the single component, late it is worse
  CHECK(evaluate(Model::tmr, p, 0.1) > evaluate(Model::simplex, p, 0.1));
  CHECK(evaluate(Model::tmr, p, 3.0) < evaluate(Model::simplex, p, 3.0));
}

TEST_CASE("transient filtering with zero effect degenerates to plain tmr") {
  Params p = params(0.5, 1.0, 0.0, 0.7);  // transient_t = 0 so RT = 0
  for (double t = 0.0; t <= 10.0; t += 0.25)
    CHECK(evaluate(Model::tmr_alpha, p, t) ==
          doctest::Approx(evaluate(Model::tmr, p, t)).epsilon(1e-12));
}

TEST_CASE("exp-form and r-form of the filtered model agree") {
  double lambda = 0.8, rt = 0.35;
  Params p = params(lambda, 1.0, 0.5, 0.7);  // recover_r*transient_t = 0.35
  for (double t = 0.0; t <= 6.0; t += 0.1) {
    double via_r = tmr_alpha_of(std::exp(-lambda * t), rt);
    CHECK(std::abs(evaluate(Model::tmr_alpha, p, t) - via_r) < 1e-12);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(evaluate(Model::tmr, params(0.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate(Model::tmr, params(-1.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate(Model::tmr_spare, params(1.0, 1.5), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate(Model::tmr, params(1.0), -0.1),
                  std::invalid_argument);
}

TEST_CASE("crosspoint of the voted triple is exactly one half") {
  double r = crosspoint(Cross::tmr_vs_simplex, params(1.0));
  CHECK(r == 0.5);
  CHECK(ref_tmr(r) == doctest::Approx(r));
}

TEST_CASE("crosspoint with one spare at full coverage") {
  Params p = params(1.0, 1.0);
  double r = crosspoint(Cross::tmr_spare_vs_simplex, p);
  CHECK(std::abs(r - 0.2324) < 5e-4);
  CHECK(std::abs(tmr_spare_of(r, 1.0) - r) < 1e-9);

  // partial coverage: crosspoint moves monotonically toward 0.5
  double prev = r;
  for (double c = 0.8; c >= 0.2; c -= 0.2) {
    double rc = crosspoint(Cross::tmr_spare_vs_simplex, params(1.0, c));
    CHECK(std::abs(tmr_spare_of(rc, c) - rc) < 1e-9);
    CHECK(rc > prev);
    CHECK(rc < 0.5);
    prev = rc;
  }
}

TEST_CASE("crosspoint of the filtered model") {
  // The closed form is the component reliability at which the filtered
  // triple itself drops to one half, i.e. the fixed point of tmr(u) = u in
  // the filtered variable u = r^(1-RT). Cross-checked by bisection there.
  Params p = params(1.0, 1.0, 0.5, 0.6);  // RT = 0.3
  double r = crosspoint(Cross::tmr_alpha_vs_simplex, p);
  CHECK(r == doctest::Approx(std::pow(0.5, 1.0 / 0.7)).epsilon(1e-12));
  CHECK(std::abs(r - 0.3715) < 1e-4);

  double lo = 1e-9, hi = 1.0 - 1e-9;
  auto f = [](double x) { return tmr_alpha_of(x, 0.3) - std::pow(x, 0.7); };
  REQUIRE(f(lo) < 0.0);
  REQUIRE(f(hi) > 0.0);
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK(r == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
  CHECK(tmr_alpha_of(r, 0.3) == doctest::Approx(0.5).epsilon(1e-9));

  // no filtering reduces to the plain triple
  CHECK(crosspoint(Cross::tmr_alpha_vs_simplex, params(1.0)) == 0.5);

  // perfect filtering never crosses
  CHECK_THROWS_AS(
      crosspoint(Cross::tmr_alpha_vs_simplex, params(1.0, 1.0, 1.0, 1.0)),
      std::invalid_argument);
}

TEST_CASE("crosspoint report") {
  std::string rep = crosspoint_report(params(1.0, 1.0, 0.5, 0.6));
  CHECK(rep.find("tmr vs simplex") != std::string::npos);
  CHECK(rep.find("0.500000000") != std::string::npos);
  CHECK(rep.find("tmr_spare vs simplex") != std::string::npos);
  CHECK(rep.find("tmr_alpha vs simplex") != std::string::npos);
  CHECK(crosspoint_report(params(1.0, 1.0, 1.0, 1.0))
            .find("undefined") != std::string::npos);
}

TEST_CASE("spare arrangement dominates the plain triple everywhere") {
  for (int ci = 1; ci <= 100; ++ci) {
    double c = ci / 100.0;
    for (int ti = 0; ti < 100; ++ti) {
      double t = 5.0 * ti / 99.0;
      double x = std::exp(-t);
      CHECK(tmr_spare_of(x, c) >= ref_tmr(x));
    }
  }
}

TEST_CASE("transient filtering never hurts") {
  for (double rt = 0.1; rt < 1.0; rt += 0.1)
    for (int ti = 0; ti < 60; ++ti) {
      double lt = 8.0 * ti / 59.0;
      CHECK(ref_alpha(lt, rt) >= ref_alpha(lt, 0.0) - 1e-15);
    }
}

TEST_CASE("chain solver initial condition and conservation") {
  auto m = spare_chain(0.01, 0.4);
  auto grid = linspace(0.0, 500.0, 101);
  auto sol = markov_solve(m.chain, grid);
  REQUIRE(sol.t.size() == grid.size());

  CHECK(sol.at("310", 0) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& s : m.chain.states)
    if (s != "310") CHECK(std::abs(sol.at(s, 0)) < 1e-12);

  for (size_t k = 0; k < grid.size(); ++k) {
    double total = 0.0;
    for (const auto& s : m.chain.states) total += sol.at(s, k);
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("spare chain reproduces the closed form") {
  double lambda = 0.01;
  for (double c : {1.0, 0.7, 0.3}) {
    auto m = spare_chain(lambda, c);
    auto grid = linspace(0.0, 5.0 / lambda, 101);
    auto sol = markov_solve(m.chain, grid);
    for (size_t k = 0; k < grid.size(); ++k) {
      double x = std::exp(-lambda * grid[k]);
      CHECK(std::abs(sol.sum_at(m.useful, k) - ref_spare(x, c)) < 1e-6);
    }
  }
}

TEST_CASE("spare chain per-state probabilities") {
  // each useful state has a known solution; checking them pins the
  // individual transition rates, not just their sum
  double lambda = 0.02, c = 0.6;
  auto m = spare_chain(lambda, c);
  auto grid = linspace(0.0, 4.0 / lambda, 41);
  auto sol = markov_solve(m.chain, grid);
  for (size_t k = 0; k < grid.size(); ++k) {
    double x = std::exp(-lambda * grid[k]);
    double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    double hump = x4 - 2 * x3 + x2;
    CHECK(std::abs(sol.at("310", k) - x4) < 1e-7);
    CHECK(std::abs(sol.at("300", k) - 4 * c * (x3 - x4)) < 1e-7);
    CHECK(std::abs(sol.at("200", k) - 6 * c * hump) < 1e-7);
    CHECK(std::abs(sol.at("211", k) - 3 * (1 - c) * (x3 - x4)) < 1e-7);
    CHECK(std::abs(sol.at("301", k) - (1 - c) * (x3 - x4)) < 1e-7);
    CHECK(std::abs(sol.at("201", k) - 6 * c * (1 - c) * hump) < 1e-7);
    CHECK(std::abs(sol.at("202", k) - 3 * (1 - c) * (1 - c) * hump) < 1e-7);
  }
}

TEST_CASE("filtered chain reproduces the closed form") {
  double lambda = 0.05, rec = 0.6, tra = 0.5;
  auto m = alpha_chain(lambda, rec, tra);
  auto grid = linspace(0.0, 5.0 / lambda, 101);
  auto sol = markov_solve(m.chain, grid);
  for (size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(sol.sum_at(m.useful, k) -
                   ref_alpha(lambda * grid[k], rec * tra)) < 1e-6);
    double total = sol.sum_at(m.useful, k) + sol.at("failed", k);
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("chain validation") {
  MarkovChain bad;
  bad.states = {"a", "b"};
  bad.initial = "a";
  bad.rates = {{-1.0, 0.5}, {0.0, 0.0}};  // row does not sum to zero
  CHECK_THROWS_AS(markov_solve(bad, {0.0, 1.0}), std::invalid_argument);

  bad.rates = {{1.0, -1.0}, {0.0, 0.0}};  // negative off-diagonal
  CHECK_THROWS_AS(markov_solve(bad, {0.0, 1.0}), std::invalid_argument);

  bad.rates = {{-1.0, 1.0}, {0.0, 0.0}};
  bad.initial = "c";  // unknown initial state
  CHECK_THROWS_AS(markov_solve(bad, {0.0, 1.0}), std::invalid_argument);

  bad.initial = "a";
  CHECK_THROWS_AS(markov_solve(bad, {1.0, 0.5}),  // grid not sorted
                  std::invalid_argument);
  CHECK_NOTHROW(markov_solve(bad, {0.0, 1.0}));
}

TEST_CASE("curves and csv export") {
  auto grid = linspace(0.0, 2.0, 5);
  REQUIRE(grid.size() == 5);
  CHECK(grid[0] == 0.0);
  CHECK(grid[4] == doctest::Approx(2.0));

  auto c = model_curve(Model::simplex, params(1.0), grid);
  REQUIRE(c.value.size() == 5);
  for (size_t i = 1; i < c.value.size(); ++i)
    CHECK(c.value[i] < c.value[i - 1]);

  std::string csv = curve_csv(c);
  CHECK(csv.substr(0, 8) == "t,value\n");
  CHECK(csv.find("0,1\n") != std::string::npos);

  auto m = alpha_chain(1.0, 0.5, 0.5);
  auto sol = markov_solve(m.chain, grid);
  auto useful = state_sum_curve(sol, m.useful);
  CHECK(useful.value[0] == doctest::Approx(1.0));
  for (size_t i = 1; i < useful.value.size(); ++i)
    CHECK(useful.value[i] < useful.value[i - 1]);
}
