#include "reliab/reliability.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace reliab {

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

void check_params(const Params& p) {
  if (!(p.lambda_fail > 0.0))
    throw std::invalid_argument("lambda_fail must be positive");
  check_unit(p.coverage_c, "coverage_c");
  check_unit(p.transient_t, "transient_t");
  check_unit(p.recover_r, "recover_r");
}

}  // namespace

const char* model_name(Model m) {
  switch (m) {
    case Model::simplex: return "simplex";
    case Model::tmr: return "tmr";
    case Model::tmr_spare: return "tmr_spare";
    case Model::tmr_alpha: return "tmr_alpha";
  }
  return "?";
}

double tmr_of(double r) { return 3.0 * r * r - 2.0 * r * r * r; }

double tmr_spare_of(double r, double coverage_c) {
  double q = r * (1.0 - r);
  return (-3.0 * coverage_c * coverage_c + 6.0 * coverage_c) * q * q +
         tmr_of(r);
}

double tmr_alpha_of(double r, double rt) {
  double e = 1.0 - rt;
  return 3.0 * std::pow(r, 2.0 * e) - 2.0 * std::pow(r, 3.0 * e);
}

double evaluate(Model m, const Params& p, double t) {
  check_params(p);
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  double r = std::exp(-p.lambda_fail * t);
  switch (m) {
    case Model::simplex:
      return r;
    case Model::tmr:
      return tmr_of(r);
    case Model::tmr_spare:
      return tmr_spare_of(r, p.coverage_c);
    case Model::tmr_alpha: {
      double e = 1.0 - p.recover_r * p.transient_t;
      double lt = p.lambda_fail * t;
      return 3.0 * std::exp(-2.0 * e * lt) - 2.0 * std::exp(-3.0 * e * lt);
    }
  }
  throw std::invalid_argument("unknown model");
}

double crosspoint(Cross which, const Params& p) {
  check_params(p);
  switch (which) {
    case Cross::tmr_vs_simplex:
      return 0.5;
    case Cross::tmr_alpha_vs_simplex: {
      double rt = p.recover_r * p.transient_t;
      if (rt >= 1.0)
        throw std::invalid_argument(
            "tmr_alpha crosspoint undefined when recover_r * transient_t = 1");
      return std::pow(0.5, 1.0 / (1.0 - rt));
    }
    case Cross::tmr_spare_vs_simplex: {
      // f(r) = tmr_spare(r) - r is negative near 0 and >= 0 at 0.5 for any
      // coverage, so bisection over (0, 0.5] always converges
      double c = p.coverage_c;
      auto f = [c](double r) { return tmr_spare_of(r, c) - r; };
      double lo = 1e-12, hi = 0.5;
      if (f(lo) >= 0.0 || f(hi) < 0.0)
        throw std::invalid_argument("tmr_spare crosspoint bracket failed");
      for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw std::invalid_argument("unknown crosspoint");
}

std::string crosspoint_report(const Params& p) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "tmr vs simplex:       R = %.9f\n",
                crosspoint(Cross::tmr_vs_simplex, p));
  out += buf;
  std::snprintf(buf, sizeof buf,
                "tmr_spare vs simplex: R = %.9f  (coverage %.4f)\n",
                crosspoint(Cross::tmr_spare_vs_simplex, p), p.coverage_c);
  out += buf;
  double rt = p.recover_r * p.transient_t;
  if (rt >= 1.0) {
    out += "tmr_alpha vs simplex: undefined (recover_r * transient_t = 1)\n";
  } else {
    std::snprintf(buf, sizeof buf,
                  "tmr_alpha vs simplex: R = %.9f  (R*T %.4f)\n",
                  crosspoint(Cross::tmr_alpha_vs_simplex, p), rt);
    out += buf;
  }
  return out;
}

double MarkovSolution::at(const std::string& state, size_t k) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i] == state) return prob[i][k];
  throw std::invalid_argument("no such state: " + state);
}

double MarkovSolution::sum_at(const std::vector<std::string>& names,
                              size_t k) const {
  double s = 0.0;
  for (const auto& n : names) s += at(n, k);
  return s;
}

namespace {

size_t state_index(const MarkovChain& c, const std::string& name) {
  for (size_t i = 0; i < c.states.size(); ++i)
    if (c.states[i] == name) return i;
  throw std::invalid_argument("no such state: " + name);
}

void check_chain(const MarkovChain& c) {
  size_t n = c.states.size();
  if (n == 0) throw std::invalid_argument("empty chain");
  if (c.rates.size() != n)
    throw std::invalid_argument("rates matrix is not square");
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (c.rates[i].size() != n)
      throw std::invalid_argument("rates matrix is not square");
    for (size_t j = 0; j < n; ++j) {
      if (i != j && c.rates[i][j] < 0.0)
        throw std::invalid_argument("negative transition rate");
      scale = std::max(scale, std::abs(c.rates[i][j]));
    }
  }
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += c.rates[i][j];
    if (std::abs(sum) > 1e-9 * std::max(1.0, scale))
      throw std::invalid_argument("non-conservative generator row " +
                                  c.states[i]);
  }
  state_index(c, c.initial);
}

// one pass over the grid with steps no longer than dt
std::vector<std::vector<double>> integrate_grid(
    const MarkovChain& c, const std::vector<double>& grid, double dt) {
  size_t ns = c.states.size();
  std::vector<double> p(ns, 0.0);
  p[state_index(c, c.initial)] = 1.0;

  auto deriv = [&](const std::vector<double>& q, std::vector<double>& dq) {
    for (size_t j = 0; j < ns; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < ns; ++i) s += q[i] * c.rates[i][j];
      dq[j] = s;
    }
  };

  std::vector<double> k1(ns), k2(ns), k3(ns), k4(ns), tmp(ns);
  std::vector<std::vector<double>> out(ns, std::vector<double>(grid.size()));
  double tcur = 0.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    double span = grid[g] - tcur;
    long long steps = span > 0.0 ? (long long)std::ceil(span / dt) : 0;
    double h = steps > 0 ? span / (double)steps : 0.0;
    for (long long s = 0; s < steps; ++s) {
      deriv(p, k1);
      for (size_t j = 0; j < ns; ++j) tmp[j] = p[j] + 0.5 * h * k1[j];
      deriv(tmp, k2);
      for (size_t j = 0; j < ns; ++j) tmp[j] = p[j] + 0.5 * h * k2[j];
      deriv(tmp, k3);
      for (size_t j = 0; j < ns; ++j) tmp[j] = p[j] + h * k3[j];
      deriv(tmp, k4);
      for (size_t j = 0; j < ns; ++j)
        p[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    tcur = grid[g];
    for (size_t j = 0; j < ns; ++j) out[j][g] = p[j];
  }
  return out;
}

}  // namespace

MarkovSolution markov_solve(const MarkovChain& chain,
                            const std::vector<double>& t_grid) {
  check_chain(chain);
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t >= prev))
      throw std::invalid_argument("time grid must be nondecreasing from 0");
    prev = t;
  }

  MarkovSolution sol;
  sol.states = chain.states;
  sol.t = t_grid;

  double span = t_grid.back();
  if (span <= 0.0) {
    sol.prob = integrate_grid(chain, t_grid, 1.0);
    return sol;
  }

  double dt = span / 64.0;
  auto cur = integrate_grid(chain, t_grid, dt);
  for (int round = 0; round < 24; ++round) {
    auto fine = integrate_grid(chain, t_grid, dt * 0.5);
    double diff = 0.0;
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t k = 0; k < cur[i].size(); ++k)
        diff = std::max(diff, std::abs(fine[i][k] - cur[i][k]));
    cur = std::move(fine);
    dt *= 0.5;
    if (diff < 1e-8) break;
  }
  sol.prob = std::move(cur);
  return sol;
}

namespace {

struct Edge {
  int from;
  int to;
  double rate;
};

MarkovChain make_chain(std::vector<std::string> states, std::string initial,
                       const std::vector<Edge>& edges) {
  MarkovChain c;
  c.states = std::move(states);
  c.initial = std::move(initial);
  size_t n = c.states.size();
  c.rates.assign(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    c.rates[e.from][e.to] += e.rate;
    c.rates[e.from][e.from] -= e.rate;
  }
  return c;
}

}  // namespace

ChainModel spare_chain(double lambda_fail, double coverage_c) {
  Params p;
  p.lambda_fail = lambda_fail;
  p.coverage_c = coverage_c;
  check_params(p);
  double l = lambda_fail, c = coverage_c;
  ChainModel m;
  // digits: good modules, good spares, undetected faulty modules. Four
  // powered units fail at 4l from the full state; a detected module failure
  // brings the spare in with probability c, otherwise the bad module keeps
  // voting undetected. Spare failures (rate l) are silent.
  m.chain = make_chain(
      {"310", "300", "200", "fail_safe", "211", "301", "201", "202",
       "fail_unsafe"},
      "310",
      {
          {0, 1, 4.0 * l * c},          // failure caught, spare switched in
          {0, 4, 3.0 * l * (1.0 - c)},  // module failure missed
          {0, 5, l * (1.0 - c)},        // spare failure missed
          {1, 2, 3.0 * l},
          {2, 3, 2.0 * l},              // exhausted but still agreeing
          {4, 6, 3.0 * l * c},
          {4, 7, l * (1.0 - c)},
          {4, 8, 2.0 * l * (1.0 - c)},
          {5, 6, 3.0 * l * c},
          {5, 7, 3.0 * l * (1.0 - c)},
          {6, 8, 2.0 * l},
          {7, 8, 2.0 * l},
      });
  m.useful = {"310", "300", "200", "211", "301", "201", "202"};
  return m;
}

ChainModel alpha_chain(double lambda_fail, double recover_r,
                       double transient_t) {
  Params p;
  p.lambda_fail = lambda_fail;
  p.recover_r = recover_r;
  p.transient_t = transient_t;
  check_params(p);
  double eff = lambda_fail * (1.0 - recover_r * transient_t);
  ChainModel m;
  // states count agreeing modules; forgiven transients never leave state 3
  m.chain = make_chain({"3_good", "2_good", "failed"}, "3_good",
                       {
                           {0, 1, 3.0 * eff},
                           {1, 2, 2.0 * eff},
                       });
  m.useful = {"3_good", "2_good"};
  return m;
}

std::vector<double> linspace(double a, double b, int npoints) {
  std::vector<double> out;
  if (npoints <= 0) return out;
  if (npoints == 1) {
    out.push_back(a);
    return out;
  }
  out.reserve((size_t)npoints);
  for (int i = 0; i < npoints; ++i)
    out.push_back(a + (b - a) * (double)i / (double)(npoints - 1));
  return out;
}

Curve model_curve(Model m, const Params& p, const std::vector<double>& grid) {
  Curve c;
  c.t = grid;
  c.value.reserve(grid.size());
  for (double t : grid) c.value.push_back(evaluate(m, p, t));
  return c;
}

Curve state_sum_curve(const MarkovSolution& sol,
                      const std::vector<std::string>& names) {
  Curve c;
  c.t = sol.t;
  c.value.reserve(sol.t.size());
  for (size_t k = 0; k < sol.t.size(); ++k)
    c.value.push_back(sol.sum_at(names, k));
  return c;
}

std::string curve_csv(const Curve& c) {
  std::string out = "t,value\n";
  char buf[80];
  for (size_t i = 0; i < c.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", c.t[i], c.value[i]);
    out += buf;
  }
  return out;
}

}  // namespace reliab
