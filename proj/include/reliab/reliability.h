#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace reliab {

// Knobs of the redundancy models. recover_r is the probability that error
// recovery succeeds, a design figure of the recovery layer; it is not the
// reliability function R(t) = exp(-lambda t), which is always derived from
// lambda_fail.
struct Params {
  double lambda_fail = 0.0;   // failure rate, 1/tick
  double coverage_c = 1.0;    // spare switch-in coverage
  double transient_t = 0.0;   // probability a fault is transient
  double recover_r = 0.0;     // probability recovery from a transient works
};

enum class Model { simplex, tmr, tmr_spare, tmr_alpha };

const char* model_name(Model m);

// reliability at time t >= 0; throws std::invalid_argument on bad params
double evaluate(Model m, const Params& p, double t);

// the same models written in the component reliability r = exp(-lambda t);
// time drops out, which is the form crosspoint work needs
double tmr_of(double r);
double tmr_spare_of(double r, double coverage_c);
double tmr_alpha_of(double r, double rt);

enum class Cross { tmr_vs_simplex, tmr_spare_vs_simplex, tmr_alpha_vs_simplex };

// Component reliability at which the redundant arrangement stops paying
// off. tmr crosses the simplex at exactly 0.5, tmr_spare is found by
// bisection to 1e-9. For tmr_alpha the break-even lives in the filtered
// variable u = r^(1-RT): the closed form 0.5^(1/(1-RT)) is the r at which
// the filtered triple itself drops to one half.
double crosspoint(Cross which, const Params& p);

std::string crosspoint_report(const Params& p);

// Continuous-time chain. rates[i][j] holds the i -> j transition rate for
// i != j; the diagonal carries minus the row sum, so every row of the
// generator sums to zero.
struct MarkovChain {
  std::vector<std::string> states;
  std::vector<std::vector<double>> rates;
  std::string initial;
};

struct Curve {
  std::vector<double> t;
  std::vector<double> value;
};

struct MarkovSolution {
  std::vector<std::string> states;
  std::vector<double> t;
  std::vector<std::vector<double>> prob;  // prob[state][grid point]

  double at(const std::string& state, size_t k) const;
  double sum_at(const std::vector<std::string>& names, size_t k) const;
};

// Fixed-step fourth-order integration of dp/dt = pQ starting from the
// initial state at t = 0. The step is halved until one more halving moves
// no grid value by 1e-8 or more. Rejects non-conservative generators.
MarkovSolution markov_solve(const MarkovChain& chain,
                            const std::vector<double>& t_grid);

// a chain together with the states in which service is still delivered
struct ChainModel {
  MarkovChain chain;
  std::vector<std::string> useful;
};

// TMR plus one cold spare. States are labeled with three digits: good
// modules, good spares, undetected faulty modules. Switch-in succeeds with
// probability coverage_c; a botched switch-in leaves a faulty module in
// place undetected.
ChainModel spare_chain(double lambda_fail, double coverage_c);

// TMR where a fault is forgiven when it is transient and recovery catches
// it, which happens with probability recover_r * transient_t; only the
// remaining fraction of faults consumes redundancy.
ChainModel alpha_chain(double lambda_fail, double recover_r,
                       double transient_t);

std::vector<double> linspace(double a, double b, int npoints);

Curve model_curve(Model m, const Params& p, const std::vector<double>& grid);

// probability mass over a set of states as a function of time
Curve state_sum_curve(const MarkovSolution& sol,
                      const std::vector<std::string>& names);

std::string curve_csv(const Curve& c);

}  // namespace reliab
