#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gossip {

// N+1 processors gossip over a full crossbar; each one follows the same
// automaton: receive i values, send its own per a fixed permutation, then
// collect the remaining N-i.
enum class Perm { identity, pseudo_random, pipelined };

const char* perm_name(Perm p);

// processor i's send order over [0,N] minus i
std::vector<int> build_permutation(int i, int n, Perm kind, uint64_t seed = 0);

struct Cell {
  enum class Tag { send, recv, wait_send, wait_recv, idle };
  Tag tag = Tag::idle;
  int peer = -1;  // counterpart processor for send/recv
};

struct RunTable {
  int n = 0;
  int sessions = 1;
  std::vector<std::vector<Cell>> rows;  // (n+1) x lambda
  std::vector<int> nu;                  // used slots per step, always even
  // step at which broadcast s*(n+1)+i (processor i's session-s value) reached
  // its last receiver
  std::vector<long long> completions;
  bool ok = true;
  std::string error;
};

struct RunMetrics {
  long long lambda = 0;
  long long used = 0;   // U(N)
  long long sigma = 0;  // (n+1) * lambda
  double mu = 0.0;
  double epsilon = 0.0;
  long long u4 = 0;  // steps with four used slots
};

RunTable simulate_run(int n, Perm kind, int sessions = 1, uint64_t seed = 0);

RunMetrics metrics(const RunTable& table);

// predicted metrics; pseudo-random schedules have none
std::optional<RunMetrics> closed_forms(int n, Perm kind);

// sustained multi-session throughput: broadcast completions per step between
// the first and last completion
double sustained_rate(const RunTable& table);
// slot efficiency measured over the same window
double sustained_efficiency(const RunTable& table);

std::string run_table_text(const RunTable& table);
std::string metrics_csv_header();
std::string metrics_csv_row(int n, Perm kind, const RunMetrics& m);

}  // namespace gossip
