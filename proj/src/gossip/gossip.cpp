#include "gossip/gossip.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

namespace gossip {

const char* perm_name(Perm p) {
  switch (p) {
    case Perm::identity: return "identity";
    case Perm::pseudo_random: return "random";
    case Perm::pipelined: return "pipelined";
  }
  return "?";
}

std::vector<int> build_permutation(int i, int n, Perm kind, uint64_t seed) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n));
  switch (kind) {
    case Perm::identity:
      for (int j = 0; j <= n; ++j)
        if (j != i) out.push_back(j);
      break;
    case Perm::pipelined:  // cyclic left shift: i+1, ..., n, 0, ..., i-1
      for (int k = 1; k <= n; ++k) out.push_back((i + k) % (n + 1));
      break;
    case Perm::pseudo_random: {
      for (int j = 0; j <= n; ++j)
        if (j != i) out.push_back(j);
      std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(i) + 1);
      std::shuffle(out.begin(), out.end(), rng);
      break;
    }
  }
  return out;
}

namespace {

struct Proc {
  std::vector<int> perm;
  int session = 0;
  int pre_left = 0;
  int sent = 0;
  int post_left = 0;
  bool done = false;
};

void arm_session(Proc& p, int i, int n) {
  p.pre_left = i;
  p.sent = 0;
  p.post_left = n - i;
}

// a processor whose receive and send quotas are spent rolls into the next
// session immediately, or retires
void roll(Proc& p, int i, int n, int sessions) {
  while (!p.done && p.pre_left == 0 && p.sent == static_cast<int>(p.perm.size()) &&
         p.post_left == 0) {
    ++p.session;
    if (p.session >= sessions) {
      p.done = true;
      break;
    }
    arm_session(p, i, n);
  }
}

}  // namespace

RunTable simulate_run(int n, Perm kind, int sessions, uint64_t seed) {
  RunTable table;
  table.n = n;
  table.sessions = sessions;
  table.rows.assign(static_cast<size_t>(n) + 1, {});
  table.completions.assign(static_cast<size_t>(sessions) * (n + 1), -1);

  std::vector<Proc> procs(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    procs[i].perm = build_permutation(i, n, kind, seed);
    arm_session(procs[i], i, n);
    roll(procs[i], i, n, sessions);  // n = 0 degenerates to done at once
  }

  long long step = 0;
  for (;;) {
    bool work_left = false;
    for (const Proc& p : procs)
      if (!p.done) work_left = true;
    if (!work_left) break;

    ++step;
    std::vector<Cell> column(static_cast<size_t>(n) + 1);
    std::vector<bool> engaged(static_cast<size_t>(n) + 1, false);
    int pairs = 0;

    // senders matched oldest session first, then ascending id; a straggler
    // finishing its round outranks processors already in the next one
    std::vector<int> senders;
    for (int s = 0; s <= n; ++s) {
      const Proc& ps = procs[s];
      if (!ps.done && ps.pre_left == 0 && ps.sent < static_cast<int>(ps.perm.size()))
        senders.push_back(s);
    }
    std::stable_sort(senders.begin(), senders.end(), [&](int a, int b) {
      return procs[a].session < procs[b].session;
    });

    for (int s : senders) {
      Proc& ps = procs[s];
      if (engaged[s]) continue;
      int target = ps.perm[ps.sent];
      Proc& pt = procs[target];
      bool receiving = !pt.done && !engaged[target] &&
                       (pt.pre_left > 0 || (pt.sent == static_cast<int>(pt.perm.size()) &&
                                            pt.post_left > 0));
      if (!receiving) continue;

      engaged[s] = true;
      engaged[target] = true;
      column[s] = {Cell::Tag::send, target};
      column[target] = {Cell::Tag::recv, s};
      ++pairs;

      ++ps.sent;
      if (ps.sent == static_cast<int>(ps.perm.size()))
        table.completions[static_cast<size_t>(ps.session) * (n + 1) + s] = step;
      if (pt.pre_left > 0) --pt.pre_left;
      else --pt.post_left;
    }

    for (int i = 0; i <= n; ++i) {
      Proc& p = procs[i];
      if (engaged[i]) continue;
      if (p.done) column[i] = {Cell::Tag::idle, -1};
      else if (p.pre_left == 0 && p.sent < static_cast<int>(p.perm.size()))
        column[i] = {Cell::Tag::wait_send, p.perm[p.sent]};
      else
        column[i] = {Cell::Tag::wait_recv, -1};
    }

    if (pairs == 0) {
      table.ok = false;
      table.error = "no progress at step " + std::to_string(step) + " with pending work";
      return table;
    }

    for (int i = 0; i <= n; ++i) {
      table.rows[i].push_back(column[i]);
      roll(procs[i], i, n, sessions);
    }
    table.nu.push_back(2 * pairs);
  }
  return table;
}

RunMetrics metrics(const RunTable& table) {
  RunMetrics m;
  m.lambda = static_cast<long long>(table.nu.size());
  m.used = std::accumulate(table.nu.begin(), table.nu.end(), 0LL);
  m.sigma = m.lambda * (table.n + 1);
  m.mu = m.lambda ? static_cast<double>(m.used) / static_cast<double>(m.lambda) : 0.0;
  m.epsilon = m.sigma ? static_cast<double>(m.used) / static_cast<double>(m.sigma) : 0.0;
  for (int v : table.nu)
    if (v == 4) ++m.u4;
  return m;
}

std::optional<RunMetrics> closed_forms(int n, Perm kind) {
  if (kind == Perm::pseudo_random || n < 1) return std::nullopt;
  RunMetrics m;
  long long N = n;
  long long odd = N % 2;
  if (kind == Perm::identity || n == 1) {
    // a two-processor exchange degenerates both schedules to the same run
    m.lambda = (3 * N * N + 5 * N + 2 * (N / 2)) / 4;
    m.u4 = (N * N - 2 * N + odd) / 4;
    m.used = (N * N - 2 * N + odd) / 2 + 2 * m.lambda;
  } else {
    m.lambda = 3 * N;
    m.used = 2 * N * (N + 1);
  }
  m.sigma = m.lambda * (N + 1);
  m.mu = static_cast<double>(m.used) / static_cast<double>(m.lambda);
  m.epsilon = static_cast<double>(m.used) / static_cast<double>(m.sigma);
  return m;
}

double sustained_rate(const RunTable& table) {
  long long first = -1, last = -1;
  long long count = 0;
  for (long long c : table.completions) {
    if (c < 0) continue;
    ++count;
    if (first < 0 || c < first) first = c;
    if (c > last) last = c;
  }
  if (count < 2 || last == first) return 0.0;
  return static_cast<double>(count - 1) / static_cast<double>(last - first);
}

double sustained_efficiency(const RunTable& table) {
  long long first = -1, last = -1;
  for (long long c : table.completions) {
    if (c < 0) continue;
    if (first < 0 || c < first) first = c;
    if (c > last) last = c;
  }
  if (first < 0 || last == first) return 0.0;
  long long used = 0;
  for (long long t = first; t < last; ++t) used += table.nu[static_cast<size_t>(t)];
  return static_cast<double>(used) /
         (static_cast<double>(last - first) * (table.n + 1));
}

std::string run_table_text(const RunTable& table) {
  std::string out;
  for (int i = 0; i < static_cast<int>(table.rows.size()); ++i) {
    out += "P" + std::to_string(i) + ":";
    for (const Cell& c : table.rows[i]) {
      out += ' ';
      switch (c.tag) {
        case Cell::Tag::send: out += "S" + std::to_string(c.peer); break;
        case Cell::Tag::recv: out += "R" + std::to_string(c.peer); break;
        case Cell::Tag::wait_send: out += "ws"; break;
        case Cell::Tag::wait_recv: out += "wr"; break;
        case Cell::Tag::idle: out += "--"; break;
      }
    }
    out += '\n';
  }
  out += "nu:";
  for (int v : table.nu) out += ' ' + std::to_string(v);
  out += '\n';
  return out;
}

std::string metrics_csv_header() { return "n,kind,lambda,mu,epsilon,u4\n"; }

std::string metrics_csv_row(int n, Perm kind, const RunMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%s,%lld,%.6f,%.6f,%lld\n", n, perm_name(kind), m.lambda,
                m.mu, m.epsilon, m.u4);
  return buf;
}

}  // namespace gossip
