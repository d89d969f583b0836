#pragma once

#include <cstdint>

#include "tom/tom.h"

namespace tom {

// synthetic alarm load: n one-shot timeouts drawn uniformly over ]0, horizon],
// scanned every cycle ticks, each alarm simulating a fixed service demand
struct BenchConfig {
  int timeouts = 1000;
  Ticks horizon = 100000000;
  Ticks alarm_duration = 20000;
  int workers = 0;
  AlarmKind kind = AlarmKind::wait_bound;
  Ticks cycle = 50000;
  uint64_t seed = 1;
};

struct BenchResult {
  int fired = 0;
  int violations = 0;
  Ticks max_delta = 0;
  double mean_delta = 0.0;
  AlarmScheduler sched;  // full stats, for the CSV export
};

BenchResult run_bench(const BenchConfig& cfg);

}  // namespace tom
