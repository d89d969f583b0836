#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tom {

using Ticks = long long;  // one tick = one microsecond

// Entries hold relative running fields: the head's is measured from
// starting_time, every later one from its predecessor's expiry. Keeping only
// deltas makes the periodic scan O(1) in the common no-expiry case.
struct TimeoutEntry {
  int id = 0;
  Ticks deadline = 0;  // full period, kept for renewal
  Ticks running = 0;
  bool cyclic = false;
  bool enabled = true;
  int alarm = -1;  // opaque action reference handed back on expiry
};

struct TimeoutList {
  Ticks starting_time = 0;
  std::vector<TimeoutEntry> entries;
};

struct FiredAlarm {
  int id = 0;
  Ticks expected = 0;  // scheduled expiry, absolute
  int alarm = -1;
  bool dispatched = true;  // false: entry was disabled, fired silently
};

// residual of entry n relative to now; r_1 may be negative between an expiry
// and the scan that collects it
std::vector<Ticks> residuals(const TimeoutList& list, Ticks now);

const TimeoutEntry* find(const TimeoutList& list, int id);

// duplicate ids and non-positive deadlines are rejected
bool insert(TimeoutList& list, TimeoutEntry entry, Ticks now);
bool erase(TimeoutList& list, int id);

// collects every entry with residual strictly below zero, in expiry order.
// Cyclic entries re-enter anchored at their scheduled expiry, so a late scan
// does not slip the long-run period.
std::vector<FiredAlarm> scan(TimeoutList& list, Ticks now);

bool enable(TimeoutList& list, int id);
bool disable(TimeoutList& list, int id);  // list rules intact, alarm suppressed
bool renew(TimeoutList& list, int id, Ticks now);
bool set_deadline(TimeoutList& list, int id, Ticks deadline, Ticks now);
bool set_action(TimeoutList& list, int id, int alarm);

// alarm execution model: tau simulated workers, or the scanner itself when
// tau is zero. Wait-bound alarms overlap across workers; cpu-bound ones
// serialize on the single simulated processor no matter how many workers.
enum class AlarmKind { wait_bound, cpu_bound };

struct AlarmJob {
  Ticks duration = 0;
  AlarmKind kind = AlarmKind::wait_bound;
};

struct AlarmStat {
  int alarm_id = 0;
  Ticks expected = 0;
  Ticks actual = 0;  // start of execution
  Ticks delta = 0;
  bool violated = false;
};

struct AlarmScheduler {
  int workers = 0;
  Ticks cycle = 50000;  // violation threshold: delta beyond one scan period
  Ticks scanner_free = 0;
  Ticks cpu_free = 0;
  std::vector<Ticks> worker_free;
  std::vector<AlarmStat> stats;
};

// returns when the scanner may run again (later than now only for tau = 0)
Ticks dispatch(AlarmScheduler& sched, const std::vector<FiredAlarm>& fired, AlarmJob job,
               Ticks now);

std::string stats_csv(const AlarmScheduler& sched);

}  // namespace tom
