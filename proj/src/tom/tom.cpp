#include "tom/tom.h"

#include <algorithm>

namespace tom {

std::vector<Ticks> residuals(const TimeoutList& list, Ticks now) {
  std::vector<Ticks> out;
  out.reserve(list.entries.size());
  Ticks r = 0;
  for (size_t i = 0; i < list.entries.size(); ++i) {
    r += list.entries[i].running;
    if (i == 0) r -= now - list.starting_time;
    out.push_back(r);
  }
  return out;
}

const TimeoutEntry* find(const TimeoutList& list, int id) {
  for (const TimeoutEntry& e : list.entries)
    if (e.id == id) return &e;
  return nullptr;
}

namespace {

// residual may be negative (cyclic renewal after a very late scan); the entry
// then heads the list and fires on the next pass
void insert_at_residual(TimeoutList& list, TimeoutEntry entry, Ticks residual, Ticks now) {
  if (list.entries.empty()) {
    list.starting_time = now;
    entry.running = residual;
    list.entries.push_back(entry);
    return;
  }
  std::vector<Ticks> rs = residuals(list, now);
  size_t m = rs.size();
  if (residual < rs[0]) {
    entry.running = residual + (now - list.starting_time);
    list.entries[0].running = rs[0] - residual;
    list.entries.insert(list.entries.begin(), entry);
    return;
  }
  if (residual >= rs[m - 1]) {
    entry.running = residual - rs[m - 1];
    list.entries.push_back(entry);
    return;
  }
  size_t j = 0;
  while (j + 1 < m && rs[j + 1] <= residual) ++j;  // equal residuals keep arrival order
  entry.running = residual - rs[j];
  list.entries[j + 1].running -= entry.running;
  list.entries.insert(list.entries.begin() + static_cast<long>(j) + 1, entry);
}

}  // namespace

bool insert(TimeoutList& list, TimeoutEntry entry, Ticks now) {
  if (entry.deadline <= 0) return false;
  if (find(list, entry.id)) return false;
  insert_at_residual(list, entry, entry.deadline, now);
  return true;
}

bool erase(TimeoutList& list, int id) {
  auto& es = list.entries;
  for (size_t i = 0; i < es.size(); ++i) {
    if (es[i].id != id) continue;
    if (i + 1 < es.size()) es[i + 1].running += es[i].running;
    es.erase(es.begin() + static_cast<long>(i));
    return true;
  }
  return false;
}

std::vector<FiredAlarm> scan(TimeoutList& list, Ticks now) {
  std::vector<FiredAlarm> fired;
  if (list.entries.empty()) return fired;
  std::vector<Ticks> rs = residuals(list, now);
  if (rs[0] >= 0) return fired;

  size_t j = 0;
  while (j + 1 < rs.size() && rs[j + 1] < 0) ++j;

  std::vector<TimeoutEntry> expired(list.entries.begin(),
                                    list.entries.begin() + static_cast<long>(j) + 1);
  list.entries.erase(list.entries.begin(), list.entries.begin() + static_cast<long>(j) + 1);
  if (!list.entries.empty()) {
    list.entries[0].running = rs[j + 1];
    list.starting_time = now;
  }

  for (size_t i = 0; i <= j; ++i) {
    const TimeoutEntry& e = expired[i];
    FiredAlarm f;
    f.id = e.id;
    f.expected = now + rs[i];
    f.alarm = e.alarm;
    f.dispatched = e.enabled;
    fired.push_back(f);
    if (e.cyclic) insert_at_residual(list, e, rs[i] + e.deadline, now);
  }
  return fired;
}

namespace {

TimeoutEntry* find_mut(TimeoutList& list, int id) {
  for (TimeoutEntry& e : list.entries)
    if (e.id == id) return &e;
  return nullptr;
}

}  // namespace

bool enable(TimeoutList& list, int id) {
  TimeoutEntry* e = find_mut(list, id);
  if (!e) return false;
  e->enabled = true;
  return true;
}

bool disable(TimeoutList& list, int id) {
  TimeoutEntry* e = find_mut(list, id);
  if (!e) return false;
  e->enabled = false;
  return true;
}

bool renew(TimeoutList& list, int id, Ticks now) {
  const TimeoutEntry* e = find(list, id);
  if (!e) return false;
  TimeoutEntry fresh = *e;
  erase(list, id);
  insert_at_residual(list, fresh, fresh.deadline, now);
  return true;
}

bool set_deadline(TimeoutList& list, int id, Ticks deadline, Ticks now) {
  if (deadline <= 0) return false;
  const TimeoutEntry* e = find(list, id);
  if (!e) return false;
  TimeoutEntry fresh = *e;
  fresh.deadline = deadline;
  erase(list, id);
  insert_at_residual(list, fresh, deadline, now);
  return true;
}

bool set_action(TimeoutList& list, int id, int alarm) {
  TimeoutEntry* e = find_mut(list, id);
  if (!e) return false;
  e->alarm = alarm;
  return true;
}

Ticks dispatch(AlarmScheduler& sched, const std::vector<FiredAlarm>& fired, AlarmJob job,
               Ticks now) {
  if (sched.workers > 0 &&
      sched.worker_free.size() != static_cast<size_t>(sched.workers))
    sched.worker_free.assign(static_cast<size_t>(sched.workers), 0);
  if (sched.scanner_free < now) sched.scanner_free = now;

  for (const FiredAlarm& f : fired) {
    if (!f.dispatched) continue;
    Ticks start;
    if (sched.workers == 0) {
      start = sched.scanner_free;
      if (job.kind == AlarmKind::cpu_bound) start = std::max(start, sched.cpu_free);
      sched.scanner_free = start + job.duration;
    } else {
      size_t w = 0;
      for (size_t i = 1; i < sched.worker_free.size(); ++i)
        if (sched.worker_free[i] < sched.worker_free[w]) w = i;
      start = std::max(now, sched.worker_free[w]);
      if (job.kind == AlarmKind::cpu_bound) start = std::max(start, sched.cpu_free);
      sched.worker_free[w] = start + job.duration;
    }
    if (job.kind == AlarmKind::cpu_bound) sched.cpu_free = start + job.duration;
    AlarmStat s;
    s.alarm_id = f.id;
    s.expected = f.expected;
    s.actual = start;
    s.delta = start - f.expected;
    s.violated = s.delta > sched.cycle;
    sched.stats.push_back(s);
  }
  if (sched.workers == 0) return sched.scanner_free;
  // cpu-bound alarms starve the scanner too: one processor runs everything
  if (job.kind == AlarmKind::cpu_bound) return std::max(now, sched.cpu_free);
  return now;
}

std::string stats_csv(const AlarmScheduler& sched) {
  std::string out = "alarm_id,expected,actual,delta,violated\n";
  for (const AlarmStat& s : sched.stats) {
    out += std::to_string(s.alarm_id) + "," + std::to_string(s.expected) + "," +
           std::to_string(s.actual) + "," + std::to_string(s.delta) + "," +
           (s.violated ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace tom
