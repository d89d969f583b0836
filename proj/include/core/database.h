#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/alpha.h"
#include "core/types.h"

namespace core {

struct EntityState {
  std::vector<Notification> error_list;  // unremoved error notifications
  int phase = 0;
  bool started = false;
  int restart_count = 0;
  bool isolated = false;
  int reboot_count = 0;  // nodes only
  bool running = false;
  bool reintegrated = false;
  std::optional<AlphaCounter> alpha;
  std::optional<int> deadlock_partner;
};

enum class Status {
  faulty,
  running,
  rebooted,
  started,
  isolated,
  restarted,
  transient,
  reintegrated,
  deadlocked,
};

const char* status_name(Status s);

enum class ValueAtom { errn, errt, phase };

struct AtomResult {
  bool truth = false;            // status atoms
  long long value = 0;           // value atoms, before the VM compares
  std::vector<EntityRef> match;  // entities satisfying the atom
  std::vector<EntityRef> complement;
};

struct RaiseOutcome {
  bool ok = false;
  bool recovery_needed = false;
  std::string error;
};

struct Database {
  int nprocs = 0;
  std::vector<TaskDescriptor> tasks;
  std::vector<GroupDescriptor> groups;
  std::map<int, EntityState> task_states;  // by unique-id
  std::map<int, EntityState> node_states;  // by node id
  std::vector<Notification> log;           // append-only

  const TaskDescriptor* find_task(int unique_id) const;
  const GroupDescriptor* find_group(int unique_id) const;
  bool exists(EntityRef e) const;

  EntityState& state(EntityRef e);
  const EntityState* state_if(EntityRef e) const;

  // member expansion: task -> itself, group -> member tasks, node -> itself
  std::vector<EntityRef> expand(EntityRef e) const;
};

RaiseOutcome raise_event(Database& db, const Notification& n);

AtomResult query_status(const Database& db, Status s, EntityRef e);
AtomResult query_value(const Database& db, ValueAtom v, EntityRef e);
bool query_deadlocked(const Database& db, EntityRef a, EntityRef b);

enum class RemoveSel { phase, any };
void db_remove(Database& db, RemoveSel sel, EntityRef e);

}  // namespace core
