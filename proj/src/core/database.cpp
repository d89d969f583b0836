#include "core/database.h"

#include <algorithm>

namespace core {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::node: return "node";
    case Kind::task: return "task";
    case Kind::group: return "group";
  }
  return "?";
}

const char* status_name(Status s) {
  switch (s) {
    case Status::faulty: return "FAULTY";
    case Status::running: return "RUNNING";
    case Status::rebooted: return "REBOOTED";
    case Status::started: return "STARTED";
    case Status::isolated: return "ISOLATED";
    case Status::restarted: return "RESTARTED";
    case Status::transient: return "TRANSIENT";
    case Status::reintegrated: return "REINTEGRATED";
    case Status::deadlocked: return "DEADLOCKED";
  }
  return "?";
}

const TaskDescriptor* Database::find_task(int unique_id) const {
  for (auto& t : tasks)
    if (t.unique_id == unique_id) return &t;
  return nullptr;
}

const GroupDescriptor* Database::find_group(int unique_id) const {
  for (auto& g : groups)
    if (g.unique_id == unique_id) return &g;
  return nullptr;
}

bool Database::exists(EntityRef e) const {
  switch (e.kind) {
    case Kind::node: return e.id >= 0 && e.id < nprocs;
    case Kind::task: return find_task(e.id) != nullptr;
    case Kind::group: return find_group(e.id) != nullptr;
  }
  return false;
}

EntityState& Database::state(EntityRef e) {
  if (e.kind == Kind::node) return node_states[e.id];
  return task_states[e.id];  // tasks and groups share the unique-id namespace
}

const EntityState* Database::state_if(EntityRef e) const {
  const std::map<int, EntityState>& m = e.kind == Kind::node ? node_states : task_states;
  auto it = m.find(e.id);
  return it == m.end() ? nullptr : &it->second;
}

std::vector<EntityRef> Database::expand(EntityRef e) const {
  if (e.kind == Kind::group) {
    std::vector<EntityRef> out;
    if (const GroupDescriptor* g = find_group(e.id))
      for (int m : g->members) out.push_back(task_ref(m));
    return out;
  }
  return {e};
}

RaiseOutcome raise_event(Database& db, const Notification& n) {
  RaiseOutcome out;
  EntityRef subject{n.subject_kind, n.subject};
  if (!db.exists(subject)) {
    out.error = "unknown subject " + std::string(kind_name(n.subject_kind)) + " " +
                std::to_string(n.subject);
    return out;
  }
  out.ok = true;
  db.log.push_back(n);
  EntityState& st = db.state(subject);
  if (n.condition == cond_phase_report) {
    st.phase = n.args.empty() ? 0 : n.args[0];
  } else if (is_error_condition(n.condition)) {
    st.error_list.push_back(n);
    st.running = false;
    if (st.alpha) alpha_update(*st.alpha, 1, n.label);
    out.recovery_needed = true;
  }
  return out;
}

static bool single_status(const Database& db, Status s, EntityRef e) {
  const EntityState* st = db.state_if(e);
  static const EntityState pristine;
  if (!st) st = &pristine;
  switch (s) {
    case Status::faulty: return !st->error_list.empty();
    case Status::running: return st->running;
    case Status::rebooted: {
      // a task counts as rebooted when its hosting node does
      if (e.kind == Kind::task) {
        if (const TaskDescriptor* t = db.find_task(e.id))
          return single_status(db, s, node_ref(t->node));
        return false;
      }
      return st->reboot_count >= 1;
    }
    case Status::started: return st->started;
    case Status::isolated: return st->isolated;
    case Status::restarted: return st->restart_count >= 1;
    case Status::transient:
      return !st->error_list.empty() && st->alpha &&
             alpha_assess(*st->alpha) == Assessment::transient;
    case Status::reintegrated: return st->reintegrated;
    case Status::deadlocked: return st->deadlock_partner.has_value();
  }
  return false;
}

AtomResult query_status(const Database& db, Status s, EntityRef e) {
  AtomResult r;
  for (EntityRef m : db.expand(e)) {
    if (single_status(db, s, m))
      r.match.push_back(m);
    else
      r.complement.push_back(m);
  }
  r.truth = !r.match.empty();
  return r;
}

AtomResult query_value(const Database& db, ValueAtom v, EntityRef e) {
  AtomResult r;
  auto members = db.expand(e);
  switch (v) {
    case ValueAtom::errn: {
      long long sum = 0;
      for (EntityRef m : members) {
        const EntityState* st = db.state_if(m);
        sum += st ? (long long)st->error_list.size() : 0;
      }
      r.value = sum;
      break;
    }
    case ValueAtom::errt: {
      // condition code of the most recent unremoved error, 0 if none
      long long best_time = -1;
      long long code = 0;
      for (EntityRef m : members) {
        const EntityState* st = db.state_if(m);
        if (st && !st->error_list.empty()) {
          const Notification& last = st->error_list.back();
          if (last.sim_time >= best_time) {
            best_time = last.sim_time;
            code = last.condition;
          }
        }
      }
      r.value = code;
      break;
    }
    case ValueAtom::phase: {
      const EntityState* st = db.state_if(e);
      r.value = st ? st->phase : 0;
      break;
    }
  }
  // a value atom's match set is fixed by the compare result later; start with
  // the full expansion so the VM can keep or drop it wholesale
  r.match = members;
  return r;
}

bool query_deadlocked(const Database& db, EntityRef a, EntityRef b) {
  const EntityState* sa = db.state_if(a);
  const EntityState* sb = db.state_if(b);
  return sa && sb && sa->deadlock_partner && sb->deadlock_partner &&
         *sa->deadlock_partner == b.id && *sb->deadlock_partner == a.id;
}

void db_remove(Database& db, RemoveSel sel, EntityRef e) {
  for (EntityRef m : db.expand(e)) {
    EntityState& st = db.state(m);
    st.phase = 0;
    if (sel == RemoveSel::any) st.error_list.clear();
  }
}

}  // namespace core
