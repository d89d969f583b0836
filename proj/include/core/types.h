#pragma once

#include <string>
#include <vector>
#include <cstdint>

namespace core {

// entity kinds, in the order used by the r-code operand encoding
enum class Kind : int { node = 0, task = 1, group = 2 };

struct EntityRef {
  Kind kind = Kind::task;
  int id = 0;

  bool operator==(const EntityRef& o) const { return kind == o.kind && id == o.id; }
  bool operator<(const EntityRef& o) const {
    if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
    return id < o.id;
  }
};

inline EntityRef node_ref(int id) { return {Kind::node, id}; }
inline EntityRef task_ref(int id) { return {Kind::task, id}; }
inline EntityRef group_ref(int id) { return {Kind::group, id}; }

const char* kind_name(Kind k);

struct TaskDescriptor {
  int unique_id = 0;
  std::string name;  // optional symbolic name
  int node = 0;
  int local_id = 0;
};

struct GroupDescriptor {
  int unique_id = 0;
  std::string name;
  std::vector<int> members;  // task unique-ids
};

// notification condition codes; everything >= cond_error counts as an error
enum : int {
  cond_phase_report = 1,
  cond_error = 2,            // generic fault report
  cond_missed_deadline = 3,  // watchdog expiry
  cond_value_fault = 4,      // voter found the subject in minority
  cond_crash = 5,            // node or component declared crashed
};

inline bool is_error_condition(int c) { return c >= cond_error; }

// (condition, source kind, subject, parameters) plus detector bookkeeping
struct Notification {
  int condition = 0;
  Kind subject_kind = Kind::task;
  int subject = 0;
  std::vector<int> args;
  long long label = 0;     // detector sequence number, strictly increasing per subject
  long long sim_time = 0;  // ticks
};

}  // namespace core
