#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/database.h"
#include "core/types.h"

namespace ariel {

enum class TargetMode { literal, at, tilde, star };

// entity (T0, NODE 2, LOGICAL 5), those-reference (@1, ~2) or wildcard (T*)
struct Target {
  core::Kind kind = core::Kind::task;
  TargetMode mode = TargetMode::literal;
  int id = -1;  // unique id, or atom index for @/~
  int line = 0;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct StatusAtom {
  core::Status status;
  Target target;
};

struct ValueAtom {
  core::ValueAtom which;
  Target entity;
  int cmp = 0;  // rcode::Cmp
  long long literal = 0;
};

struct DeadlockAtom {
  Target a, b;
};

struct BinExpr {
  bool is_and = true;
  ExprPtr lhs, rhs;
};

struct NotExpr {
  ExprPtr inner;
};

struct Expr {
  std::variant<StatusAtom, ValueAtom, DeadlockAtom, BinExpr, NotExpr> node;
  int line = 0;
};

enum class SimpleVerb { stop, start, restart, enable, isolate, reboot };

struct WarnClause {
  Target target;
  std::vector<long long> args;
};

struct SimpleAction {
  SimpleVerb verb;
  Target target;
};

struct ErrWarnAction {
  long long errn = 0;
  Target subject;
  std::vector<WarnClause> warns;  // at least one
};

struct RemoveAction {
  core::RemoveSel sel = core::RemoveSel::phase;
  Target target;
};

struct SendAction {
  bool faulty = false;  // SEND FAULTY: payload is the guard's matched entity
  long long value = 0;
  Target task;
};

struct CallAction {
  long long routine = 0;
  std::vector<long long> args;
};

struct PauseAction {
  long long ticks = 0;
};

struct Section;

struct Action {
  std::variant<SimpleAction, ErrWarnAction, RemoveAction, SendAction, CallAction, PauseAction,
               std::unique_ptr<Section>>
      node;
  std::vector<WarnClause> extra_warns;  // trailing AND WARN chain
  int line = 0;
};

struct Branch {
  ExprPtr guard;
  std::vector<Action> actions;
};

struct Section {
  std::vector<Branch> branches;  // IF plus any ELIF
  bool has_else = false;
  std::vector<Action> else_actions;
  int line = 0;      // the IF
  int end_line = 0;  // the FI
};

// configuration statements

struct DefineStmt {
  std::vector<int> nodes;
  int role = 0;  // rcode::Role
};

struct NprocsStmt {
  int n = 0;
};

struct NumTasksStmt {
  int node = 0;
  int count = 0;
};

struct TaskDeclStmt {
  int id_lo = 0, id_hi = 0;  // inclusive; single decl has hi == lo
  std::string name;
  int node = 0;
  int taskid_lo = 0;
};

struct AliasStmt {
  int task_lo = 0, task_hi = 0;
  int mbox_lo = 0;
  int alias_lo = 0;
};

struct LogicalStmt {
  int id = 0;
  std::string name;
  std::vector<int> members;
};

struct AlphaStmt {
  int id = 0;
  double threshold = 0.0;
  double factor = 0.0;
};

struct TimeoutStmt {
  std::string name;  // canonical lowercase key
  long long value = 0;
};

struct WatchdogStmt {
  int task = -1;
  std::optional<int> watches;
  long long period_ticks = 0;
  enum class OnError { warn_task, warn_backbone, reboot, restart };
  OnError on_error = OnError::warn_backbone;
  int warn_task = -1;
  std::optional<std::pair<double, double>> alpha;  // threshold, factor
};

struct VersionDecl {
  int rank = 0;
  bool spare = false;
  int task = -1;
  long long timeout_ticks = 0;
};

struct NVersionStmt {
  int task = -1;  // the logical task the redundant structure presents
  std::vector<VersionDecl> versions;
  std::string algorithm;  // "majority"
  std::string metric;
  int on_error_task = -1;
  int on_success_task = -1;
};

struct InjectStmt {
  bool mfault = false;   // else bfault
  bool on_node = false;  // else component (task)
  int id = 0;
  long long after_ticks = 0;
};

struct IncludeStmt {
  std::string file;
};

struct Stmt {
  std::variant<DefineStmt, NprocsStmt, NumTasksStmt, TaskDeclStmt, AliasStmt, LogicalStmt,
               AlphaStmt, TimeoutStmt, WatchdogStmt, NVersionStmt, InjectStmt, IncludeStmt,
               std::unique_ptr<Section>>
      node;
  int line = 0;
};

struct Script {
  std::string filename;
  int source_lines = 0;
  std::vector<Stmt> stmts;
};

// digest of the configuration statements, consumed by the runtime builders
struct ConfigBundle {
  int nprocs = 0;
  std::map<int, int> roles;  // node -> rcode::Role
  std::map<int, int> numtasks;
  std::vector<core::TaskDescriptor> tasks;
  std::vector<core::GroupDescriptor> groups;
  std::map<int, std::pair<double, double>> alphacounts;  // task -> threshold, factor
  std::map<std::string, long long> timeouts;
  std::vector<WatchdogStmt> watchdogs;
  std::vector<NVersionStmt> nversions;
  std::vector<InjectStmt> injections;
  std::vector<AliasStmt> aliases;

  // database snapshot seeded from the declarations
  core::Database to_database() const;
};

}  // namespace ariel
