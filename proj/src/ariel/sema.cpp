#include <algorithm>
#include <set>

#include "ariel/compile.h"

namespace ariel {

core::Database ConfigBundle::to_database() const {
  core::Database db;
  db.nprocs = nprocs;
  db.tasks = tasks;
  db.groups = groups;
  for (int n = 0; n < nprocs; ++n) {
    core::EntityState s;
    s.running = true;
    db.node_states[n] = s;
  }
  for (const auto& t : tasks) {
    core::EntityState s;
    s.running = true;
    auto it = alphacounts.find(t.unique_id);
    if (it != alphacounts.end()) {
      core::AlphaCounter a;
      a.threshold = it->second.first;
      a.factor = it->second.second;
      s.alpha = a;
    }
    db.task_states[t.unique_id] = s;
  }
  return db;
}

namespace {

struct Sema {
  SemaResult out;
  std::set<int> declared_tasks;
  std::set<int> declared_groups;

  void error(int line, const std::string& msg) {
    out.events.push_back(
        {line, 1, "\tLine " + std::to_string(line) + ": semantical error: " + msg});
    ++out.errors;
  }

  bool node_known(int id) const { return out.config.nprocs <= 0 || id < out.config.nprocs; }

  void check_declared(const Target& t, int line) {
    if (t.mode != TargetMode::literal) return;
    switch (t.kind) {
      case core::Kind::task:
        if (!declared_tasks.count(t.id)) error(line, "Task " + std::to_string(t.id) + " not declared");
        break;
      case core::Kind::group:
        if (!declared_groups.count(t.id))
          error(line, "Logical " + std::to_string(t.id) + " not declared");
        break;
      case core::Kind::node:
        if (t.id < 0 || !node_known(t.id)) error(line, "Node " + std::to_string(t.id) + " not declared");
        break;
    }
  }

  void check_atom_ref(const Target& t, int atoms_in_scope, int line) {
    if (t.mode != TargetMode::at && t.mode != TargetMode::tilde) return;
    if (t.id < 1 || t.id > atoms_in_scope)
      error(line, "No such atom @" + std::to_string(t.id));
  }

  int count_atoms(const Expr& e) {
    if (std::holds_alternative<StatusAtom>(e.node) || std::holds_alternative<ValueAtom>(e.node) ||
        std::holds_alternative<DeadlockAtom>(e.node))
      return 1;
    if (const auto* b = std::get_if<BinExpr>(&e.node))
      return count_atoms(*b->lhs) + count_atoms(*b->rhs);
    if (const auto* n = std::get_if<NotExpr>(&e.node)) return count_atoms(*n->inner);
    return 0;
  }

  void check_expr(const Expr& e, int atoms_in_scope) {
    if (const auto* s = std::get_if<StatusAtom>(&e.node)) {
      check_declared(s->target, e.line);
      check_atom_ref(s->target, atoms_in_scope, e.line);
      return;
    }
    if (const auto* v = std::get_if<ValueAtom>(&e.node)) {
      if (v->which == core::ValueAtom::phase && v->entity.kind != core::Kind::task) {
        error(e.line, "Can only use PHASE with tasks");
        return;
      }
      check_declared(v->entity, e.line);
      return;
    }
    if (const auto* d = std::get_if<DeadlockAtom>(&e.node)) {
      if (d->a.kind != core::Kind::task || d->b.kind != core::Kind::task) {
        error(e.line, "Can only use DEADLOCKED with tasks");
        return;
      }
      check_declared(d->a, e.line);
      check_declared(d->b, e.line);
      return;
    }
    if (const auto* b = std::get_if<BinExpr>(&e.node)) {
      check_expr(*b->lhs, atoms_in_scope);
      check_expr(*b->rhs, atoms_in_scope);
      return;
    }
    if (const auto* n = std::get_if<NotExpr>(&e.node)) check_expr(*n->inner, atoms_in_scope);
  }

  void check_warn(const WarnClause& w, int atoms, int line) {
    check_declared(w.target, line);
    check_atom_ref(w.target, atoms, line);
  }

  void check_action(const Action& act, int atoms) {
    if (const auto* s = std::get_if<SimpleAction>(&act.node)) {
      if (s->verb == SimpleVerb::stop && s->target.mode == TargetMode::star) {
        error(act.line, "Cannot STOP a wildcard");
        return;
      }
      check_declared(s->target, act.line);
      check_atom_ref(s->target, atoms, act.line);
    } else if (const auto* ew = std::get_if<ErrWarnAction>(&act.node)) {
      check_declared(ew->subject, act.line);
      for (const WarnClause& w : ew->warns) check_warn(w, atoms, act.line);
    } else if (const auto* rm = std::get_if<RemoveAction>(&act.node)) {
      check_declared(rm->target, act.line);
    } else if (const auto* sd = std::get_if<SendAction>(&act.node)) {
      if (sd->task.kind != core::Kind::task || sd->task.mode == TargetMode::star) {
        error(act.line, "Can only SEND to tasks");
        return;
      }
      check_declared(sd->task, act.line);
    } else if (const auto* sec = std::get_if<std::unique_ptr<Section>>(&act.node)) {
      check_section(**sec);
    }
    for (const WarnClause& w : act.extra_warns) check_warn(w, atoms, act.line);
  }

  void check_section(const Section& sec) {
    int atoms = 0;
    for (const Branch& br : sec.branches) {
      check_expr(*br.guard, atoms);  // guard atoms may reference earlier branches' atoms
      atoms += count_atoms(*br.guard);
      for (const Action& act : br.actions) check_action(act, atoms);
    }
    if (sec.has_else)
      for (const Action& act : sec.else_actions) check_action(act, atoms);
  }

  void run(const Script& script) {
    auto& cfg = out.config;
    // declarations first, so forward references inside sections resolve
    for (const Stmt& stmt : script.stmts) {
      if (const auto* np = std::get_if<NprocsStmt>(&stmt.node)) {
        if (np->n <= 0) error(stmt.line, "NPROCS must be positive");
        else cfg.nprocs = np->n;
      } else if (const auto* td = std::get_if<TaskDeclStmt>(&stmt.node)) {
        if (td->id_hi < td->id_lo) {
          error(stmt.line, "Bad task interval");
          continue;
        }
        for (int id = td->id_lo; id <= td->id_hi; ++id) {
          if (!declared_tasks.insert(id).second) {
            error(stmt.line, "Task " + std::to_string(id) + " declared twice");
            continue;
          }
          core::TaskDescriptor desc;
          desc.unique_id = id;
          desc.name = td->name.empty() ? "TASK" + std::to_string(id) : td->name;
          desc.node = td->node;
          desc.local_id = td->taskid_lo + (id - td->id_lo);
          cfg.tasks.push_back(desc);
        }
      } else if (const auto* lg = std::get_if<LogicalStmt>(&stmt.node)) {
        if (!declared_groups.insert(lg->id).second)
          error(stmt.line, "Logical " + std::to_string(lg->id) + " declared twice");
      }
    }

    for (const Stmt& stmt : script.stmts) {
      if (const auto* d = std::get_if<DefineStmt>(&stmt.node)) {
        for (int n : d->nodes) {
          if (!node_known(n)) error(stmt.line, "Node " + std::to_string(n) + " not declared");
          else cfg.roles[n] = d->role;
        }
      } else if (const auto* nt = std::get_if<NumTasksStmt>(&stmt.node)) {
        cfg.numtasks[nt->node] = nt->count;
      } else if (const auto* lg = std::get_if<LogicalStmt>(&stmt.node)) {
        core::GroupDescriptor g;
        g.unique_id = lg->id;
        g.name = lg->name.empty() ? "LOGICAL" + std::to_string(lg->id) : lg->name;
        for (int m : lg->members) {
          if (!declared_tasks.count(m))
            error(stmt.line, "Task " + std::to_string(m) + " not declared");
          g.members.push_back(m);
        }
        cfg.groups.push_back(g);
      } else if (const auto* al = std::get_if<AlphaStmt>(&stmt.node)) {
        if (!declared_tasks.count(al->id))
          error(stmt.line, "Task " + std::to_string(al->id) + " not declared");
        cfg.alphacounts[al->id] = {al->threshold, al->factor};
      } else if (const auto* to = std::get_if<TimeoutStmt>(&stmt.node)) {
        cfg.timeouts[to->name] = to->value;
      } else if (const auto* wd = std::get_if<WatchdogStmt>(&stmt.node)) {
        if (!declared_tasks.count(wd->task))
          error(stmt.line, "Task " + std::to_string(wd->task) + " not declared");
        if (wd->watches && !declared_tasks.count(*wd->watches))
          error(stmt.line, "Task " + std::to_string(*wd->watches) + " not declared");
        if (wd->period_ticks <= 0) error(stmt.line, "WATCHDOG needs HEARTBEATS");
        cfg.watchdogs.push_back(*wd);
      } else if (const auto* nv = std::get_if<NVersionStmt>(&stmt.node)) {
        NVersionStmt fixed = *nv;
        if (fixed.algorithm.empty()) fixed.algorithm = "majority";
        if (fixed.versions.empty()) error(stmt.line, "N-VERSION needs at least one VERSION");
        for (const VersionDecl& v : fixed.versions)
          if (!declared_tasks.count(v.task))
            error(stmt.line, "Task " + std::to_string(v.task) + " not declared");
        cfg.nversions.push_back(std::move(fixed));
      } else if (const auto* in = std::get_if<InjectStmt>(&stmt.node)) {
        if (in->on_node) {
          if (!node_known(in->id)) error(stmt.line, "Node " + std::to_string(in->id) + " not declared");
        } else if (!declared_tasks.count(in->id)) {
          error(stmt.line, "Task " + std::to_string(in->id) + " not declared");
        }
        cfg.injections.push_back(*in);
      } else if (const auto* a = std::get_if<AliasStmt>(&stmt.node)) {
        cfg.aliases.push_back(*a);
      } else if (const auto* sec = std::get_if<std::unique_ptr<Section>>(&stmt.node)) {
        check_section(**sec);
      }
    }

    if (cfg.nprocs <= 0) {
      int max_node = -1;
      for (const auto& t : cfg.tasks) max_node = std::max(max_node, t.node);
      for (const auto& [n, r] : cfg.roles) max_node = std::max(max_node, n);
      cfg.nprocs = max_node + 1;
    }
    std::sort(cfg.tasks.begin(), cfg.tasks.end(),
              [](const auto& a, const auto& b) { return a.unique_id < b.unique_id; });
  }
};

}  // namespace

SemaResult check_semantics(const Script& script) {
  Sema s;
  s.run(script);
  return std::move(s.out);
}

}  // namespace ariel
