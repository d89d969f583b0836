#include "ariel/compile.h"
#include "rcode/vm.h"

namespace ariel {

namespace {

using rcode::Program;
using rcode::Triplet;

int32_t encode_target(const Target& t) {
  int mode = 0;
  switch (t.mode) {
    case TargetMode::literal: mode = rcode::mode_literal; break;
    case TargetMode::at: mode = rcode::mode_at; break;
    case TargetMode::tilde: mode = rcode::mode_tilde; break;
    case TargetMode::star: mode = rcode::mode_star; break;
  }
  return static_cast<int32_t>(t.kind) * 16 + mode;
}

int32_t target_opn2(const Target& t) { return t.mode == TargetMode::star ? -1 : t.id; }

struct Translator {
  Program prog;

  int emit(int32_t op, int32_t a, int32_t b) {
    prog.triplets.push_back({op, a, b});
    return static_cast<int>(prog.triplets.size()) - 1;
  }

  int here() const { return static_cast<int>(prog.triplets.size()); }

  int compile_expr(const Expr& e) {
    if (const auto* s = std::get_if<StatusAtom>(&e.node)) {
      int32_t status = static_cast<int32_t>(s->status);
      emit(rcode::op_store_status, status * 256 + encode_target(s->target),
           target_opn2(s->target));
      return 1;
    }
    if (const auto* v = std::get_if<ValueAtom>(&e.node)) {
      int32_t op = v->which == core::ValueAtom::phase  ? rcode::op_store_phase
                   : v->which == core::ValueAtom::errn ? rcode::op_store_errn
                                                       : rcode::op_store_errt;
      emit(op, encode_target(v->entity), target_opn2(v->entity));
      emit(rcode::op_compare, v->cmp, static_cast<int32_t>(v->literal));
      return 1;
    }
    if (const auto* d = std::get_if<DeadlockAtom>(&e.node)) {
      emit(rcode::op_push, d->a.id, -1);
      int32_t status = static_cast<int32_t>(core::Status::deadlocked);
      emit(rcode::op_store_status, status * 256 + encode_target(d->b), target_opn2(d->b));
      return 1;
    }
    if (const auto* b = std::get_if<BinExpr>(&e.node)) {
      int n = compile_expr(*b->lhs);
      n += compile_expr(*b->rhs);
      emit(b->is_and ? rcode::op_and : rcode::op_or, -1, -1);
      return n;
    }
    const auto& n = std::get<NotExpr>(e.node);
    int c = compile_expr(*n.inner);
    emit(rcode::op_not, -1, -1);
    return c;
  }

  void compile_warn(const WarnClause& w, bool has_err, long long errn, const Target* subject) {
    if (has_err) {
      emit(rcode::op_push, encode_target(*subject), -1);
      emit(rcode::op_push, subject->id, -1);
      emit(rcode::op_push, static_cast<int32_t>(errn), -1);
    }
    for (long long a : w.args) emit(rcode::op_push, static_cast<int32_t>(a), -1);
    int32_t argc = static_cast<int32_t>(w.args.size());
    int32_t flags = (has_err ? (1 << 16) : 0) | (argc << 8);
    emit(rcode::op_warn, flags | encode_target(w.target), target_opn2(w.target));
  }

  void compile_action(const Action& act) {
    if (const auto* s = std::get_if<SimpleAction>(&act.node)) {
      int32_t op;
      switch (s->verb) {
        case SimpleVerb::stop: op = rcode::op_stop; break;
        case SimpleVerb::start: op = rcode::op_start; break;
        case SimpleVerb::restart: op = rcode::op_restart; break;
        case SimpleVerb::enable: op = rcode::op_enable; break;
        case SimpleVerb::isolate: op = rcode::op_isolate; break;
        case SimpleVerb::reboot: op = rcode::op_reboot; break;
        default: op = rcode::op_stop; break;
      }
      emit(op, encode_target(s->target), target_opn2(s->target));
    } else if (const auto* ew = std::get_if<ErrWarnAction>(&act.node)) {
      for (const WarnClause& w : ew->warns) compile_warn(w, true, ew->errn, &ew->subject);
    } else if (const auto* rm = std::get_if<RemoveAction>(&act.node)) {
      int32_t sel = rm->sel == core::RemoveSel::phase ? 0 : 1;
      emit(rcode::op_remove, sel * 256 + encode_target(rm->target), target_opn2(rm->target));
    } else if (const auto* sd = std::get_if<SendAction>(&act.node)) {
      if (sd->faulty) {
        emit(rcode::op_send, rcode::send_matched_id_flag | encode_target(sd->task),
             target_opn2(sd->task));
      } else {
        emit(rcode::op_push, static_cast<int32_t>(sd->value), -1);
        emit(rcode::op_send, encode_target(sd->task), target_opn2(sd->task));
      }
    } else if (const auto* c = std::get_if<CallAction>(&act.node)) {
      for (long long a : c->args) emit(rcode::op_push, static_cast<int32_t>(a), -1);
      emit(rcode::op_call, static_cast<int32_t>(c->routine),
           static_cast<int32_t>(c->args.size()));
    } else if (const auto* p = std::get_if<PauseAction>(&act.node)) {
      emit(rcode::op_pause, static_cast<int32_t>(p->ticks), -1);
    } else if (const auto* sec = std::get_if<std::unique_ptr<Section>>(&act.node)) {
      compile_section(**sec);
    }
    for (const WarnClause& w : act.extra_warns) compile_warn(w, false, 0, nullptr);
  }

  void compile_section(const Section& sec) {
    emit(rcode::op_if, -1, -1);
    int atoms = 0;
    std::vector<int> fi_patches;  // unconditional skips out of taken branches
    size_t nbranches = sec.branches.size();
    for (size_t i = 0; i < nbranches; ++i) {
      const Branch& br = sec.branches[i];
      atoms += compile_expr(*br.guard);
      int guard_false = emit(rcode::op_false, -1, -1);
      for (const Action& act : br.actions) compile_action(act);
      bool more = i + 1 < nbranches || sec.has_else;
      if (more) {
        emit(rcode::op_push, 0, -1);
        fi_patches.push_back(emit(rcode::op_false, -1, -1));
      }
      // a failed guard falls through to the next alternative, or to FI
      prog.triplets[static_cast<size_t>(guard_false)].opn1 = here();
    }
    if (sec.has_else)
      for (const Action& act : sec.else_actions) compile_action(act);
    int fi = emit(rcode::op_fi, -1, -1);
    for (int idx : fi_patches) prog.triplets[static_cast<size_t>(idx)].opn1 = fi;
    emit(rcode::op_oanew, atoms, -1);
  }
};

}  // namespace

rcode::Program translate(const Script& script, const ConfigBundle& config) {
  (void)config;
  Translator tr;
  for (const Stmt& stmt : script.stmts) {
    if (const auto* d = std::get_if<DefineStmt>(&stmt.node)) {
      for (int n : d->nodes) tr.emit(rcode::op_set_role, n, d->role);
    }
  }
  for (const Stmt& stmt : script.stmts) {
    if (const auto* sec = std::get_if<std::unique_ptr<Section>>(&stmt.node))
      tr.compile_section(**sec);
  }
  tr.emit(rcode::op_stop, -1, -1);
  return std::move(tr.prog);
}

}  // namespace ariel
