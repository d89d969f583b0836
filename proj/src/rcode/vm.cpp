#include "rcode/vm.h"

#include <algorithm>
#include <cctype>

namespace rcode {

const char* verb_name(ActionRequest::Verb v) {
  using V = ActionRequest::Verb;
  switch (v) {
    case V::stop: return "stop";
    case V::start: return "start";
    case V::restart: return "restart";
    case V::isolate: return "isolate";
    case V::enable: return "enable";
    case V::reboot: return "reboot";
    case V::warn: return "warn";
    case V::send: return "send";
    case V::remove: return "remove";
    case V::call: return "call";
    case V::pause: return "pause";
  }
  return "?";
}

namespace {

struct AtomRecord {
  core::EntityRef subject;
  std::vector<core::EntityRef> expansion;
  bool pending = false;  // value atom waiting for its COMPARE
  bool satisfied = false;
  std::vector<core::EntityRef> match;
  std::vector<core::EntityRef> complement;
};

struct Vm {
  const Program& prog;
  const core::Database& db;
  const ActionSink& sink;
  ExecResult out;

  std::vector<long long> stack;
  std::vector<std::vector<AtomRecord>> frames;
  int pc = 0;
  bool halted = false;

  Vm(const Program& p, const core::Database& d, const ActionSink& s)
      : prog(p), db(d), sink(s) {}

  void fail(const std::string& why) {
    out.ok = false;
    out.error = why + " at triplet " + std::to_string(pc);
    out.error_pc = pc;
    halted = true;
  }

  void trace(const std::string& msg) {
    out.trace.push_back(std::to_string(pc) + "\t" + msg);
  }

  bool pop(long long& v) {
    if (stack.empty()) {
      fail("stack underflow");
      return false;
    }
    v = stack.back();
    stack.pop_back();
    return true;
  }

  void emit(ActionRequest a) {
    if (sink) sink(a);
    out.actions.push_back(std::move(a));
  }

  static std::string upper_kind(core::Kind k) {
    std::string w = core::kind_name(k);
    for (char& c : w) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return w;
  }

  // Entity operands resolve against the snapshot and, for @/~/$, against the
  // atoms of the innermost open section.
  bool resolve(int32_t enc, int32_t id, std::vector<core::EntityRef>& refs) {
    EntityOperand e = decode_entity(enc, id);
    switch (e.mode) {
      case mode_literal: {
        core::EntityRef r{e.kind, e.id};
        if (!db.exists(r)) {
          fail("unresolved entity " + std::string(core::kind_name(e.kind)) + " " +
               std::to_string(e.id));
          return false;
        }
        refs.push_back(r);
        return true;
      }
      case mode_star: {
        if (e.kind == core::Kind::task) {
          for (const auto& t : db.tasks) refs.push_back(core::task_ref(t.unique_id));
        } else if (e.kind == core::Kind::node) {
          for (int n = 0; n < db.nprocs; ++n) refs.push_back(core::node_ref(n));
        } else {
          for (const auto& g : db.groups) refs.push_back(core::group_ref(g.unique_id));
        }
        return true;
      }
      case mode_at:
      case mode_tilde:
      case mode_dollar: {
        if (frames.empty()) {
          fail("atom reference outside any section");
          return false;
        }
        const auto& frame = frames.back();
        int k = e.id;
        if (k < 1 || static_cast<size_t>(k) > frame.size()) {
          fail("atom index " + std::to_string(k) + " out of range");
          return false;
        }
        const AtomRecord& a = frame[static_cast<size_t>(k) - 1];
        if (a.pending) {
          fail("atom " + std::to_string(k) + " referenced before its compare");
          return false;
        }
        const auto& src = e.mode == mode_at      ? a.match
                          : e.mode == mode_tilde ? a.complement
                                                 : a.expansion;
        if (e.mode == mode_dollar) {
          refs.push_back(a.subject);
        } else {
          refs.insert(refs.end(), src.begin(), src.end());
        }
        return true;
      }
      case mode_guard_match: {
        if (frames.empty()) {
          fail("guard match outside any section");
          return false;
        }
        for (const AtomRecord& a : frames.back()) {
          if (!a.pending && a.satisfied)
            refs.insert(refs.end(), a.match.begin(), a.match.end());
        }
        return true;
      }
      default:
        fail("bad entity mode " + std::to_string(e.mode));
        return false;
    }
  }

  bool subject_ref(int32_t enc, int32_t id, core::EntityRef& r) {
    EntityOperand e = decode_entity(enc, id);
    if (e.mode != mode_literal) {
      std::vector<core::EntityRef> refs;
      if (!resolve(enc, id, refs)) return false;
      if (refs.empty()) {
        fail("empty entity set for store");
        return false;
      }
      r = refs.front();
      return true;
    }
    r = core::EntityRef{e.kind, e.id};
    if (!db.exists(r)) {
      fail("unresolved entity " + std::string(core::kind_name(e.kind)) + " " +
           std::to_string(e.id));
      return false;
    }
    return true;
  }

  void store_status(const Triplet& t) {
    if (frames.empty()) {
      fail("status atom outside any section");
      return;
    }
    int status_code = t.opn1 / 256;
    int32_t enc = t.opn1 & 0xff;
    auto status = static_cast<core::Status>(status_code);
    EntityOperand e = decode_entity(enc, t.opn2);

    AtomRecord rec;
    if (e.mode == mode_literal) {
      if (!subject_ref(enc, t.opn2, rec.subject)) return;
      rec.expansion = db.expand(rec.subject);
    } else {
      // atoms over @k / ~k / * evaluate member by member
      if (!resolve(enc, t.opn2, rec.expansion)) return;
      rec.subject = rec.expansion.empty() ? core::EntityRef{e.kind, -1} : rec.expansion.front();
    }

    long long partner = 0;
    if (status == core::Status::deadlocked && !pop(partner)) return;

    if (status == core::Status::deadlocked) {
      core::EntityRef pref = core::task_ref(static_cast<int>(partner));
      for (const core::EntityRef& m : rec.expansion) {
        if (core::query_deadlocked(db, pref, m)) rec.match.push_back(m);
        else rec.complement.push_back(m);
      }
      rec.satisfied = !rec.match.empty();
    } else if (e.mode == mode_literal) {
      core::AtomResult q = core::query_status(db, status, rec.subject);
      rec.satisfied = q.truth;
      rec.match = q.match;
      rec.complement = q.complement;
    } else {
      for (const core::EntityRef& m : rec.expansion) {
        if (core::query_status(db, status, m).truth) rec.match.push_back(m);
        else rec.complement.push_back(m);
      }
      rec.satisfied = !rec.match.empty();
    }
    frames.back().push_back(rec);
    stack.push_back(rec.satisfied ? 1 : 0);
    std::string name = core::status_name(status);
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    trace("STORE-STATUS: " + name + "(" + core::kind_name(rec.subject.kind) + " " +
          std::to_string(rec.subject.id) + ") is " + std::to_string(rec.satisfied ? 1 : 0) + ".");
  }

  void store_value(const Triplet& t, core::ValueAtom v, const char* label, const char* what) {
    if (frames.empty()) {
      fail("value atom outside any section");
      return;
    }
    core::EntityRef subj;
    if (!subject_ref(t.opn1, t.opn2, subj)) return;
    core::AtomResult q = core::query_value(db, v, subj);
    AtomRecord rec;
    rec.subject = subj;
    rec.expansion = db.expand(subj);
    rec.pending = true;
    frames.back().push_back(rec);
    stack.push_back(q.value);
    trace(std::string(label) + ": stored " + what + " of " + core::kind_name(subj.kind) + " " +
          std::to_string(subj.id) + ", i.e., " + std::to_string(q.value) + ".");
  }

  void compare(const Triplet& t) {
    long long v;
    if (!pop(v)) return;
    long long lit = t.opn2;
    bool truth = false;
    switch (t.opn1) {
      case cmp_eq: truth = v == lit; break;
      case cmp_neq: truth = v != lit; break;
      case cmp_gt: truth = v > lit; break;
      case cmp_ge: truth = v >= lit; break;
      case cmp_lt: truth = v < lit; break;
      case cmp_le: truth = v <= lit; break;
      default: fail("bad compare operator " + std::to_string(t.opn1)); return;
    }
    // the most recent pending value atom takes this verdict
    if (!frames.empty()) {
      auto& frame = frames.back();
      for (auto it = frame.rbegin(); it != frame.rend(); ++it) {
        if (it->pending) {
          it->pending = false;
          it->satisfied = truth;
          it->match = truth ? it->expansion : std::vector<core::EntityRef>{};
          it->complement = truth ? std::vector<core::EntityRef>{} : it->expansion;
          break;
        }
      }
    }
    stack.push_back(truth ? 1 : 0);
    trace("COMPARING(" + std::to_string(lit) + " vs. " + std::to_string(v) + "): Storing " +
          std::to_string(truth ? 1 : 0) + ".");
  }

  void action_simple(const Triplet& t, ActionRequest::Verb verb, const char* doing) {
    std::vector<core::EntityRef> refs;
    if (!resolve(t.opn1, t.opn2, refs)) return;
    for (const core::EntityRef& r : refs)
      trace(std::string(doing) + " " + upper_kind(r.kind) + " " + std::to_string(r.id) + ".");
    ActionRequest a;
    a.verb = verb;
    a.targets = std::move(refs);
    emit(std::move(a));
  }

  void step() {
    const Triplet& t = prog.triplets[static_cast<size_t>(pc)];
    int next = pc + 1;
    switch (t.op) {
      case op_stop:
        if (t.opn1 == -1 && t.opn2 == -1) {
          trace("HALT.");
          halted = true;
          out.ok = true;
          return;
        }
        action_simple(t, ActionRequest::Verb::stop, "KILLING");
        break;
      case op_set_role:
        trace("SET-ROLE: node " + std::to_string(t.opn1) + " is " +
              (t.opn2 == role_manager ? "Manager" : "Assistant") + ".");
        break;
      case op_if:
        frames.emplace_back();
        trace("IF statement.");
        break;
      case op_fi:
        trace("FI statement.");
        break;
      case op_oanew: {
        if (frames.empty()) {
          fail("section close without open section");
          return;
        }
        frames.pop_back();
        trace("OA-RENEW.");
        break;
      }
      case op_store_phase:
        store_value(t, core::ValueAtom::phase, "STORE-PHASE", "phase");
        break;
      case op_store_errn:
        store_value(t, core::ValueAtom::errn, "STORE-ERRN", "error count");
        break;
      case op_store_errt:
        store_value(t, core::ValueAtom::errt, "STORE-ERRT", "error type");
        break;
      case op_store_status:
        store_status(t);
        break;
      case op_compare:
        compare(t);
        break;
      case op_and:
      case op_or: {
        long long b, a;
        if (!pop(b) || !pop(a)) return;
        long long r = t.op == op_and ? ((a != 0 && b != 0) ? 1 : 0) : ((a != 0 || b != 0) ? 1 : 0);
        stack.push_back(r);
        trace(std::string(t.op == op_and ? "AND" : "OR") + ": Storing " + std::to_string(r) + ".");
        break;
      }
      case op_not: {
        long long a;
        if (!pop(a)) return;
        stack.push_back(a == 0 ? 1 : 0);
        trace("NOT: Storing " + std::to_string(a == 0 ? 1 : 0) + ".");
        break;
      }
      case op_false: {
        long long cond;
        if (!pop(cond)) return;
        if (cond == 0) {
          if (t.opn1 < 0 || static_cast<size_t>(t.opn1) >= prog.triplets.size()) {
            fail("jump target " + std::to_string(t.opn1) + " out of range");
            return;
          }
          trace("Conditional GOTO, fulfilled, " + std::to_string(t.opn1) + ".");
          next = t.opn1;
        } else {
          trace("Conditional GOTO, unfulfilled, " + std::to_string(next) + ".");
        }
        break;
      }
      case op_push:
        stack.push_back(t.opn1);
        trace("PUSH(" + std::to_string(t.opn1) + ").");
        break;
      case op_send: {
        long long v;
        if (t.opn1 & send_matched_id_flag) {
          // payload is the id of the first guard-matched entity, not a pushed value
          if (frames.empty()) {
            fail("matched-id send outside any section");
            return;
          }
          bool found = false;
          for (const AtomRecord& a : frames.back()) {
            if (!a.pending && a.satisfied && !a.match.empty()) {
              v = a.match.front().id;
              found = true;
              break;
            }
          }
          if (!found) {
            fail("matched-id send with no satisfied atom");
            return;
          }
        } else {
          if (!pop(v)) return;
        }
        std::vector<core::EntityRef> refs;
        if (!resolve(t.opn1 & 0xff, t.opn2, refs)) return;
        for (const core::EntityRef& r : refs)
          trace("SEND MSG " + std::to_string(v) + " to " + upper_kind(r.kind) + " " +
                std::to_string(r.id) + ".");
        ActionRequest a;
        a.verb = ActionRequest::Verb::send;
        a.targets = std::move(refs);
        a.value = v;
        emit(std::move(a));
        break;
      }
      case op_start:
        action_simple(t, ActionRequest::Verb::start, "STARTING");
        break;
      case op_restart:
        action_simple(t, ActionRequest::Verb::restart, "RESTARTING");
        break;
      case op_isolate:
        action_simple(t, ActionRequest::Verb::isolate, "ISOLATING");
        break;
      case op_enable:
        action_simple(t, ActionRequest::Verb::enable, "ENABLING");
        break;
      case op_reboot:
        action_simple(t, ActionRequest::Verb::reboot, "REBOOTING");
        break;
      case op_warn: {
        int argc = (t.opn1 >> 8) & 0xff;
        bool has_err = (t.opn1 >> 16) != 0;
        ActionRequest a;
        a.verb = ActionRequest::Verb::warn;
        a.args.resize(static_cast<size_t>(argc));
        for (int i = argc - 1; i >= 0; --i) {
          long long v;
          if (!pop(v)) return;
          a.args[static_cast<size_t>(i)] = v;
        }
        if (has_err) {
          long long errn, subj_id, subj_enc;
          if (!pop(errn) || !pop(subj_id) || !pop(subj_enc)) return;
          a.value = errn;
          EntityOperand se = decode_entity(static_cast<int32_t>(subj_enc),
                                           static_cast<int32_t>(subj_id));
          a.about = core::EntityRef{se.kind, se.id};
        }
        if (t.opn2 == -1) {
          a.warn_backbone = true;
          trace("WARNING BACKBONE.");
        } else {
          if (!resolve(t.opn1 & 0xff, t.opn2, a.targets)) return;
          for (const core::EntityRef& r : a.targets)
            trace("WARNING " + upper_kind(r.kind) + " " + std::to_string(r.id) + ".");
        }
        emit(std::move(a));
        break;
      }
      case op_remove: {
        ActionRequest a;
        a.verb = ActionRequest::Verb::remove;
        a.selector = (t.opn1 / 256 == 0) ? core::RemoveSel::phase : core::RemoveSel::any;
        if (!resolve(t.opn1 & 0xff, t.opn2, a.targets)) return;
        for (const core::EntityRef& r : a.targets)
          trace(std::string("REMOVE ") + (a.selector == core::RemoveSel::phase ? "PHASE" : "ANY") +
                " " + upper_kind(r.kind) + " " + std::to_string(r.id) + ".");
        emit(std::move(a));
        break;
      }
      case op_call: {
        ActionRequest a;
        a.verb = ActionRequest::Verb::call;
        a.value = t.opn1;
        int argc = t.opn2 < 0 ? 0 : t.opn2;
        a.args.resize(static_cast<size_t>(argc));
        for (int i = argc - 1; i >= 0; --i) {
          long long v;
          if (!pop(v)) return;
          a.args[static_cast<size_t>(i)] = v;
        }
        trace("CALL(" + std::to_string(t.opn1) + ").");
        emit(std::move(a));
        break;
      }
      case op_pause: {
        ActionRequest a;
        a.verb = ActionRequest::Verb::pause;
        a.value = t.opn1;
        trace("PAUSE(" + std::to_string(t.opn1) + ").");
        emit(std::move(a));
        break;
      }
      default:
        fail("unknown opcode " + std::to_string(t.op));
        return;
    }
    if (!halted) pc = next;
  }
};

}  // namespace

ExecResult execute(const Program& p, const core::Database& db, const ActionSink& sink) {
  Vm vm(p, db, sink);
  if (p.triplets.empty()) {
    vm.out.ok = false;
    vm.out.error = "empty program";
    return std::move(vm.out);
  }
  size_t budget = p.triplets.size() * 64 + 1024;
  size_t steps = 0;
  while (!vm.halted) {
    if (static_cast<size_t>(vm.pc) >= p.triplets.size()) {
      vm.fail("ran past end of program");
      break;
    }
    if (++steps > budget) {
      vm.fail("step budget exceeded");
      break;
    }
    vm.step();
  }
  return std::move(vm.out);
}

}  // namespace rcode
