#include "backbone/backbone.h"

#include <algorithm>

namespace backbone {

using simnet::Payload;

AmsTimeouts AmsTimeouts::from_config(const std::map<std::string, long long>& timeouts) {
  AmsTimeouts t;
  auto take = [&](const char* key, Ticks& into) {
    auto it = timeouts.find(key);
    if (it != timeouts.end() && it->second > 0) into = it->second;
  };
  take("mia_send", t.mia_send);
  take("taia_recv", t.taia_recv);
  take("mia_recv", t.mia_recv);
  take("taia_send", t.taia_send);
  take("teif", t.teif);
  take("ia_clear", t.ia_clear);
  take("ia_set", t.ia_set);
  return t;
}

IatGuard::IatGuard(int node_, int nprocs, Ticks ia_set) : nprocs_(nprocs), ia_set_(ia_set) {
  node = node_;
  name = "iat";
}

void IatGuard::on_start() {
  flag_ = false;
  periodic(
      ia_set_, gen_,
      [this]() {
        if (flag_) {
          sim->emit(node, name, "stuck", "component bb missed its clear window");
          for (int k = 0; k < nprocs_; ++k)
            sim->post(this, core::node_ref(k), simnet::TeifMsg{node});
        }
        flag_ = true;
      },
      false);
}

BackboneComponent::BackboneComponent(int node_, int nprocs, core::Database boot_db,
                                     AmsTimeouts t, std::shared_ptr<const rcode::Program> strategy,
                                     int boot_manager)
    : nprocs_(nprocs),
      boot_db_(std::move(boot_db)),
      t_(t),
      strategy_(std::move(strategy)),
      boot_manager_(boot_manager) {
  node = node_;
  name = "bb";
}

void BackboneComponent::reset(bool boot) {
  replica_ = boot_db_;
  role_ = Role::assistant;
  manager_ = -1;
  view_.clear();
  for (int k = 0; k < nprocs_; ++k) view_[k] = PeerHealth::alive;
  bb_dead_.clear();
  teif_seen_.clear();
  seen_.clear();
  pending_.clear();
  recovering_ = false;
  ++g_mia_send_;
  ++g_taia_send_;
  ++g_mia_recv_;
  ++g_ia_clear_;
  for (auto& [p, g] : g_taia_recv_) ++g;
  for (auto& [p, g] : g_teif_) ++g;

  periodic(
      t_.ia_clear, g_ia_clear_,
      [this]() {
        if (auto* a = sim->named(node, "iat")) static_cast<IatGuard*>(a)->clear_flag();
      },
      true);
  (void)boot;
}

void BackboneComponent::on_start() {
  bool boot = !booted_;
  booted_ = true;
  reset(boot);
  if (boot && node == boot_manager_) {
    become_manager(false);
  } else if (boot) {
    become_assistant(boot_manager_);
  } else {
    // a restarted component rejoins as an assistant and waits for the
    // manager's heartbeat to learn who is in charge
    become_assistant(-1);
  }
}

void BackboneComponent::on_restart() { on_start(); }

void BackboneComponent::become_manager(bool announce) {
  role_ = Role::manager;
  manager_ = node;
  ++g_taia_send_;
  ++g_mia_recv_;
  sim->emit(node, name, "role", "manager");
  periodic(
      t_.mia_send, g_mia_send_, [this]() { broadcast(simnet::MiaMsg{node}); }, true);
  for (int k = 0; k < nprocs_; ++k)
    if (k != node && view_[k] == PeerHealth::alive && !bb_dead_.count(k)) arm_taia_deadline(k);
  if (announce) broadcast(simnet::AnnounceMsg{node});
}

void BackboneComponent::become_assistant(int mgr) {
  role_ = Role::assistant;
  manager_ = mgr;
  ++g_mia_send_;
  for (auto& [p, g] : g_taia_recv_) ++g;
  sim->emit(node, name, "role", "assistant");
  periodic(
      t_.taia_send, g_taia_send_, [this]() { broadcast(simnet::TaiaMsg{node}); }, true);
  if (manager_ >= 0) arm_mia_deadline();
}

void BackboneComponent::broadcast(Payload p) {
  for (int k = 0; k < nprocs_; ++k)
    if (k != node) sim->post(this, core::node_ref(k), p);
}

void BackboneComponent::arm_mia_deadline() {
  arm(t_.mia_recv, g_mia_recv_, [this]() { suspect(manager_); });
}

void BackboneComponent::arm_taia_deadline(int p) {
  arm(t_.taia_recv, g_taia_recv_[p], [this, p]() { suspect(p); });
}

void BackboneComponent::suspect(int p) {
  if (p < 0 || p == node) return;
  if (view_[p] != PeerHealth::alive) return;
  view_[p] = PeerHealth::suspected;
  ++suspicions_;
  sim->emit(node, name, "suspect", "node " + std::to_string(p));
  if (teif_seen_.count(p)) {
    verdict_component(p);
  } else {
    arm(t_.teif, g_teif_[p], [this, p]() { verdict_crash(p); });
  }
}

void BackboneComponent::verdict_component(int p) {
  teif_seen_.erase(p);
  view_[p] = PeerHealth::alive;
  bb_dead_.insert(p);
  ++g_teif_[p];
  ++g_taia_recv_[p];
  sim->emit(node, name, "verdict", "component crash, node " + std::to_string(p) + " stays");
  if (p == manager_ && role_ == Role::assistant) {
    manager_ = -1;
    election();
  }
  if (role_ == Role::manager) {
    core::Notification n;
    n.condition = core::cond_crash;
    n.subject_kind = core::Kind::node;
    n.subject = p;
    n.args = {1};
    raise_here(std::move(n));
  }
}

void BackboneComponent::verdict_crash(int p) {
  view_[p] = PeerHealth::removed;
  ++g_taia_recv_[p];
  sim->emit(node, name, "verdict", "crash node " + std::to_string(p));
  if (p == manager_) {
    manager_ = -1;
    election();
  }
  if (role_ == Role::manager) {
    core::Notification n;
    n.condition = core::cond_crash;
    n.subject_kind = core::Kind::node;
    n.subject = p;
    n.args = {0};
    raise_here(std::move(n));
  }
}

void BackboneComponent::election() {
  int winner = -1;
  for (int k = 0; k < nprocs_; ++k)
    if (view_[k] != PeerHealth::removed && !bb_dead_.count(k)) winner = k;
  sim->emit(node, name, "election", "winner node " + std::to_string(winner));
  if (winner == node) {
    become_manager(true);
  } else if (winner >= 0) {
    manager_ = winner;
    arm_mia_deadline();
  }
}

void BackboneComponent::readmit(int p) {
  view_[p] = PeerHealth::alive;
  sim->emit(node, name, "readmit", "node " + std::to_string(p));
  if (role_ == Role::manager) {
    auto log = std::make_shared<std::vector<core::Notification>>(replica_.log);
    sim->post(this, core::node_ref(p), simnet::SyncMsg{std::move(log)});
  }
}

void BackboneComponent::on_mia(int x) {
  bb_dead_.erase(x);
  if (view_[x] == PeerHealth::removed) readmit(x);
  view_[x] = PeerHealth::alive;
  ++g_teif_[x];
  if (role_ == Role::assistant) {
    if (x == manager_) {
      arm_mia_deadline();
    } else if (manager_ < 0 || view_[manager_] == PeerHealth::removed || x > manager_) {
      manager_ = x;
      sim->emit(node, name, "adopt", "manager node " + std::to_string(x));
      arm_mia_deadline();
    }
  } else if (x != node) {
    // two managers met; the one on the lower-labelled node steps down
    if (x > node) {
      sim->emit(node, name, "demote", "yielding to node " + std::to_string(x));
      become_assistant(x);
    }
  }
}

void BackboneComponent::on_taia(int x) {
  bb_dead_.erase(x);
  if (view_[x] == PeerHealth::removed) readmit(x);
  view_[x] = PeerHealth::alive;
  ++g_teif_[x];
  if (role_ == Role::manager && x != node) arm_taia_deadline(x);
}

void BackboneComponent::on_teif(int x) {
  teif_seen_[x] = sim->now();
  if (view_[x] == PeerHealth::suspected) verdict_component(x);
}

void BackboneComponent::on_announce(int x) {
  bb_dead_.erase(x);
  if (view_[x] == PeerHealth::removed) readmit(x);
  view_[x] = PeerHealth::alive;
  if (role_ == Role::manager) {
    if (x > node) {
      sim->emit(node, name, "demote", "yielding to node " + std::to_string(x));
      become_assistant(x);
    }
  } else if (x != manager_) {
    manager_ = x;
    sim->emit(node, name, "adopt", "manager node " + std::to_string(x));
    arm_mia_deadline();
  }
}

bool BackboneComponent::seen(const core::Notification& n) const {
  return seen_.count({n.condition, static_cast<int>(n.subject_kind), n.subject, n.label,
                      n.sim_time}) != 0;
}

void BackboneComponent::remember(const core::Notification& n) {
  seen_.insert(
      {n.condition, static_cast<int>(n.subject_kind), n.subject, n.label, n.sim_time});
}

void BackboneComponent::apply_note(const core::Notification& n, bool forward) {
  if (seen(n)) return;
  remember(n);
  auto out = core::raise_event(replica_, n);
  if (!out.ok)
    sim->emit(node, name, "reject", "notification: " + out.error);
  if (forward) broadcast(simnet::NotifyMsg{n});
  if (out.recovery_needed && role_ == Role::manager) {
    pending_.push_back(n);
    kick_recovery();
  }
}

void BackboneComponent::raise_here(core::Notification n) {
  core::EntityRef subject{n.subject_kind, n.subject};
  n.label = sim->next_label(n.condition, subject);
  n.sim_time = sim->now();
  sim->emit(node, name, "raise",
            "cond " + std::to_string(n.condition) + " " + core::kind_name(n.subject_kind) +
                " " + std::to_string(n.subject));
  apply_note(n, true);
}

void BackboneComponent::on_message(const simnet::Message& m) {
  int sender = m.from_node;
  if (sender >= 0 && sender != node && view_.count(sender) &&
      view_[sender] == PeerHealth::removed &&
      !std::holds_alternative<simnet::TeifMsg>(m.payload))
    readmit(sender);

  if (const auto* mia = std::get_if<simnet::MiaMsg>(&m.payload)) {
    on_mia(mia->manager);
  } else if (const auto* taia = std::get_if<simnet::TaiaMsg>(&m.payload)) {
    on_taia(taia->assistant);
  } else if (const auto* teif = std::get_if<simnet::TeifMsg>(&m.payload)) {
    on_teif(teif->about_node);
  } else if (const auto* ann = std::get_if<simnet::AnnounceMsg>(&m.payload)) {
    on_announce(ann->manager);
  } else if (const auto* nf = std::get_if<simnet::NotifyMsg>(&m.payload)) {
    // locally raised notes are forwarded to every peer replica
    apply_note(nf->note, sender == node);
  } else if (const auto* sy = std::get_if<simnet::SyncMsg>(&m.payload)) {
    size_t applied = 0;
    if (sy->log)
      for (const core::Notification& n : *sy->log)
        if (!seen(n)) {
          remember(n);
          core::raise_event(replica_, n);
          ++applied;
        }
    sim->emit(node, name, "sync",
              "applied " + std::to_string(applied) + " of " +
                  std::to_string(sy->log ? sy->log->size() : 0));
  } else if (const auto* am = std::get_if<simnet::ActionMsg>(&m.payload)) {
    apply_delta(am->act);
  }
}

void BackboneComponent::kick_recovery() {
  if (recovering_ || pending_.empty()) return;
  if (!strategy_ || strategy_->triplets.empty()) {
    pending_.clear();
    return;
  }
  recovering_ = true;
  ++recoveries_;
  const core::Notification& n = pending_.front();
  sim->emit(node, name, "recovery",
            "begin, cond " + std::to_string(n.condition) + " " +
                core::kind_name(n.subject_kind) + " " + std::to_string(n.subject));

  core::Database snapshot = replica_;
  rcode::ExecResult res = rcode::execute(*strategy_, snapshot);
  if (!res.ok) {
    sim->emit(node, name, "recovery", "interpreter error: " + res.error);
    after_recovery(0);
    return;
  }

  Ticks off = 0;
  for (const rcode::ActionRequest& act : res.actions) {
    if (act.verb == rcode::ActionRequest::Verb::pause) {
      off += act.value;
      continue;
    }
    rcode::ActionRequest copy = act;
    sim->after(off, [this, copy]() {
      if (down) return;
      apply_action(copy);
    });
  }
  after_recovery(off);
}

void BackboneComponent::after_recovery(Ticks off) {
  sim->after(off + 1, [this]() {
    if (down) return;
    recovering_ = false;
    if (!pending_.empty()) pending_.pop_front();
    sim->emit(node, name, "recovery", "end");
    kick_recovery();
  });
}

void BackboneComponent::apply_action(const rcode::ActionRequest& act) {
  using Verb = rcode::ActionRequest::Verb;
  sim->emit(node, name, "action", rcode::verb_name(act.verb));
  switch (act.verb) {
    case Verb::send:
      for (const core::EntityRef& t : act.targets)
        sim->post(this, t, simnet::ValueMsg{act.value});
      return;
    case Verb::warn: {
      if (act.warn_backbone) {
        core::Notification n;
        n.condition = core::cond_error;
        if (act.about) {
          n.subject_kind = act.about->kind;
          n.subject = act.about->id;
        } else {
          n.subject_kind = core::Kind::node;
          n.subject = node;
        }
        n.args.push_back(static_cast<int>(act.value));
        for (long long a : act.args) n.args.push_back(static_cast<int>(a));
        raise_here(std::move(n));
      } else {
        for (const core::EntityRef& t : act.targets)
          sim->post(this, t, simnet::ValueMsg{act.value});
      }
      return;
    }
    case Verb::call:
      sim->emit(node, name, "call", "routine " + std::to_string(act.value));
      return;
    case Verb::pause:
      return;  // consumed as an offset by the scheduler
    default:
      break;
  }

  // physical part of the state-changing verbs
  for (const core::EntityRef& ref : act.targets) {
    for (const core::EntityRef& e : replica_.expand(ref)) {
      if (e.kind == core::Kind::task) {
        switch (act.verb) {
          case Verb::stop: sim->stop_task(e.id); break;
          case Verb::start: sim->start_task(e.id); break;
          case Verb::restart: sim->restart_task(e.id); break;
          case Verb::isolate: sim->isolate_task(e.id); break;
          case Verb::enable: sim->enable_task(e.id); break;
          case Verb::reboot: {
            if (simnet::Actor* a = sim->by_uid(e.id)) sim->reboot_node(a->node);
            break;
          }
          default: break;
        }
      } else if (e.kind == core::Kind::node) {
        switch (act.verb) {
          case Verb::isolate: sim->isolate_node(e.id); break;
          case Verb::enable: sim->enable_node(e.id); break;
          case Verb::reboot: sim->reboot_node(e.id); break;
          default: break;
        }
      }
    }
  }

  apply_delta(act);
  for (int k = 0; k < nprocs_; ++k)
    if (k != node) sim->post(this, core::node_ref(k), simnet::ActionMsg{act});
}

void BackboneComponent::apply_delta(const rcode::ActionRequest& act) {
  using Verb = rcode::ActionRequest::Verb;
  if (act.verb == Verb::remove) {
    for (const core::EntityRef& ref : act.targets)
      core::db_remove(replica_, act.selector, ref);
    return;
  }
  for (const core::EntityRef& ref : act.targets) {
    for (const core::EntityRef& e : replica_.expand(ref)) {
      if (!replica_.exists(e)) continue;
      core::EntityState& st = replica_.state(e);
      switch (act.verb) {
        case Verb::stop:
          st.running = false;
          st.started = false;
          break;
        case Verb::start:
          st.started = true;
          st.running = true;
          break;
        case Verb::restart:
          ++st.restart_count;
          st.running = true;
          st.started = true;
          break;
        case Verb::isolate:
          st.isolated = true;
          break;
        case Verb::enable:
          st.isolated = false;
          st.reintegrated = true;
          break;
        case Verb::reboot:
          ++st.reboot_count;
          break;
        default:
          break;
      }
    }
  }
}

PeerHealth BackboneComponent::peer(int n) const {
  auto it = view_.find(n);
  return it == view_.end() ? PeerHealth::removed : it->second;
}

}  // namespace backbone
