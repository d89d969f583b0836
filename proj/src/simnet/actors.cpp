#include "simnet/actors.h"

namespace simnet {

void raise_local(Actor& from, core::Notification n) {
  core::EntityRef subject{n.subject_kind, n.subject};
  n.label = from.sim->next_label(n.condition, subject);
  n.sim_time = from.sim->now();
  from.sim->post_node(&from, from.node, "bb", NotifyMsg{std::move(n)});
}

PulseTask::PulseTask(int node_, int uid_, core::EntityRef target_, Ticks period_)
    : target(target_), period(period_) {
  node = node_;
  uid = uid_;
  name = "pulse" + std::to_string(uid_);
}

void PulseTask::on_start() {
  periodic(
      period, gen_, [this]() { sim->post(this, target, Heartbeat{uid}); }, true);
}

SinkTask::SinkTask(int node_, int uid_) {
  node = node_;
  uid = uid_;
  name = "task" + std::to_string(uid_);
}

void SinkTask::on_message(const Message& m) {
  if (const auto* v = std::get_if<ValueMsg>(&m.payload))
    received.emplace_back(sim->now(), v->value);
}

bool SinkTask::got(long long value) const {
  for (const auto& [t, v] : received)
    if (v == value) return true;
  return false;
}

WatchdogActor::WatchdogActor(int node_, WatchdogSpec spec_) : spec(spec_) {
  node = node_;
  uid = spec.task;
  name = "wd" + std::to_string(spec.task);
}

void WatchdogActor::on_start() {
  last_heartbeat_ = sim->now();
  latched_ = false;
  arm(spec.period + 1, gen_, [this]() { expire(); });
}

void WatchdogActor::on_message(const Message& m) {
  if (!std::holds_alternative<Heartbeat>(m.payload)) return;
  last_heartbeat_ = sim->now();
  if (latched_) {
    latched_ = false;
    sim->emit(node, name, "rearm", "heartbeat after expiry");
  }
  arm(spec.period + 1, gen_, [this]() { expire(); });
}

void WatchdogActor::expire() {
  latched_ = true;
  ++expired_count;
  int subject = spec.watches.value_or(spec.task);
  sim->emit(node, name, "expire",
            "no heartbeat for " + std::to_string(spec.period) + ", subject task " +
                std::to_string(subject));

  core::Notification phase;
  phase.condition = core::cond_phase_report;
  phase.subject_kind = core::Kind::task;
  phase.subject = spec.task;
  phase.args = {expire_phase};
  raise_local(*this, phase);

  switch (spec.on_error) {
    case WatchdogSpec::OnError::warn_backbone: {
      core::Notification err;
      err.condition = core::cond_missed_deadline;
      err.subject_kind = core::Kind::task;
      err.subject = subject;
      err.args = {static_cast<int>(spec.period)};
      raise_local(*this, err);
      break;
    }
    case WatchdogSpec::OnError::warn_task:
      sim->post(this, core::task_ref(spec.warn_task), ValueMsg{subject});
      break;
    case WatchdogSpec::OnError::reboot: {
      Actor* t = sim->by_uid(subject);
      sim->reboot_node(t ? t->node : node);
      break;
    }
    case WatchdogSpec::OnError::restart:
      sim->restart_task(subject);
      break;
  }
}

}  // namespace simnet
