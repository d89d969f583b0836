#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "simnet/sim.h"

namespace simnet {

// phase a watchdog reports for itself when its deadline passes
inline constexpr int expire_phase = 5000;

// Stamps detector bookkeeping on the note and hands it to the node's
// backbone component, when one exists.
void raise_local(Actor& from, core::Notification n);

// Emits a heartbeat to a fixed target every period.
struct PulseTask : Actor {
  core::EntityRef target;
  Ticks period = 0;

  PulseTask(int node_, int uid_, core::EntityRef target_, Ticks period_);
  void on_start() override;

 private:
  int gen_ = 0;
};

// Records every plain value it receives; used for ON SUCCESS / ON ERROR
// endpoints and alarm targets.
struct SinkTask : Actor {
  std::vector<std::pair<Ticks, long long>> received;

  SinkTask(int node_, int uid_);
  void on_message(const Message& m) override;
  bool got(long long value) const;
};

struct WatchdogSpec {
  int task = -1;
  std::optional<int> watches;
  Ticks period = 0;
  enum class OnError { warn_task, warn_backbone, reboot, restart };
  OnError on_error = OnError::warn_backbone;
  int warn_task = -1;
};

// Deadline guard. A heartbeat re-arms the deadline; silence past the period
// latches an expiry, reports the EXPIRE phase and performs the ON ERROR
// action. The next heartbeat un-latches.
struct WatchdogActor : Actor {
  WatchdogSpec spec;
  int expired_count = 0;

  WatchdogActor(int node_, WatchdogSpec spec_);
  void on_start() override;
  void on_message(const Message& m) override;

 private:
  void expire();

  Ticks last_heartbeat_ = 0;
  bool latched_ = false;
  int gen_ = 0;
};

}  // namespace simnet
