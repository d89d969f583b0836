#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/database.h"
#include "rcode/ops.h"

namespace rcode {

// One requested effect. The interpreter never touches the database itself;
// every verb is handed to the caller through the sink and the returned log.
struct ActionRequest {
  enum class Verb { stop, start, restart, isolate, enable, reboot, warn, send, remove, call, pause };

  Verb verb = Verb::stop;
  std::vector<core::EntityRef> targets;  // empty for call, pause, warn to backbone
  long long value = 0;                   // send payload, pause ticks, call routine, warn error number
  core::RemoveSel selector = core::RemoveSel::phase;
  std::vector<long long> args;                // call / warn argument list
  bool warn_backbone = false;                 // warn addressed to the backbone itself
  std::optional<core::EntityRef> about;       // warn: the entity the error is charged to
};

const char* verb_name(ActionRequest::Verb v);

using ActionSink = std::function<void(const ActionRequest&)>;

struct ExecResult {
  bool ok = false;
  std::string error;   // empty when ok; otherwise names the failure
  int error_pc = -1;   // triplet index where execution aborted
  std::vector<ActionRequest> actions;
  std::vector<std::string> trace;  // one line per executed triplet
};

// Runs the program against a snapshot. Guard evaluation reads the database,
// branch bodies only emit ActionRequests; identical snapshots yield identical
// logs. Halts at (STOP,-1,-1).
ExecResult execute(const Program& p, const core::Database& db, const ActionSink& sink = {});

}  // namespace rcode
