#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ariel/compile.h"
#include "backbone/backbone.h"
#include "simnet/actors.h"
#include "simnet/sim.h"
#include "voting/voting.h"

namespace runner {

// Knobs the script language does not carry; fixtures set them in code.
struct Options {
  long long wakeup_value = 10;
  simnet::Ticks round_period = 2000000;

  // tasks that emit heartbeats toward a watchdog or a logical of watchdogs
  struct Pulse {
    int task = -1;
    core::EntityRef target;
    simnet::Ticks period = 0;
  };
  std::vector<Pulse> pulses;

  simnet::Sim::Options sim;
};

// A wired simulation: backbone pair per node, one actor per declared task,
// faults scheduled from the script's INJECT statements.
struct World {
  ariel::ConfigBundle bundle;
  std::shared_ptr<const rcode::Program> program;
  std::unique_ptr<simnet::Sim> sim;

  std::vector<backbone::BackboneComponent*> bbs;
  std::map<int, simnet::SinkTask*> sinks;
  std::map<int, simnet::WatchdogActor*> watchdogs;
  std::map<int, voting::VoterActor*> voters;
  std::map<int, voting::DriverActor*> drivers;

  backbone::BackboneComponent* manager() const;
};

World assemble(const ariel::ConfigBundle& bundle, const rcode::Program& program,
               const simnet::Scenario& scenario, const Options& opt = {});

struct RunResult {
  bool ok = false;
  std::string error;
  std::string trace;
};

// compile + assemble + run to the scenario horizon; the CLI entry point
RunResult run_script(const std::string& script_text, const std::string& script_name,
                     const std::string& scenario_text, const ariel::FileLoader& loader,
                     const Options& opt = {});

}  // namespace runner
