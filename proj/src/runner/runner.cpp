#include "runner/runner.h"

#include <algorithm>
#include <set>

#include "rcode/ops.h"

namespace runner {

backbone::BackboneComponent* World::manager() const {
  for (auto* bb : bbs)
    if (!bb->down && bb->role() == backbone::Role::manager) return bb;
  return nullptr;
}

namespace {

int node_of_task(const ariel::ConfigBundle& bundle, int uid, int fallback = 0) {
  for (const auto& t : bundle.tasks)
    if (t.unique_id == uid) return t.node;
  return fallback;
}

simnet::WatchdogSpec watchdog_spec(const ariel::WatchdogStmt& w) {
  simnet::WatchdogSpec s;
  s.task = w.task;
  s.watches = w.watches;
  s.period = w.period_ticks;
  s.warn_task = w.warn_task;
  switch (w.on_error) {
    case ariel::WatchdogStmt::OnError::warn_task:
      s.on_error = simnet::WatchdogSpec::OnError::warn_task;
      break;
    case ariel::WatchdogStmt::OnError::warn_backbone:
      s.on_error = simnet::WatchdogSpec::OnError::warn_backbone;
      break;
    case ariel::WatchdogStmt::OnError::reboot:
      s.on_error = simnet::WatchdogSpec::OnError::reboot;
      break;
    case ariel::WatchdogStmt::OnError::restart:
      s.on_error = simnet::WatchdogSpec::OnError::restart;
      break;
  }
  return s;
}

voting::SessionConfig session_config(const ariel::NVersionStmt& nv, const Options& opt) {
  voting::SessionConfig cfg;
  cfg.driver = nv.task;
  cfg.on_error = nv.on_error_task;
  cfg.on_success = nv.on_success_task;
  cfg.spec.algorithm = voting::algorithm_by_name(nv.algorithm.empty() ? "majority" : nv.algorithm);
  cfg.spec.metric = voting::metric_by_name(nv.metric);
  cfg.wakeup_value = opt.wakeup_value;
  cfg.round_period = opt.round_period;
  for (const ariel::VersionDecl& v : nv.versions) {
    voting::SessionConfig::Member m;
    m.rank = v.rank;
    m.uid = v.task;
    m.spare = v.spare;
    if (v.timeout_ticks > 0) m.timeout = v.timeout_ticks;
    cfg.members.push_back(m);
  }
  std::sort(cfg.members.begin(), cfg.members.end(),
            [](const auto& a, const auto& b) { return a.rank < b.rank; });
  voting::validate_session(cfg);
  return cfg;
}

}  // namespace

World assemble(const ariel::ConfigBundle& bundle, const rcode::Program& program,
               const simnet::Scenario& scenario, const Options& opt) {
  World w;
  w.bundle = bundle;
  w.program = std::make_shared<rcode::Program>(program);
  w.sim = std::make_unique<simnet::Sim>(scenario, opt.sim);
  simnet::Sim& sim = *w.sim;

  for (const auto& g : bundle.groups) sim.register_group(g.unique_id, g.members);

  int boot_manager = 0;
  for (const auto& [n, role] : bundle.roles)
    if (role == rcode::role_manager) {
      boot_manager = n;
      break;
    }

  auto t = backbone::AmsTimeouts::from_config(bundle.timeouts);
  core::Database boot_db = bundle.to_database();

  for (int n = 0; n < bundle.nprocs; ++n) {
    auto* bb = static_cast<backbone::BackboneComponent*>(sim.add(
        std::make_unique<backbone::BackboneComponent>(n, bundle.nprocs, boot_db, t, w.program,
                                                      boot_manager)));
    w.bbs.push_back(bb);
    sim.add(std::make_unique<backbone::IatGuard>(n, bundle.nprocs, t.ia_set));
  }

  std::set<int> claimed;
  for (const ariel::WatchdogStmt& wd : bundle.watchdogs) {
    claimed.insert(wd.task);
    auto* a = static_cast<simnet::WatchdogActor*>(sim.add(std::make_unique<simnet::WatchdogActor>(
        node_of_task(bundle, wd.task), watchdog_spec(wd))));
    w.watchdogs[wd.task] = a;
  }

  for (const ariel::NVersionStmt& nv : bundle.nversions) {
    auto cfg = std::make_shared<voting::SessionConfig>(session_config(nv, opt));
    claimed.insert(nv.task);
    auto* d = static_cast<voting::DriverActor*>(
        sim.add(std::make_unique<voting::DriverActor>(node_of_task(bundle, nv.task), cfg)));
    w.drivers[nv.task] = d;
    for (const voting::SessionConfig::Member& m : cfg->members) {
      claimed.insert(m.uid);
      auto* v = static_cast<voting::VoterActor*>(sim.add(
          std::make_unique<voting::VoterActor>(node_of_task(bundle, m.uid), cfg, m)));
      w.voters[m.uid] = v;
    }
  }

  for (const Options::Pulse& p : opt.pulses) {
    claimed.insert(p.task);
    sim.add(std::make_unique<simnet::PulseTask>(node_of_task(bundle, p.task), p.task, p.target,
                                                p.period));
  }

  for (const core::TaskDescriptor& td : bundle.tasks) {
    if (claimed.count(td.unique_id)) continue;
    auto* s = static_cast<simnet::SinkTask*>(
        sim.add(std::make_unique<simnet::SinkTask>(td.node, td.unique_id)));
    w.sinks[td.unique_id] = s;
  }

  for (const ariel::InjectStmt& inj : bundle.injections) {
    simnet::Sim* s = &sim;
    if (inj.on_node) {
      int n = inj.id;
      if (inj.mfault) {
        std::vector<int> uids;
        for (const auto& td : bundle.tasks)
          if (td.node == n) uids.push_back(td.unique_id);
        sim.at(inj.after_ticks, [s, uids]() {
          for (int uid : uids) s->corrupt_task(uid);
        });
      } else {
        sim.at(inj.after_ticks, [s, n]() { s->crash_node(n); });
      }
    } else {
      int uid = inj.id;
      if (inj.mfault)
        sim.at(inj.after_ticks, [s, uid]() { s->corrupt_task(uid); });
      else
        sim.at(inj.after_ticks, [s, uid]() { s->crash_task(uid); });
    }
  }

  sim.start_all();
  return w;
}

RunResult run_script(const std::string& script_text, const std::string& script_name,
                     const std::string& scenario_text, const ariel::FileLoader& loader,
                     const Options& opt) {
  RunResult out;
  ariel::CompileOptions copt;
  ariel::CompileResult cr = ariel::compile_source(script_text, script_name, copt, loader);
  if (!cr.ok) {
    out.error = "compilation rejected:\n" + cr.transcript;
    return out;
  }
  simnet::ScenarioParse sp = simnet::parse_scenario(scenario_text);
  if (!sp.ok) {
    out.error = sp.error;
    return out;
  }
  World w = assemble(cr.config, cr.program, sp.scenario, opt);
  w.sim->run();
  out.ok = true;
  out.trace = w.sim->trace_text();
  return out;
}

}  // namespace runner
