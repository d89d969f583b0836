#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>

#include "rcode/vm.h"
#include "simnet/sim.h"

namespace backbone {

using simnet::Ticks;

// All values in ticks (microseconds). The defaults apply when a script
// leaves a deadline unset.
struct AmsTimeouts {
  Ticks mia_send = 800000;
  Ticks taia_recv = 1500000;
  Ticks mia_recv = 1500000;
  Ticks taia_send = 1000000;
  Ticks teif = 1800000;
  Ticks ia_clear = 900000;
  Ticks ia_set = 1400000;

  static AmsTimeouts from_config(const std::map<std::string, long long>& timeouts);
};

enum class Role { manager, assistant };
enum class PeerHealth { alive, suspected, removed };

// Stuck-component guard. The local backbone component clears the flag on its
// own schedule; a check that finds the flag still set broadcasts a TEIF so
// peers can tell a dead component from a dead node.
class IatGuard : public simnet::Actor {
 public:
  IatGuard(int node_, int nprocs, Ticks ia_set);
  void on_start() override;
  void clear_flag() { flag_ = false; }
  bool flag() const { return flag_; }

 private:
  int nprocs_;
  Ticks ia_set_;
  bool flag_ = false;
  int gen_ = 0;
};

// One backbone component per node: replica holder, membership monitor and,
// on the manager, the recovery interpreter.
class BackboneComponent : public simnet::Actor {
 public:
  BackboneComponent(int node_, int nprocs, core::Database boot_db, AmsTimeouts t,
                    std::shared_ptr<const rcode::Program> strategy, int boot_manager);

  void on_start() override;
  void on_restart() override;
  void on_message(const simnet::Message& m) override;

  Role role() const { return role_; }
  int manager_node() const { return manager_; }
  PeerHealth peer(int n) const;
  const core::Database& replica() const { return replica_; }
  int suspicions() const { return suspicions_; }
  int recoveries() const { return recoveries_; }

 private:
  void reset(bool boot);
  void become_manager(bool announce);
  void become_assistant(int mgr);
  void broadcast(simnet::Payload p);

  void arm_mia_deadline();
  void arm_taia_deadline(int p);
  void suspect(int p);
  void verdict_component(int p);
  void verdict_crash(int p);
  void election();
  void readmit(int p);

  void on_mia(int x);
  void on_taia(int x);
  void on_teif(int x);
  void on_announce(int x);
  void apply_note(const core::Notification& n, bool forward);
  void raise_here(core::Notification n);
  bool seen(const core::Notification& n) const;
  void remember(const core::Notification& n);

  void kick_recovery();
  void after_recovery(Ticks off);
  void apply_action(const rcode::ActionRequest& act);
  void apply_delta(const rcode::ActionRequest& act);

  int nprocs_;
  core::Database boot_db_;
  core::Database replica_;
  AmsTimeouts t_;
  std::shared_ptr<const rcode::Program> strategy_;
  int boot_manager_;
  bool booted_ = false;

  Role role_ = Role::assistant;
  int manager_ = -1;
  std::map<int, PeerHealth> view_;
  std::set<int> bb_dead_;            // peers whose component died, node still up
  std::map<int, Ticks> teif_seen_;   // unconsumed stuck reports

  std::set<std::tuple<int, int, int, long long, long long>> seen_;
  std::deque<core::Notification> pending_;
  bool recovering_ = false;

  int suspicions_ = 0;
  int recoveries_ = 0;

  int g_mia_send_ = 0;
  int g_taia_send_ = 0;
  int g_mia_recv_ = 0;
  int g_ia_clear_ = 0;
  std::map<int, int> g_taia_recv_;
  std::map<int, int> g_teif_;
};

}  // namespace backbone
