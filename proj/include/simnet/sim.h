#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "core/database.h"
#include "rcode/vm.h"

namespace simnet {

using Ticks = long long;

// A cut between two node sets, active over [from, to). Messages whose send
// or delivery falls inside the window are dropped when endpoints straddle it.
struct Partition {
  Ticks from = 0;
  Ticks to = 0;
  std::set<int> left;
  std::set<int> right;

  bool active(Ticks t) const { return t >= from && t < to; }
  bool cuts(int a, int b) const;
};

struct LinkModel {
  Ticks delay_base = 1000;
  Ticks jitter = 500;  // uniform in [-jitter, +jitter], delivery stays >= send + 1
  double omission_p = 0.0;
  std::vector<Partition> partitions;
};

struct Scenario {
  uint64_t seed = 1;
  Ticks until = 0;
  LinkModel link;
  std::vector<std::pair<int, Ticks>> restarts;  // node id, time
};

struct ScenarioParse {
  bool ok = false;
  std::string error;
  Scenario scenario;
};

// Line-based format: seed N / until T / delay BASE JITTER / omission P /
// partition T0 T1 a,b|c,d / restart node N at T.  '#' starts a comment.
ScenarioParse parse_scenario(const std::string& text);

// ---- message payloads ----------------------------------------------------

struct ValueMsg {
  long long value = 0;
};
struct Heartbeat {
  int from_task = -1;
};
struct MiaMsg {
  int manager = -1;
};
struct TaiaMsg {
  int assistant = -1;
};
struct TeifMsg {
  int about_node = -1;  // the guarded component on this node is stuck
};
struct NotifyMsg {
  core::Notification note;
};
struct AnnounceMsg {
  int manager = -1;
};
struct SyncMsg {
  std::shared_ptr<std::vector<core::Notification>> log;
};
struct ActionMsg {
  rcode::ActionRequest act;
};
struct RoundMsg {
  long long round = 0;
  long long input = 0;
};
struct VoteMsg {
  long long round = 0;
  int rank = -1;
  long long value = 0;
};
struct AckMsg {
  int from_task = -1;
  int rank = -1;
};

using Payload = std::variant<ValueMsg, Heartbeat, MiaMsg, TaiaMsg, TeifMsg, NotifyMsg,
                             AnnounceMsg, SyncMsg, ActionMsg, RoundMsg, VoteMsg, AckMsg>;

std::string payload_text(const Payload& p);

struct Message {
  int from_node = -1;
  int from_task = -1;  // -1 for infrastructure senders
  Payload payload;
};

class Sim;

// ---- actor base ----------------------------------------------------------

struct Actor {
  Sim* sim = nullptr;
  int node = 0;
  std::string name;  // unique per node
  int uid = -1;      // task unique-id, -1 for infrastructure actors
  bool down = false;
  bool corrupt_next = false;  // a value fault is pending on the next output

  virtual ~Actor() = default;
  virtual void on_start() {}
  virtual void on_message(const Message& m) { (void)m; }
  virtual void on_crash() {}
  virtual void on_restart() { on_start(); }

  // One-shot timer tied to a generation slot; bumping the slot or taking the
  // actor down cancels the pending fire.
  void arm(Ticks local_delay, int& gen, std::function<void()> fn);
  // Repeating timer on the same cancellation rule.
  void periodic(Ticks local_period, int& gen, std::function<void()> body, bool immediate);

 private:
  std::vector<std::shared_ptr<std::function<void()>>> keepers_;
};

// ---- the simulator -------------------------------------------------------

class Sim {
 public:
  struct Options {
    Ticks reboot_delay = 50000;
  };

  explicit Sim(const Scenario& sc);
  Sim(const Scenario& sc, Options opt);

  Ticks now() const { return now_; }
  const Scenario& scenario() const { return sc_; }
  uint64_t rand();

  void at(Ticks t, std::function<void()> fn);
  void after(Ticks delay, std::function<void()> fn);
  void run_until(Ticks t);
  void run();  // until scenario.until

  Actor* add(std::unique_ptr<Actor> a);
  void start_all();  // on_start in registration order, then scenario restarts
  Actor* by_uid(int uid) const;
  Actor* named(int node, const std::string& name) const;
  void register_group(int gid, std::vector<int> members);
  const std::vector<int>* group(int gid) const;

  // messaging; 'from' may be null for scenario-level sends
  void post(const Actor* from, core::EntityRef to, Payload p);
  void post_node(const Actor* from, int to_node, const std::string& actor, Payload p);

  // ground truth
  void crash_node(int n);
  void restart_node(int n);
  void reboot_node(int n);
  void crash_actor(int node, const std::string& name);
  void restart_actor(int node, const std::string& name);
  void crash_task(int uid);
  void stop_task(int uid);
  void start_task(int uid);
  void restart_task(int uid);
  void isolate_task(int uid);
  void enable_task(int uid);
  void isolate_node(int n);
  void enable_node(int n);
  void corrupt_task(int uid);

  bool node_crashed(int n) const { return crashed_nodes_.count(n) != 0; }
  bool node_isolated(int n) const { return isolated_nodes_.count(n) != 0; }
  bool task_isolated(int uid) const { return isolated_tasks_.count(uid) != 0; }

  // test hook: silently drop task-to-task messages for the given pair
  void mute(int from_uid, int to_uid);
  void unmute(int from_uid, int to_uid);

  void set_drift(int n, double factor);
  double drift(int n) const;
  Ticks local_to_global(int n, Ticks local) const;

  // detector sequence numbers, strictly increasing per (condition, subject)
  long long next_label(int condition, core::EntityRef subject);

  void emit(int node, const std::string& actor, const std::string& event,
            const std::string& details);
  const std::vector<std::string>& trace() const { return trace_; }
  std::string trace_text() const;

  // deliveries seen per actor name, for assertions
  long long delivered_count(int node, const std::string& actor) const;

 private:
  friend struct Actor;

  bool cut(int a, int b, Ticks t) const;
  Ticks link_arrival(int from_node, int to_node);
  void deliver(Actor* target, Message m);

  Scenario sc_;
  Options opt_;
  Ticks now_ = 0;
  uint64_t seq_ = 0;
  std::mt19937_64 rng_;
  std::map<std::pair<Ticks, uint64_t>, std::function<void()>> events_;

  std::vector<std::unique_ptr<Actor>> actors_;
  std::map<int, Actor*> by_uid_;
  std::map<std::pair<int, std::string>, Actor*> named_;
  std::map<int, std::vector<int>> groups_;

  std::set<int> crashed_nodes_;
  std::set<int> isolated_nodes_;
  std::set<int> isolated_tasks_;
  std::set<std::pair<int, int>> muted_;
  // sessions keep each directed node pair in FIFO order despite jitter
  std::map<std::pair<int, int>, Ticks> fifo_last_;
  std::map<int, double> drift_;
  std::map<std::pair<int, std::pair<int, int>>, long long> labels_;
  std::map<std::pair<int, std::string>, long long> delivered_;

  std::vector<std::string> trace_;
};

}  // namespace simnet
