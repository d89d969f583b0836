#include "simnet/sim.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace simnet {

bool Partition::cuts(int a, int b) const {
  return (left.count(a) && right.count(b)) || (left.count(b) && right.count(a));
}

ScenarioParse parse_scenario(const std::string& text) {
  ScenarioParse out;
  Scenario sc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    auto bad = [&](const std::string& why) {
      out.error = "scenario line " + std::to_string(lineno) + ": " + why;
      return out;
    };
    if (word == "seed") {
      if (!(ls >> sc.seed)) return bad("seed wants an unsigned value");
    } else if (word == "until") {
      if (!(ls >> sc.until) || sc.until < 0) return bad("until wants a tick count");
    } else if (word == "delay") {
      if (!(ls >> sc.link.delay_base >> sc.link.jitter) || sc.link.delay_base < 1 ||
          sc.link.jitter < 0 || sc.link.jitter >= sc.link.delay_base)
        return bad("delay wants BASE JITTER with 0 <= jitter < base");
    } else if (word == "omission") {
      if (!(ls >> sc.link.omission_p) || sc.link.omission_p < 0.0 || sc.link.omission_p > 1.0)
        return bad("omission wants a probability");
    } else if (word == "partition") {
      Partition p;
      std::string sets;
      if (!(ls >> p.from >> p.to >> sets) || p.from < 0 || p.to <= p.from)
        return bad("partition wants T0 T1 a,b|c,d");
      auto bar = sets.find('|');
      if (bar == std::string::npos) return bad("partition sets need a '|'");
      auto parse_set = [](const std::string& s, std::set<int>& into) {
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) into.insert(std::stoi(item));
        }
      };
      parse_set(sets.substr(0, bar), p.left);
      parse_set(sets.substr(bar + 1), p.right);
      if (p.left.empty() || p.right.empty()) return bad("partition sets must be non-empty");
      sc.link.partitions.push_back(std::move(p));
    } else if (word == "restart") {
      std::string kw1, kw2;
      int n;
      Ticks t;
      if (!(ls >> kw1 >> n >> kw2 >> t) || kw1 != "node" || kw2 != "at" || t < 0)
        return bad("restart wants: node N at T");
      sc.restarts.emplace_back(n, t);
    } else {
      return bad("unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) return bad("trailing junk '" + extra + "'");
  }
  out.ok = true;
  out.scenario = std::move(sc);
  return out;
}

std::string payload_text(const Payload& p) {
  struct V {
    std::string operator()(const ValueMsg& m) const { return "value " + std::to_string(m.value); }
    std::string operator()(const Heartbeat& m) const {
      return "heartbeat from " + std::to_string(m.from_task);
    }
    std::string operator()(const MiaMsg& m) const { return "mia " + std::to_string(m.manager); }
    std::string operator()(const TaiaMsg& m) const {
      return "taia " + std::to_string(m.assistant);
    }
    std::string operator()(const TeifMsg& m) const {
      return "teif node " + std::to_string(m.about_node);
    }
    std::string operator()(const NotifyMsg& m) const {
      return "notify cond " + std::to_string(m.note.condition) + " " +
             core::kind_name(m.note.subject_kind) + " " + std::to_string(m.note.subject);
    }
    std::string operator()(const AnnounceMsg& m) const {
      return "announce " + std::to_string(m.manager);
    }
    std::string operator()(const SyncMsg& m) const {
      return "sync " + std::to_string(m.log ? m.log->size() : 0) + " notes";
    }
    std::string operator()(const ActionMsg& m) const {
      return std::string("action ") + rcode::verb_name(m.act.verb);
    }
    std::string operator()(const RoundMsg& m) const {
      return "round " + std::to_string(m.round) + " input " + std::to_string(m.input);
    }
    std::string operator()(const VoteMsg& m) const {
      return "vote r" + std::to_string(m.round) + " rank " + std::to_string(m.rank) + " = " +
             std::to_string(m.value);
    }
    std::string operator()(const AckMsg& m) const {
      return "ack " + std::to_string(m.from_task) + " rank " + std::to_string(m.rank);
    }
  };
  return std::visit(V{}, p);
}

void Actor::arm(Ticks local_delay, int& gen, std::function<void()> fn) {
  int g = ++gen;
  int* slot = &gen;
  sim->after(sim->local_to_global(node, local_delay),
             [this, g, slot, fn = std::move(fn)]() {
               if (down || g != *slot) return;
               fn();
             });
}

void Actor::periodic(Ticks local_period, int& gen, std::function<void()> body, bool immediate) {
  int g = ++gen;
  int* slot = &gen;
  auto keeper = std::make_shared<std::function<void()>>();
  auto* raw = keeper.get();
  *keeper = [this, g, slot, local_period, body = std::move(body), raw]() {
    if (down || g != *slot) return;
    body();
    if (down || g != *slot) return;
    sim->after(sim->local_to_global(node, local_period), *raw);
  };
  keepers_.push_back(keeper);
  if (immediate)
    sim->after(0, *raw);
  else
    sim->after(sim->local_to_global(node, local_period), *raw);
}

Sim::Sim(const Scenario& sc) : Sim(sc, Options()) {}

Sim::Sim(const Scenario& sc, Options opt) : sc_(sc), opt_(opt), rng_(sc.seed) {}

uint64_t Sim::rand() { return rng_(); }

void Sim::at(Ticks t, std::function<void()> fn) {
  if (t < now_) t = now_;
  events_.emplace(std::make_pair(t, seq_++), std::move(fn));
}

void Sim::after(Ticks delay, std::function<void()> fn) {
  if (delay < 0) delay = 0;
  at(now_ + delay, std::move(fn));
}

void Sim::run_until(Ticks t) {
  while (!events_.empty() && events_.begin()->first.first <= t) {
    auto it = events_.begin();
    now_ = it->first.first;
    auto fn = std::move(it->second);
    events_.erase(it);
    fn();
  }
  if (now_ < t) now_ = t;
}

void Sim::run() { run_until(sc_.until); }

Actor* Sim::add(std::unique_ptr<Actor> a) {
  a->sim = this;
  Actor* raw = a.get();
  actors_.push_back(std::move(a));
  if (raw->uid >= 0) by_uid_[raw->uid] = raw;
  named_[{raw->node, raw->name}] = raw;
  return raw;
}

void Sim::start_all() {
  for (auto& a : actors_)
    if (!a->down) a->on_start();
  for (auto& [n, t] : sc_.restarts) {
    int node = n;
    at(t, [this, node]() { restart_node(node); });
  }
}

Actor* Sim::by_uid(int uid) const {
  auto it = by_uid_.find(uid);
  return it == by_uid_.end() ? nullptr : it->second;
}

Actor* Sim::named(int node, const std::string& name) const {
  auto it = named_.find({node, name});
  return it == named_.end() ? nullptr : it->second;
}

void Sim::register_group(int gid, std::vector<int> members) {
  groups_[gid] = std::move(members);
}

const std::vector<int>* Sim::group(int gid) const {
  auto it = groups_.find(gid);
  return it == groups_.end() ? nullptr : &it->second;
}

bool Sim::cut(int a, int b, Ticks t) const {
  for (const Partition& p : sc_.link.partitions)
    if (p.active(t) && p.cuts(a, b)) return true;
  return false;
}

void Sim::deliver(Actor* target, Message m) {
  if (target->down) return;
  if (node_crashed(target->node)) return;
  if (node_isolated(target->node)) return;
  if (target->uid >= 0 && task_isolated(target->uid)) return;
  emit(target->node, target->name, "deliver", payload_text(m.payload));
  delivered_[{target->node, target->name}]++;
  target->on_message(m);
}

Ticks Sim::link_arrival(int from_node, int to_node) {
  Ticks delay = sc_.link.delay_base;
  if (sc_.link.jitter > 0)
    delay += static_cast<Ticks>(rand() % (2 * sc_.link.jitter + 1)) - sc_.link.jitter;
  if (delay < 1) delay = 1;
  Ticks arrive = now_ + delay;
  Ticks& last = fifo_last_[{from_node, to_node}];
  if (arrive <= last) arrive = last + 1;
  last = arrive;
  return arrive;
}

void Sim::post(const Actor* from, core::EntityRef to, Payload p) {
  int from_node = from ? from->node : -1;
  int from_task = from ? from->uid : -1;
  if (from && from->down) return;
  if (from_node >= 0 && (node_crashed(from_node) || node_isolated(from_node))) return;
  if (from_task >= 0 && task_isolated(from_task)) return;

  std::vector<Actor*> targets;
  switch (to.kind) {
    case core::Kind::task: {
      if (Actor* a = by_uid(to.id)) targets.push_back(a);
      break;
    }
    case core::Kind::group: {
      if (const auto* mem = group(to.id))
        for (int uid : *mem)
          if (Actor* a = by_uid(uid)) targets.push_back(a);
      break;
    }
    case core::Kind::node: {
      if (Actor* a = named(to.id, "bb")) targets.push_back(a);
      break;
    }
  }

  for (Actor* t : targets) {
    if (from_task >= 0 && t->uid >= 0 && muted_.count({from_task, t->uid})) continue;
    Message m{from_node, from_task, p};
    if (from_node >= 0 && t->node != from_node) {
      Ticks sent = now_;
      if (cut(from_node, t->node, sent)) continue;
      if (sc_.link.omission_p > 0.0) {
        double u = static_cast<double>(rand() >> 11) * (1.0 / 9007199254740992.0);
        if (u < sc_.link.omission_p) continue;
      }
      int fn = from_node, tn = t->node;
      at(link_arrival(fn, tn), [this, t, m = std::move(m), fn, tn]() {
        if (cut(fn, tn, now_)) return;
        deliver(t, m);
      });
    } else {
      after(1, [this, t, m = std::move(m)]() { deliver(t, m); });
    }
  }
}

void Sim::post_node(const Actor* from, int to_node, const std::string& actor, Payload p) {
  if (actor == "bb") {
    post(from, core::node_ref(to_node), std::move(p));
    return;
  }
  Actor* t = named(to_node, actor);
  if (!t) return;
  int from_node = from ? from->node : -1;
  if (from && from->down) return;
  Message m{from_node, from ? from->uid : -1, std::move(p)};
  if (from_node >= 0 && from_node != to_node) {
    if (cut(from_node, to_node, now_)) return;
    at(link_arrival(from_node, to_node), [this, t, m = std::move(m), from_node, to_node]() {
      if (cut(from_node, to_node, now_)) return;
      deliver(t, m);
    });
  } else {
    after(1, [this, t, m = std::move(m)]() { deliver(t, m); });
  }
}

void Sim::crash_node(int n) {
  if (crashed_nodes_.count(n)) return;
  crashed_nodes_.insert(n);
  emit(n, "sim", "crash", "node down");
  for (auto& a : actors_)
    if (a->node == n && !a->down) {
      a->down = true;
      a->on_crash();
    }
}

void Sim::restart_node(int n) {
  crashed_nodes_.erase(n);
  emit(n, "sim", "restart", "node up");
  for (auto& a : actors_)
    if (a->node == n && a->down) {
      a->down = false;
      a->on_restart();
    }
}

void Sim::reboot_node(int n) {
  emit(n, "sim", "reboot", "scheduled +" + std::to_string(opt_.reboot_delay));
  crash_node(n);
  after(opt_.reboot_delay, [this, n]() { restart_node(n); });
}

void Sim::crash_actor(int node, const std::string& name) {
  Actor* a = named(node, name);
  if (!a || a->down) return;
  a->down = true;
  emit(node, name, "crash", "component");
  a->on_crash();
}

void Sim::restart_actor(int node, const std::string& name) {
  Actor* a = named(node, name);
  if (!a) return;
  a->down = false;
  emit(node, name, "restart", "component");
  a->on_restart();
}

void Sim::crash_task(int uid) {
  Actor* a = by_uid(uid);
  if (!a || a->down) return;
  a->down = true;
  emit(a->node, a->name, "crash", "task " + std::to_string(uid));
  a->on_crash();
}

void Sim::stop_task(int uid) {
  Actor* a = by_uid(uid);
  if (!a || a->down) return;
  a->down = true;
  emit(a->node, a->name, "stop", "task " + std::to_string(uid));
  a->on_crash();
}

void Sim::start_task(int uid) {
  Actor* a = by_uid(uid);
  if (!a) return;
  if (!a->down) return;
  a->down = false;
  emit(a->node, a->name, "start", "task " + std::to_string(uid));
  a->on_restart();
}

void Sim::restart_task(int uid) {
  Actor* a = by_uid(uid);
  if (!a) return;
  a->down = false;
  emit(a->node, a->name, "restart", "task " + std::to_string(uid));
  a->on_restart();
}

void Sim::isolate_task(int uid) {
  isolated_tasks_.insert(uid);
  if (Actor* a = by_uid(uid)) emit(a->node, a->name, "isolate", "task " + std::to_string(uid));
}

void Sim::enable_task(int uid) {
  isolated_tasks_.erase(uid);
  if (Actor* a = by_uid(uid)) emit(a->node, a->name, "enable", "task " + std::to_string(uid));
}

void Sim::isolate_node(int n) {
  isolated_nodes_.insert(n);
  emit(n, "sim", "isolate", "node");
}

void Sim::enable_node(int n) {
  isolated_nodes_.erase(n);
  emit(n, "sim", "enable", "node");
}

void Sim::corrupt_task(int uid) {
  Actor* a = by_uid(uid);
  if (!a) return;
  a->corrupt_next = true;
  emit(a->node, a->name, "corrupt", "next output of task " + std::to_string(uid));
}

void Sim::mute(int from_uid, int to_uid) { muted_.insert({from_uid, to_uid}); }
void Sim::unmute(int from_uid, int to_uid) { muted_.erase({from_uid, to_uid}); }

void Sim::set_drift(int n, double factor) { drift_[n] = factor; }

double Sim::drift(int n) const {
  auto it = drift_.find(n);
  return it == drift_.end() ? 1.0 : it->second;
}

Ticks Sim::local_to_global(int n, Ticks local) const {
  double f = drift(n);
  if (f == 1.0) return local;
  Ticks g = static_cast<Ticks>(std::llround(static_cast<double>(local) / f));
  return g < 1 ? 1 : g;
}

long long Sim::next_label(int condition, core::EntityRef subject) {
  return ++labels_[{condition, {static_cast<int>(subject.kind), subject.id}}];
}

void Sim::emit(int node, const std::string& actor, const std::string& event,
               const std::string& details) {
  trace_.push_back(std::to_string(now_) + "\t" + std::to_string(node) + "\t" + actor + "\t" +
                   event + "\t" + details);
}

std::string Sim::trace_text() const {
  std::string out;
  for (const auto& l : trace_) {
    out += l;
    out += '\n';
  }
  return out;
}

long long Sim::delivered_count(int node, const std::string& actor) const {
  auto it = delivered_.find({node, actor});
  return it == delivered_.end() ? 0 : it->second;
}

}  // namespace simnet
