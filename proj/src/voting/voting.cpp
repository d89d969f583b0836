#include "voting/voting.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace voting {

Value value_of(long long v) {
  Value out(8);
  auto u = static_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(u >> (8 * i));
  return out;
}

long long value_as_i64(const Value& v) {
  if (v.size() != 8) throw std::invalid_argument("value is not a 64-bit payload");
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(v[i]) << (8 * i);
  return static_cast<long long>(u);
}

Metric metric_by_name(const std::string& name) {
  if (name == "bitwise" || name.empty())
    return [](const Value& a, const Value& b) { return a == b ? 0.0 : 1.0; };
  if (name == "abs_num")
    return [](const Value& a, const Value& b) {
      return std::fabs(static_cast<double>(value_as_i64(a)) -
                       static_cast<double>(value_as_i64(b)));
    };
  throw std::invalid_argument("unknown metric '" + name + "'");
}

Algorithm algorithm_by_name(const std::string& name) {
  if (name == "majority") return Algorithm::majority;
  if (name == "plurality") return Algorithm::plurality;
  if (name == "median") return Algorithm::median;
  if (name == "weighted_average") return Algorithm::weighted_average;
  if (name == "consensus") return Algorithm::consensus;
  throw std::invalid_argument("unknown voting algorithm '" + name + "'");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::majority: return "majority";
    case Algorithm::plurality: return "plurality";
    case Algorithm::median: return "median";
    case Algorithm::weighted_average: return "weighted_average";
    case Algorithm::consensus: return "consensus";
  }
  return "?";
}

namespace {

// connected components of the "within epsilon" relation, i.e. transitive
// agreement: a~b and b~c put a and c in one cluster even when d(a,c) > eps
std::vector<std::vector<int>> clusters(const std::vector<const Ballot*>& present,
                                       const Metric& d, double eps) {
  int n = static_cast<int>(present.size());
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i};
    comp[i] = static_cast<int>(out.size());
    std::vector<int> members{i};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (comp[b] >= 0) continue;
        if (d(present[a]->value, present[b]->value) <= eps) {
          comp[b] = comp[i];
          stack.push_back(b);
          members.push_back(b);
        }
      }
    }
    out.push_back(std::move(members));
  }
  return out;
}

const Ballot* lowest_member(const std::vector<const Ballot*>& present,
                            const std::vector<int>& idx) {
  const Ballot* best = nullptr;
  for (int i : idx)
    if (!best || present[i]->member < best->member) best = present[i];
  return best;
}

}  // namespace

Outcome vote(const std::vector<Ballot>& ballots, const VoteSpec& spec) {
  Outcome out;
  Metric d = spec.metric ? spec.metric : metric_by_name("bitwise");

  std::vector<const Ballot*> present;
  std::vector<int> absent;
  for (const Ballot& b : ballots)
    (b.present ? (void)present.push_back(&b) : (void)absent.push_back(b.member));

  if (present.empty()) {
    out.note = "no ballots arrived";
    out.minority = absent;
    return out;
  }

  auto fill_minority_by_distance = [&](const Value& result) {
    out.minority = absent;
    for (const Ballot* b : present)
      if (d(b->value, result) > spec.epsilon) out.minority.push_back(b->member);
    std::sort(out.minority.begin(), out.minority.end());
  };

  switch (spec.algorithm) {
    case Algorithm::majority:
    case Algorithm::plurality: {
      auto cl = clusters(present, d, spec.epsilon);
      std::sort(cl.begin(), cl.end(), [&](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return lowest_member(present, a)->member < lowest_member(present, b)->member;
      });
      const auto& top = cl.front();
      bool wins;
      if (spec.algorithm == Algorithm::majority) {
        wins = 2 * top.size() > ballots.size();
        if (!wins) out.note = "no cluster holds a majority";
      } else {
        wins = cl.size() < 2 || top.size() > cl[1].size();
        if (!wins) out.note = "plurality tie";
      }
      if (!wins) {
        out.minority = absent;
        return out;
      }
      out.ok = true;
      out.result = lowest_member(present, top)->value;
      std::set<int> winners;
      for (int i : top) winners.insert(present[i]->member);
      for (const Ballot& b : ballots)
        if (!winners.count(b.member)) out.minority.push_back(b.member);
      std::sort(out.minority.begin(), out.minority.end());
      return out;
    }

    case Algorithm::median: {
      std::vector<const Ballot*> pool = present;
      while (pool.size() > 2) {
        size_t bi = 0, bj = 1;
        double best = -1.0;
        for (size_t i = 0; i < pool.size(); ++i)
          for (size_t j = i + 1; j < pool.size(); ++j) {
            double dist = d(pool[i]->value, pool[j]->value);
            if (dist > best) {
              best = dist;
              bi = i;
              bj = j;
            }
          }
        pool.erase(pool.begin() + static_cast<long>(bj));
        pool.erase(pool.begin() + static_cast<long>(bi));
      }
      const Ballot* winner = pool.front();
      for (const Ballot* b : pool)
        if (b->member < winner->member) winner = b;
      out.ok = true;
      out.result = winner->value;
      fill_minority_by_distance(out.result);
      return out;
    }

    case Algorithm::weighted_average: {
      double sum = 0.0;
      for (const Ballot* b : present) sum += static_cast<double>(value_as_i64(b->value));
      double mean = sum / static_cast<double>(present.size());
      out.ok = true;
      out.result = value_of(static_cast<long long>(std::llround(mean * spec.scaling)));
      out.minority = absent;
      return out;
    }

    case Algorithm::consensus: {
      if (!absent.empty()) {
        out.note = "missing ballots";
        out.minority = absent;
        return out;
      }
      for (size_t i = 0; i < present.size(); ++i)
        for (size_t j = i + 1; j < present.size(); ++j)
          if (d(present[i]->value, present[j]->value) > spec.epsilon) {
            out.note = "ballots disagree";
            return out;
          }
      const Ballot* first = present.front();
      for (const Ballot* b : present)
        if (b->member < first->member) first = b;
      out.ok = true;
      out.result = first->value;
      return out;
    }
  }
  out.note = "unreachable";
  return out;
}

std::vector<const SessionConfig::Member*> SessionConfig::actives() const {
  std::vector<const Member*> out;
  for (const Member& m : members)
    if (!m.spare) out.push_back(&m);
  return out;
}

std::vector<const SessionConfig::Member*> SessionConfig::spares() const {
  std::vector<const Member*> out;
  for (const Member& m : members)
    if (m.spare) out.push_back(&m);
  return out;
}

void validate_session(const SessionConfig& cfg) {
  if (cfg.actives().size() < 2)
    throw std::invalid_argument("a redundant structure needs at least two active versions");
  std::set<int> act;
  for (const auto* m : cfg.actives()) act.insert(m->uid);
  for (const auto* s : cfg.spares())
    if (act.count(s->uid))
      throw std::invalid_argument("spare task " + std::to_string(s->uid) +
                                  " overlaps an active version");
}

DriverActor::DriverActor(int node_, std::shared_ptr<const SessionConfig> cfg)
    : cfg_(std::move(cfg)) {
  node = node_;
  uid = cfg_->driver;
  name = "nvp" + std::to_string(cfg_->driver);
}

void DriverActor::on_start() {
  ring.clear();
  round = 0;
  for (const auto* m : cfg_->actives()) ring[m->rank] = m->uid;
  periodic(
      cfg_->round_period, gen_,
      [this]() {
        ++round;
        long long input = 100 * round;
        sim->emit(node, name, "round", "start " + std::to_string(round) + " input " +
                                           std::to_string(input));
        for (const auto& [rank, member] : ring)
          sim->post(this, core::task_ref(member), simnet::RoundMsg{round, input});
      },
      false);
}

void DriverActor::on_message(const simnet::Message& m) {
  if (const auto* ack = std::get_if<simnet::AckMsg>(&m.payload)) {
    ring[ack->rank] = ack->from_task;
    sim->emit(node, name, "ring", "rank " + std::to_string(ack->rank) + " now task " +
                                      std::to_string(ack->from_task));
  }
}

VoterActor::VoterActor(int node_, std::shared_ptr<const SessionConfig> cfg,
                       const SessionConfig::Member& me)
    : cfg_(std::move(cfg)),
      initial_rank_(me.rank),
      initially_active_(!me.spare),
      timeout_(me.timeout) {
  node = node_;
  uid = me.uid;
  name = "voter" + std::to_string(me.uid);
}

void VoterActor::on_start() {
  active_ = initially_active_;
  awaiting_identity_ = false;
  my_rank_ = initial_rank_;
  ring_.clear();
  for (const auto* m : cfg_->actives()) ring_[m->rank] = m->uid;
  last_minority_uids_.clear();
  cur_round_ = -1;
  values_.clear();
  early_.clear();
  voted_ = false;
  ++gen_deadline_;
}

void VoterActor::on_restart() { on_start(); }

void VoterActor::on_message(const simnet::Message& m) {
  if (const auto* r = std::get_if<simnet::RoundMsg>(&m.payload)) {
    if (active_) begin_round(r->round, r->input);
  } else if (const auto* v = std::get_if<simnet::VoteMsg>(&m.payload)) {
    if (!active_) return;
    if (v->round > cur_round_) {
      early_.push_back(*v);
      return;
    }
    if (v->round != cur_round_) return;
    values_[v->rank] = v->value;
    maybe_decide();
  } else if (const auto* val = std::get_if<simnet::ValueMsg>(&m.payload)) {
    handle_value(val->value);
  }
}

void VoterActor::begin_round(long long r, long long input) {
  cur_round_ = r;
  values_.clear();
  voted_ = false;
  auto held = std::move(early_);
  early_.clear();
  for (const auto& e : held)
    if (e.round == r) values_[e.rank] = e.value;
  long long v = input;
  if (corrupt_next) {
    corrupt_next = false;
    v = input + 1 + static_cast<long long>(sim->rand() % 997);
    sim->emit(node, name, "fault", "value corrupted to " + std::to_string(v));
  }
  values_[my_rank_] = v;
  // fellows hear from us in ring order starting just past our slot
  std::vector<int> order;
  for (const auto& [rank, member] : ring_)
    if (rank > my_rank_) order.push_back(rank);
  for (const auto& [rank, member] : ring_)
    if (rank < my_rank_) order.push_back(rank);
  for (int rank : order)
    sim->post(this, core::task_ref(ring_[rank]), simnet::VoteMsg{r, my_rank_, v});
  arm(timeout_, gen_deadline_, [this]() {
    if (!voted_) decide();
  });
  maybe_decide();
}

void VoterActor::maybe_decide() {
  if (voted_) return;
  for (const auto& [rank, member] : ring_)
    if (!values_.count(rank)) return;
  decide();
}

void VoterActor::decide() {
  voted_ = true;
  ++gen_deadline_;

  std::vector<Ballot> ballots;
  for (const auto& [rank, member] : ring_) {
    Ballot b;
    b.member = rank;
    auto it = values_.find(rank);
    if (it != values_.end()) {
      b.present = true;
      b.value = value_of(it->second);
    }
    ballots.push_back(std::move(b));
  }
  Outcome out = vote(ballots, cfg_->spec);

  last_minority_uids_.clear();
  for (int rank : out.minority)
    if (ring_.count(rank)) last_minority_uids_.insert(ring_[rank]);

  std::string who;
  for (int rank : out.minority) who += " " + std::to_string(rank);
  sim->emit(node, name, "vote",
            "round " + std::to_string(cur_round_) + (out.ok ? " agreed" : " failed") +
                (out.minority.empty() ? "" : ", minority ranks" + who));

  int decider = -1;
  for (const auto& [rank, member] : ring_)
    if (values_.count(rank)) {
      decider = rank;
      break;
    }
  if (decider != my_rank_) return;

  if (out.ok) {
    sim->post(this, core::task_ref(cfg_->on_success), simnet::ValueMsg{value_as_i64(out.result)});
    for (int rank : out.minority) {
      if (!ring_.count(rank)) continue;
      int culprit = ring_[rank];
      core::Notification phase;
      phase.condition = core::cond_phase_report;
      phase.subject_kind = core::Kind::task;
      phase.subject = culprit;
      phase.args = {9999};
      simnet::raise_local(*this, phase);

      core::Notification fault;
      fault.condition = core::cond_value_fault;
      fault.subject_kind = core::Kind::task;
      fault.subject = culprit;
      fault.args = {static_cast<int>(cur_round_)};
      simnet::raise_local(*this, fault);
    }
  } else {
    sim->post(this, core::task_ref(cfg_->on_error), simnet::ValueMsg{err_no_consensus});
  }
}

void VoterActor::handle_value(long long v) {
  if (!active_) {
    if (awaiting_identity_) {
      activate(static_cast<int>(v));
    } else if (v == cfg_->wakeup_value) {
      awaiting_identity_ = true;
      sim->emit(node, name, "wakeup", "spare called up");
    }
    return;
  }
  if (v == cfg_->wakeup_value) {
    // a wake-up call reaching an already active spare means nothing is left
    sim->emit(node, name, "exhausted", "no idle spare for this structure");
    sim->post(this, core::task_ref(cfg_->on_error), simnet::ValueMsg{err_exhausted});
    return;
  }
  for (const auto* s : cfg_->spares()) {
    if (s->uid != v) continue;
    int slot = -1;
    for (const auto& [rank, member] : ring_)
      if (last_minority_uids_.count(member) && (slot < 0 || rank < slot)) slot = rank;
    if (slot >= 0) {
      ring_[slot] = static_cast<int>(v);
      sim->emit(node, name, "ring",
                "rank " + std::to_string(slot) + " now task " + std::to_string(v));
      sim->post(this, core::task_ref(static_cast<int>(v)), simnet::AckMsg{uid, slot});
    }
    return;
  }
  for (const auto* m : cfg_->actives()) {
    if (m->uid != v) continue;
    ring_[m->rank] = m->uid;
    sim->emit(node, name, "ring",
              "rank " + std::to_string(m->rank) + " restored to task " + std::to_string(v));
    return;
  }
}

void VoterActor::activate(int replaced_uid) {
  int slot = -1;
  for (const auto& [rank, member] : ring_)
    if (member == replaced_uid) slot = rank;
  if (slot < 0) slot = initial_rank_;
  ring_[slot] = uid;
  my_rank_ = slot;
  active_ = true;
  awaiting_identity_ = false;
  sim->emit(node, name, "activate",
            "taking rank " + std::to_string(slot) + " from task " + std::to_string(replaced_uid));
  sim->post(this, core::task_ref(cfg_->driver), simnet::AckMsg{uid, slot});
}

}  // namespace voting
