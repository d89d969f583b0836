#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "simnet/actors.h"
#include "simnet/sim.h"

namespace voting {

using simnet::Ticks;

// ballots are opaque byte strings; the built-in numeric paths use 64-bit
// little-endian payloads
using Value = std::vector<uint8_t>;

Value value_of(long long v);
long long value_as_i64(const Value& v);

using Metric = std::function<double(const Value&, const Value&)>;
Metric metric_by_name(const std::string& name);  // "bitwise" or "abs_num"

enum class Algorithm { majority, plurality, median, weighted_average, consensus };
Algorithm algorithm_by_name(const std::string& name);
const char* algorithm_name(Algorithm a);

struct Ballot {
  int member = -1;  // rank inside the voting ring
  bool present = false;
  Value value;
};

struct VoteSpec {
  Algorithm algorithm = Algorithm::majority;
  Metric metric;  // bitwise when unset
  double epsilon = 0.0;
  double scaling = 1.0;
};

struct Outcome {
  bool ok = false;
  Value result;
  std::vector<int> minority;  // members outside the winning cluster, absentees included
  std::string note;
};

// Pure decision function over one round of ballots.
Outcome vote(const std::vector<Ballot>& ballots, const VoteSpec& spec);

// ---- redundant-structure session ------------------------------------------

struct SessionConfig {
  struct Member {
    int rank = 0;
    int uid = -1;
    bool spare = false;
    Ticks timeout = 500000;
  };

  int driver = -1;  // the task uid the structure presents to the outside
  std::vector<Member> members;
  VoteSpec spec;
  int on_success = -1;
  int on_error = -1;
  long long wakeup_value = 10;  // wake-up call constant shared with the recovery script
  Ticks round_period = 2000000;

  std::vector<const Member*> actives() const;
  std::vector<const Member*> spares() const;
};

// throws std::invalid_argument on bad arity or spare/member overlap
void validate_session(const SessionConfig& cfg);

// error markers delivered to the ON ERROR task
inline constexpr long long err_no_consensus = -1;
inline constexpr long long err_exhausted = -2;

// Starts a voting round on a fixed period and tracks ring membership as
// spares report in.
struct DriverActor : simnet::Actor {
  DriverActor(int node_, std::shared_ptr<const SessionConfig> cfg);
  void on_start() override;
  void on_message(const simnet::Message& m) override;

  std::map<int, int> ring;  // rank -> task uid
  long long round = 0;

 private:
  std::shared_ptr<const SessionConfig> cfg_;
  int gen_ = 0;
};

// One per version: produces the round value, exchanges it with its fellows,
// votes, and (as the lowest live rank) publishes the result and charges the
// minority. Spares idle until the two-step wake-up/identity call.
struct VoterActor : simnet::Actor {
  VoterActor(int node_, std::shared_ptr<const SessionConfig> cfg, const SessionConfig::Member& me);

  void on_start() override;
  void on_restart() override;
  void on_message(const simnet::Message& m) override;

  bool active() const { return active_; }
  int rank() const { return my_rank_; }
  const std::map<int, int>& ring_view() const { return ring_; }

 private:
  void begin_round(long long r, long long input);
  void maybe_decide();
  void decide();
  void activate(int replaced_uid);
  void handle_value(long long v);

  std::shared_ptr<const SessionConfig> cfg_;
  int initial_rank_;
  bool initially_active_;
  Ticks timeout_;

  bool active_ = false;
  bool awaiting_identity_ = false;
  int my_rank_ = -1;
  std::map<int, int> ring_;            // rank -> uid, active slots only
  std::set<int> last_minority_uids_;

  long long cur_round_ = -1;
  std::map<int, long long> values_;    // rank -> value this round
  // fellow votes can outrun the driver's round start; they wait here
  std::vector<simnet::VoteMsg> early_;
  bool voted_ = false;
  int gen_deadline_ = 0;
};

}  // namespace voting
