#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ariel/compile.h"
#include "doctest.h"
#include "runner/runner.h"
#include "simnet/actors.h"
#include "simnet/sim.h"
#include "voting/voting.h"

using voting::Algorithm;
using voting::Ballot;
using voting::Outcome;
using voting::SessionConfig;
using voting::Value;
using voting::value_as_i64;
using voting::value_of;
using voting::VoteSpec;

namespace {

Ballot cast(int member, long long v) {
  Ballot b;
  b.member = member;
  b.present = true;
  b.value = value_of(v);
  return b;
}

Ballot silent(int member) {
  Ballot b;
  b.member = member;
  return b;
}

VoteSpec spec_of(Algorithm a, const char* metric = "abs_num", double eps = 0.0) {
  VoteSpec s;
  s.algorithm = a;
  s.metric = voting::metric_by_name(metric);
  s.epsilon = eps;
  return s;
}

int count_in(const simnet::Sim& sim, const std::string& needle) {
  int n = 0;
  for (const auto& line : sim.trace())
    if (line.find(needle) != std::string::npos) ++n;
  return n;
}

ariel::FileLoader no_headers() {
  return [](const std::string&) { return std::optional<std::string>{}; };
}

}  // namespace

TEST_CASE("values round-trip through the wire encoding") {
  CHECK(value_as_i64(value_of(0)) == 0);
  CHECK(value_as_i64(value_of(123456789)) == 123456789);
  CHECK(value_as_i64(value_of(-7)) == -7);
  CHECK(value_of(5).size() == 8);
  CHECK_THROWS_AS(value_as_i64(Value(3)), std::invalid_argument);
}

TEST_CASE("metric and algorithm names resolve or throw") {
  auto bits = voting::metric_by_name("bitwise");
  CHECK(bits(value_of(5), value_of(5)) == 0.0);
  CHECK(bits(value_of(5), value_of(6)) == 1.0);
  auto num = voting::metric_by_name("abs_num");
  CHECK(num(value_of(10), value_of(13)) == doctest::Approx(3.0));
  CHECK(num(value_of(13), value_of(10)) == doctest::Approx(3.0));
  CHECK(voting::metric_by_name("")(value_of(1), value_of(1)) == 0.0);
  CHECK_THROWS_AS(voting::metric_by_name("hamming"), std::invalid_argument);

  CHECK(voting::algorithm_by_name("majority") == Algorithm::majority);
  CHECK(voting::algorithm_by_name("consensus") == Algorithm::consensus);
  CHECK_THROWS_AS(voting::algorithm_by_name("borda"), std::invalid_argument);
  for (auto a : {Algorithm::majority, Algorithm::plurality, Algorithm::median,
                 Algorithm::weighted_average, Algorithm::consensus})
    CHECK(voting::algorithm_by_name(voting::algorithm_name(a)) == a);
}

TEST_CASE("majority charges the odd one out and counts absentees against the quorum") {
  auto spec = spec_of(Algorithm::majority);

  Outcome two_of_three = voting::vote({cast(0, 5), cast(1, 9), cast(2, 5)}, spec);
  CHECK(two_of_three.ok);
  CHECK(value_as_i64(two_of_three.result) == 5);
  CHECK(two_of_three.minority == std::vector<int>{1});

  // a missing ballot still sits in the denominator
  Outcome with_absent = voting::vote({cast(0, 5), silent(1), cast(2, 5)}, spec);
  CHECK(with_absent.ok);
  CHECK(with_absent.minority == std::vector<int>{1});

  // two of four is exactly half, not a majority
  Outcome half = voting::vote({cast(0, 5), silent(1), cast(2, 5), cast(3, 9)}, spec);
  CHECK_FALSE(half.ok);
  CHECK(half.note == "no cluster holds a majority");

  Outcome nobody = voting::vote({silent(0), silent(1), silent(2)}, spec);
  CHECK_FALSE(nobody.ok);
  CHECK(nobody.note == "no ballots arrived");
  CHECK(nobody.minority == std::vector<int>{0, 1, 2});
}

TEST_CASE("agreement is transitive: chained ballots form one cluster") {
  auto spec = spec_of(Algorithm::majority, "abs_num", 1.0);
  // 10~11~12 chain into one cluster although d(10,12) > epsilon
  Outcome out = voting::vote({cast(0, 10), cast(1, 11), cast(2, 12), cast(3, 20)}, spec);
  CHECK(out.ok);
  CHECK(value_as_i64(out.result) == 10);
  CHECK(out.minority == std::vector<int>{3});
}

TEST_CASE("plurality needs a strict lead") {
  auto spec = spec_of(Algorithm::plurality);
  Outcome lead = voting::vote({cast(0, 5), cast(1, 5), cast(2, 9), cast(3, 7)}, spec);
  CHECK(lead.ok);
  CHECK(value_as_i64(lead.result) == 5);
  CHECK(lead.minority == std::vector<int>{2, 3});

  Outcome tie = voting::vote({cast(0, 5), cast(1, 5), cast(2, 9), cast(3, 9)}, spec);
  CHECK_FALSE(tie.ok);
  CHECK(tie.note == "plurality tie");

  // the same split passes once a straggler breaks it
  Outcome broken = voting::vote({cast(0, 5), cast(1, 5), cast(2, 9), cast(3, 9), cast(4, 5)}, spec);
  CHECK(broken.ok);
  CHECK(value_as_i64(broken.result) == 5);
}

TEST_CASE("median discards extreme pairs and flags everyone far from the pick") {
  auto spec = spec_of(Algorithm::median);
  Outcome odd = voting::vote({cast(0, 1), cast(1, 2), cast(2, 9)}, spec);
  CHECK(odd.ok);
  CHECK(value_as_i64(odd.result) == 2);
  CHECK(odd.minority == std::vector<int>{0, 2});

  Outcome even = voting::vote({cast(0, 1), cast(1, 2), cast(2, 9), cast(3, 10)}, spec);
  CHECK(even.ok);
  CHECK(value_as_i64(even.result) == 2);
  CHECK(even.minority == std::vector<int>{0, 2, 3});

  Outcome pair = voting::vote({cast(0, 7), cast(1, 9)}, spec);
  CHECK(pair.ok);
  CHECK(value_as_i64(pair.result) == 7);
  CHECK(pair.minority == std::vector<int>{1});

  // a wide epsilon absolves the survivors' neighbours
  Outcome loose = voting::vote({cast(0, 1), cast(1, 2), cast(2, 9)}, spec_of(Algorithm::median, "abs_num", 1.0));
  CHECK(loose.ok);
  CHECK(loose.minority == std::vector<int>{2});
}

TEST_CASE("weighted average scales the mean of whoever showed up") {
  auto spec = spec_of(Algorithm::weighted_average);
  Outcome plain = voting::vote({cast(0, 10), cast(1, 20), silent(2)}, spec);
  CHECK(plain.ok);
  CHECK(value_as_i64(plain.result) == 15);
  CHECK(plain.minority == std::vector<int>{2});

  spec.scaling = 100.0;
  Outcome scaled = voting::vote({cast(0, 10), cast(1, 20), silent(2)}, spec);
  CHECK(value_as_i64(scaled.result) == 1500);

  spec.scaling = 1.0;
  Outcome rounded = voting::vote({cast(0, 1), cast(1, 2)}, spec);
  CHECK(value_as_i64(rounded.result) == 2);  // llround(1.5)
}

TEST_CASE("consensus tolerates nothing") {
  auto spec = spec_of(Algorithm::consensus);
  Outcome all = voting::vote({cast(0, 4), cast(1, 4), cast(2, 4)}, spec);
  CHECK(all.ok);
  CHECK(value_as_i64(all.result) == 4);

  Outcome missing = voting::vote({cast(0, 4), silent(1), cast(2, 4)}, spec);
  CHECK_FALSE(missing.ok);
  CHECK(missing.note == "missing ballots");
  CHECK(missing.minority == std::vector<int>{1});

  Outcome split = voting::vote({cast(0, 4), cast(1, 5), cast(2, 4)}, spec);
  CHECK_FALSE(split.ok);
  CHECK(split.note == "ballots disagree");
}

TEST_CASE("majority result matches a counting oracle over every three-ballot world") {
  auto spec = spec_of(Algorithm::majority);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        long long vals[3] = {a, b, c};
        Outcome out = voting::vote({cast(0, a), cast(1, b), cast(2, c)}, spec);

        int win = -1;
        for (int v = 0; v < 3; ++v) {
          int n = (a == v) + (b == v) + (c == v);
          if (2 * n > 3) win = v;
        }
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        if (win < 0) {
          CHECK_FALSE(out.ok);
          CHECK(out.minority.empty());
        } else {
          REQUIRE(out.ok);
          CHECK(value_as_i64(out.result) == win);
          std::vector<int> expect;
          for (int r = 0; r < 3; ++r)
            if (vals[r] != win) expect.push_back(r);
          CHECK(out.minority == expect);
        }
      }
}

TEST_CASE("the outcome ignores the order ballots arrived in") {
  auto spec = spec_of(Algorithm::plurality);
  std::vector<Ballot> base = {cast(0, 5), cast(1, 9), cast(2, 5), silent(3)};
  Outcome ref = voting::vote(base, spec);
  REQUIRE(ref.ok);
  std::vector<Ballot> rot = base;
  for (size_t k = 1; k < base.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    Outcome out = voting::vote(rot, spec);
    CHECK(out.ok == ref.ok);
    CHECK(out.result == ref.result);
    CHECK(out.minority == ref.minority);
  }
}

TEST_CASE("session validation rejects thin or overlapping rosters") {
  SessionConfig cfg;
  cfg.driver = 100;
  cfg.members.push_back({0, 10, false, 500000});
  CHECK_THROWS_AS(voting::validate_session(cfg), std::invalid_argument);

  cfg.members.push_back({1, 11, false, 500000});
  CHECK_NOTHROW(voting::validate_session(cfg));

  cfg.members.push_back({2, 11, true, 500000});
  CHECK_THROWS_AS(voting::validate_session(cfg), std::invalid_argument);
}

// ---- session protocol over the wire ----------------------------------------

namespace {

struct SessionWorld {
  std::unique_ptr<simnet::Sim> sim;
  voting::DriverActor* driver = nullptr;
  std::map<int, voting::VoterActor*> voters;  // uid -> actor
  simnet::SinkTask* ok_sink = nullptr;
  simnet::SinkTask* err_sink = nullptr;
};

SessionWorld make_session(Algorithm algo, bool with_spare, simnet::Ticks until) {
  auto cfg = std::make_shared<SessionConfig>();
  cfg->driver = 100;
  cfg->members.push_back({0, 10, false, 500000});
  cfg->members.push_back({1, 11, false, 500000});
  cfg->members.push_back({2, 12, false, 500000});
  if (with_spare) cfg->members.push_back({3, 13, true, 500000});
  cfg->spec = spec_of(algo, "bitwise");
  cfg->on_success = 20;
  cfg->on_error = 21;

  simnet::Scenario sc;
  sc.seed = 7;
  sc.until = until;
  sc.link.delay_base = 1000;

  SessionWorld w;
  w.sim = std::make_unique<simnet::Sim>(sc);
  w.driver = static_cast<voting::DriverActor*>(
      w.sim->add(std::make_unique<voting::DriverActor>(0, cfg)));
  int node = 1;
  for (const auto& m : cfg->members) {
    auto* v = static_cast<voting::VoterActor*>(
        w.sim->add(std::make_unique<voting::VoterActor>(node++, cfg, m)));
    w.voters[m.uid] = v;
  }
  w.ok_sink = static_cast<simnet::SinkTask*>(w.sim->add(std::make_unique<simnet::SinkTask>(0, 20)));
  w.err_sink = static_cast<simnet::SinkTask*>(w.sim->add(std::make_unique<simnet::SinkTask>(0, 21)));
  return w;
}

}  // namespace

TEST_CASE("a silent fellow is outvoted at the deadline") {
  SessionWorld w = make_session(Algorithm::majority, false, 3000000);
  w.sim->start_all();
  w.sim->at(1000000, [&]() { w.sim->crash_task(12); });
  w.sim->run();

  REQUIRE(w.ok_sink->received.size() == 1);
  CHECK(w.ok_sink->received[0].second == 100);
  // nobody decides before the vote deadline passes
  CHECK(w.ok_sink->received[0].first >= 2500000);
  CHECK(w.err_sink->received.empty());
  CHECK(count_in(*w.sim, "\tvote\tround 1 agreed, minority ranks 2") == 2);
}

TEST_CASE("consensus refuses to paper over a missing ballot") {
  SessionWorld w = make_session(Algorithm::consensus, false, 3000000);
  w.sim->start_all();
  w.sim->at(1000000, [&]() { w.sim->crash_task(12); });
  w.sim->run();

  CHECK(w.ok_sink->received.empty());
  REQUIRE(w.err_sink->received.size() == 1);
  CHECK(w.err_sink->received[0].second == voting::err_no_consensus);
}

TEST_CASE("a spare waits for the wake-up call and the identity, in that order") {
  SessionWorld w = make_session(Algorithm::majority, true, 1000000);
  w.sim->start_all();
  auto* spare = w.voters.at(13);
  // a stray identity before any wake-up call means nothing to an idle spare
  w.sim->at(100, [&]() { w.sim->post(nullptr, core::task_ref(13), simnet::ValueMsg{11}); });
  w.sim->run_until(150);
  CHECK_FALSE(spare->active());

  w.sim->at(200, [&]() { w.sim->post(nullptr, core::task_ref(13), simnet::ValueMsg{10}); });
  w.sim->run_until(250);
  CHECK_FALSE(spare->active());
  CHECK(count_in(*w.sim, "\twakeup\tspare called up") == 1);

  w.sim->at(300, [&]() { w.sim->post(nullptr, core::task_ref(13), simnet::ValueMsg{11}); });
  w.sim->run();
  CHECK(spare->active());
  CHECK(spare->rank() == 1);
  CHECK(spare->ring_view().at(1) == 13);
  CHECK(count_in(*w.sim, "\tactivate\ttaking rank 1 from task 11") == 1);
  CHECK(w.driver->ring.at(1) == 13);
}

// ---- the full switch-in story through the compiler and the backbone --------

namespace {

const char* kStructureDecls = R"(NPROCS = 5
DEFINE 0 = MANAGER
DEFINE 1-4 = ASSISTANTS
TASK 0 IS NODE 1, TASKID 0
TASK 1 IS NODE 2, TASKID 0
TASK 2 IS NODE 3, TASKID 0
TASK 3 IS NODE 4, TASKID 0
TASK 100 IS NODE 0, TASKID 1
TASK 20 IS NODE 0, TASKID 2
TASK 21 IS NODE 0, TASKID 3
NVERSION TASK 100
VERSION 0 IS TASK 0
VERSION 1 IS TASK 1
VERSION 2 IS TASK 2
VERSION 3 IS SPARE TASK 3
VOTING ALGORITHM IS MAJORITY
METRIC "bitwise"
ON SUCCESS TASK 20
ON ERROR TASK 21
END NVERSION
)";

const char* kSwitchInStrategy = R"(IF [ PHASE (T1) == 9999 ]
THEN
   STOP T1
   SEND 10 T3
   SEND 1 T3
   SEND 3 T0
   SEND 3 T2
FI
)";

runner::World make_structure_world(const std::string& script, simnet::Ticks until,
                                   uint64_t seed = 13) {
  ariel::CompileResult cr = ariel::compile_source(script, "structure.ariel", {}, no_headers());
  if (!cr.ok) MESSAGE(cr.transcript);
  REQUIRE(cr.ok);

  simnet::Scenario sc;
  sc.seed = seed;
  sc.until = until;
  sc.link.delay_base = 1000;
  sc.link.jitter = 500;
  return runner::assemble(cr.config, cr.program, sc);
}

}  // namespace

TEST_CASE("a corrupted version is voted out and the spare takes its seat") {
  std::string script = std::string(kStructureDecls) +
                       "INJECT MFAULT ON COMPONENT 1 AFTER 1000000 TICKS\n" + kSwitchInStrategy;
  runner::World w = make_structure_world(script, 5000000);
  w.sim->run();

  // round 1 still agrees two against one, round 2 runs on the new ring
  CHECK(w.sinks.at(20)->got(100));
  CHECK(w.sinks.at(20)->got(200));
  CHECK(w.sinks.at(20)->received.size() == 2);
  CHECK(w.sinks.at(21)->received.empty());

  CHECK(count_in(*w.sim, "\tfault\tvalue corrupted") == 1);
  CHECK(count_in(*w.sim, "\tvote\tround 1 agreed, minority ranks 1") >= 2);
  CHECK(count_in(*w.sim, "\trecovery\tbegin, cond 4 task 1") == 1);
  CHECK(count_in(*w.sim, "\tactivate\ttaking rank 1 from task 1") == 1);
  CHECK(count_in(*w.sim, "\tvote\tround 2 agreed") == 3);

  CHECK(w.voters.at(3)->active());
  CHECK(w.voters.at(3)->rank() == 1);
  CHECK(w.drivers.at(100)->ring.at(1) == 3);
  CHECK(w.voters.at(0)->ring_view().at(1) == 3);
  CHECK(w.voters.at(2)->ring_view().at(1) == 3);

  const core::Database& db = w.manager()->replica();
  CHECK(db.task_states.at(1).phase == 9999);
  CHECK(db.task_states.at(1).error_list.size() == 1);
  CHECK(db.task_states.at(1).error_list[0].condition == core::cond_value_fault);
  CHECK_FALSE(db.task_states.at(1).running);
}

TEST_CASE("a second casualty finds the bench empty") {
  std::string script = std::string(kStructureDecls) +
                       "INJECT MFAULT ON COMPONENT 1 AFTER 1000000 TICKS\n" +
                       "INJECT MFAULT ON COMPONENT 0 AFTER 3000000 TICKS\n" + kSwitchInStrategy;
  runner::World w = make_structure_world(script, 5000000);
  w.sim->run();

  // both rounds still produce a result on the way down
  CHECK(w.sinks.at(20)->got(100));
  CHECK(w.sinks.at(20)->got(200));
  CHECK(count_in(*w.sim, "\texhausted\tno idle spare for this structure") == 1);
  REQUIRE(w.sinks.at(21)->received.size() == 1);
  CHECK(w.sinks.at(21)->received[0].second == voting::err_exhausted);
  CHECK(count_in(*w.sim, "\trecovery\tbegin, cond 4 task 0") == 1);
}

// ---- the alpha-count refinement: restart transients, replace repeaters -----

namespace {

const char* kAlphaStrategy = R"(IF [ TRANSIENT T1 ]
THEN
   RESTART T1
ELIF [ FAULTY T1 ]
THEN
   STOP T1
   SEND 10 T3
   SEND 1 T3
   SEND 3 T0
   SEND 3 T2
FI
)";

std::string alpha_script(int faults) {
  std::string s = "ALPHACOUNT 1 IS THRESHOLD = 3.0, FACTOR = 0.4 END ALPHACOUNT\n";
  s += kStructureDecls;
  for (int k = 0; k < faults; ++k)
    s += "INJECT MFAULT ON COMPONENT 1 AFTER " + std::to_string(1000000 + 2000000 * k) +
         " TICKS\n";
  return s + kAlphaStrategy;
}

}  // namespace

TEST_CASE("one slip reads as transient and earns a restart, not a replacement") {
  runner::World w = make_structure_world(alpha_script(1), 5000000);
  w.sim->run();

  CHECK(count_in(*w.sim, "\tbb\taction\trestart") == 1);
  CHECK(count_in(*w.sim, "\tactivate\t") == 0);
  CHECK(count_in(*w.sim, "\twakeup\t") == 0);
  CHECK_FALSE(w.voters.at(3)->active());
  CHECK(w.voters.at(1)->active());

  // the restarted version is back in the very next round
  CHECK(w.sinks.at(20)->got(100));
  CHECK(w.sinks.at(20)->got(200));
  CHECK(w.sinks.at(21)->received.empty());

  const core::Database& db = w.manager()->replica();
  CHECK(db.task_states.at(1).restart_count == 1);
  REQUIRE(db.task_states.at(1).alpha.has_value());
  CHECK(db.task_states.at(1).alpha->value == doctest::Approx(1.0));
}

TEST_CASE("a repeat offender crosses the damage threshold and loses its seat") {
  runner::World w = make_structure_world(alpha_script(3), 9000000);
  w.sim->run();

  // two restarts, then the third strike brings the spare in
  CHECK(count_in(*w.sim, "\tbb\taction\trestart") == 2);
  CHECK(count_in(*w.sim, "\tactivate\ttaking rank 1 from task 1") == 1);
  CHECK(w.voters.at(3)->active());
  CHECK(w.voters.at(3)->rank() == 1);
  CHECK(w.drivers.at(100)->ring.at(1) == 3);

  // round 4 settles on the repaired ring
  CHECK(w.sinks.at(20)->got(400));
  CHECK(w.sinks.at(21)->received.empty());

  const core::Database& db = w.manager()->replica();
  CHECK(db.task_states.at(1).restart_count == 2);
  CHECK(db.task_states.at(1).error_list.size() == 3);
  REQUIRE(db.task_states.at(1).alpha.has_value());
  CHECK(db.task_states.at(1).alpha->value == doctest::Approx(3.0));
}
