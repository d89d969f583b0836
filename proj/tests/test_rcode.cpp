#include <vector>

#include "core/database.h"
#include "doctest.h"
#include "rcode/listing.h"
#include "rcode/ops.h"
#include "rcode/serialize.h"
#include "rcode/vm.h"

namespace {

core::Database two_node_db() {
  core::Database db;
  db.nprocs = 2;
  for (int i = 0; i < 3; ++i) {
    core::TaskDescriptor t;
    t.unique_id = i;
    t.node = i % 2;
    t.local_id = i;
    db.tasks.push_back(t);
    core::EntityState s;
    s.running = true;
    db.task_states[i] = s;
  }
  core::GroupDescriptor g;
  g.unique_id = 5;
  g.members = {0, 1, 2};
  db.groups.push_back(g);
  for (int n = 0; n < 2; ++n) db.node_states[n].running = true;
  return db;
}

void mark_faulty(core::Database& db, int task) {
  core::Notification n;
  n.condition = core::cond_error;
  n.subject_kind = core::Kind::task;
  n.subject = task;
  n.label = 1;
  core::raise_event(db, n);
}

int32_t enc_task(int mode = rcode::mode_literal) {
  return static_cast<int32_t>(core::Kind::task) * 16 + mode;
}

}  // namespace

TEST_CASE("serialized header and payload sizes are pinned") {
  rcode::Program p;
  p.triplets.push_back(rcode::halt_triplet());
  auto bytes = rcode::serialize(p);
  REQUIRE(bytes.size() == 22);  // 10 byte header + one 12 byte triplet
  CHECK(bytes[0] == 'R');
  CHECK(bytes[1] == 'C');
  CHECK(bytes[2] == 'O');
  CHECK(bytes[3] == 'D');
  CHECK(bytes[4] == 1);  // version, little endian
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);  // count
  // -1 operands are two's complement
  CHECK(bytes[14] == 0xff);
  CHECK(bytes[17] == 0xff);
}

TEST_CASE("serialize and deserialize round-trip") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_set_role, 0, rcode::role_manager});
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_push, 12345, -1});
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back(rcode::halt_triplet());
  auto bytes = rcode::serialize(p);
  auto r = rcode::deserialize(bytes);
  REQUIRE(r.ok);
  CHECK(r.program == p);
}

TEST_CASE("decode failures carry the byte offset") {
  auto r = rcode::deserialize({'X', 'Y'});
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("offset 0") != std::string::npos);

  rcode::Program p;
  p.triplets.push_back(rcode::halt_triplet());
  auto bytes = rcode::serialize(p);
  bytes.pop_back();
  r = rcode::deserialize(bytes);
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("offset 21") != std::string::npos);

  bytes = rcode::serialize(p);
  bytes[4] = 9;
  r = rcode::deserialize(bytes);
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("version") != std::string::npos);
}

TEST_CASE("listing renders roles, compare symbols and section ops") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_set_role, 0, rcode::role_manager});
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_phase, enc_task(), 0});
  p.triplets.push_back({rcode::op_compare, rcode::cmp_eq, 9999});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back({777, 1, 2});
  p.triplets.push_back(rcode::halt_triplet());
  std::string text = rcode::render_listing(p);
  CHECK(text.find("00000  SET_ROLE  0  Manager\n") != std::string::npos);
  CHECK(text.find("00001  IF\n") != std::string::npos);
  CHECK(text.find("00002  STORE_PHASE  Thread  0\n") != std::string::npos);
  CHECK(text.find("00003  COMPARE  ==  9999\n") != std::string::npos);
  CHECK(text.find("ANEW_OA_OBJECTS  1\n") != std::string::npos);
  CHECK(text.find("00005  777  1  2\n") != std::string::npos);  // unknown opcode stays raw
  CHECK(text.find("00006  STOP\n") != std::string::npos);
}

TEST_CASE("empty program lists as header only") {
  CHECK(rcode::render_listing({}) == "line  rcode  opn1  opn2\n");
}

TEST_CASE("vm runs a status-guarded stop and never touches the database") {
  core::Database db = two_node_db();
  mark_faulty(db, 1);
  core::Database before = db;

  rcode::Program p;
  int32_t faulty = static_cast<int32_t>(core::Status::faulty);
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_status, faulty * 256 + enc_task(), 1});
  p.triplets.push_back({rcode::op_false, 4, -1});
  p.triplets.push_back({rcode::op_stop, enc_task(), 1});
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back(rcode::halt_triplet());

  auto r = rcode::execute(p, db);
  REQUIRE(r.ok);
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].verb == rcode::ActionRequest::Verb::stop);
  REQUIRE(r.actions[0].targets.size() == 1);
  CHECK(r.actions[0].targets[0] == core::task_ref(1));

  CHECK(db.task_states[1].error_list.size() == before.task_states[1].error_list.size());
  CHECK(db.log.size() == before.log.size());
}

TEST_CASE("false guard jumps to the section close and emits nothing") {
  core::Database db = two_node_db();
  rcode::Program p;
  int32_t faulty = static_cast<int32_t>(core::Status::faulty);
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_status, faulty * 256 + enc_task(), 1});
  p.triplets.push_back({rcode::op_false, 4, -1});
  p.triplets.push_back({rcode::op_stop, enc_task(), 1});
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back(rcode::halt_triplet());

  int sink_calls = 0;
  auto r = rcode::execute(p, db, [&](const rcode::ActionRequest&) { ++sink_calls; });
  REQUIRE(r.ok);
  CHECK(r.actions.empty());
  CHECK(sink_calls == 0);
  // the skipped branch still closes its section
  bool saw_fi = false, saw_oanew = false;
  for (const auto& line : r.trace) {
    if (line.find("FI statement.") != std::string::npos) saw_fi = true;
    if (line.find("OA-RENEW.") != std::string::npos) saw_oanew = true;
  }
  CHECK(saw_fi);
  CHECK(saw_oanew);
}

TEST_CASE("those references pick the matched and complement sets") {
  core::Database db = two_node_db();
  mark_faulty(db, 1);

  rcode::Program p;
  int32_t faulty = static_cast<int32_t>(core::Status::faulty);
  int32_t group_enc = static_cast<int32_t>(core::Kind::group) * 16;
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_status, faulty * 256 + group_enc, 5});
  p.triplets.push_back({rcode::op_false, 5, -1});
  p.triplets.push_back({rcode::op_restart, enc_task(rcode::mode_at), 1});     // @1
  p.triplets.push_back({rcode::op_isolate, enc_task(rcode::mode_tilde), 1});  // ~1
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back(rcode::halt_triplet());

  auto r = rcode::execute(p, db);
  REQUIRE(r.ok);
  REQUIRE(r.actions.size() == 2);
  REQUIRE(r.actions[0].targets.size() == 1);
  CHECK(r.actions[0].targets[0] == core::task_ref(1));
  REQUIRE(r.actions[1].targets.size() == 2);
  CHECK(r.actions[1].targets[0] == core::task_ref(0));
  CHECK(r.actions[1].targets[1] == core::task_ref(2));
}

TEST_CASE("send pops its payload and group sends fan out in the action") {
  core::Database db = two_node_db();
  mark_faulty(db, 0);
  rcode::Program p;
  int32_t faulty = static_cast<int32_t>(core::Status::faulty);
  int32_t group_enc = static_cast<int32_t>(core::Kind::group) * 16;
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_status, faulty * 256 + enc_task(), 0});
  p.triplets.push_back({rcode::op_false, 5, -1});
  p.triplets.push_back({rcode::op_push, 42, -1});
  p.triplets.push_back({rcode::op_send, group_enc, 5});
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back(rcode::halt_triplet());

  auto r = rcode::execute(p, db);
  REQUIRE(r.ok);
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].verb == rcode::ActionRequest::Verb::send);
  CHECK(r.actions[0].value == 42);
  REQUIRE(r.actions[0].targets.size() == 1);
  CHECK(r.actions[0].targets[0] == core::group_ref(5));
}

TEST_CASE("stack underflow aborts with the triplet position") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_compare, rcode::cmp_eq, 1});
  p.triplets.push_back(rcode::halt_triplet());
  core::Database db = two_node_db();
  auto r = rcode::execute(p, db);
  CHECK_FALSE(r.ok);
  CHECK(r.error_pc == 0);
  CHECK(r.error.find("underflow") != std::string::npos);
}

TEST_CASE("bad jump target aborts") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_push, 0, -1});
  p.triplets.push_back({rcode::op_false, 99, -1});
  p.triplets.push_back(rcode::halt_triplet());
  core::Database db = two_node_db();
  auto r = rcode::execute(p, db);
  CHECK_FALSE(r.ok);
  CHECK(r.error_pc == 1);
  CHECK(r.error.find("jump") != std::string::npos);
}

TEST_CASE("unresolved entities abort") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_stop, enc_task(), 99});
  p.triplets.push_back(rcode::halt_triplet());
  core::Database db = two_node_db();
  auto r = rcode::execute(p, db);
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("unresolved") != std::string::npos);
}

TEST_CASE("running off the end without a halt aborts") {
  rcode::Program p;
  p.triplets.push_back({rcode::op_push, 1, -1});
  core::Database db = two_node_db();
  auto r = rcode::execute(p, db);
  CHECK_FALSE(r.ok);
  CHECK(r.error.find("end of program") != std::string::npos);
}

TEST_CASE("identical snapshots give identical action logs and traces") {
  core::Database db = two_node_db();
  mark_faulty(db, 1);
  rcode::Program p;
  int32_t faulty = static_cast<int32_t>(core::Status::faulty);
  p.triplets.push_back({rcode::op_if, -1, -1});
  p.triplets.push_back({rcode::op_store_status, faulty * 256 + enc_task(), 1});
  p.triplets.push_back({rcode::op_false, 6, -1});
  p.triplets.push_back({rcode::op_push, 3, -1});
  p.triplets.push_back({rcode::op_send, enc_task(), 2});
  p.triplets.push_back({rcode::op_stop, enc_task(), 1});
  p.triplets.push_back({rcode::op_fi, -1, -1});
  p.triplets.push_back({rcode::op_oanew, 1, -1});
  p.triplets.push_back(rcode::halt_triplet());

  auto r1 = rcode::execute(p, db);
  auto r2 = rcode::execute(p, db);
  REQUIRE(r1.ok);
  REQUIRE(r2.ok);
  CHECK(r1.trace == r2.trace);
  REQUIRE(r1.actions.size() == r2.actions.size());
  for (size_t i = 0; i < r1.actions.size(); ++i) {
    CHECK(r1.actions[i].verb == r2.actions[i].verb);
    CHECK(r1.actions[i].targets == r2.actions[i].targets);
    CHECK(r1.actions[i].value == r2.actions[i].value);
  }
}
