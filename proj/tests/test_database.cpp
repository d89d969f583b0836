#include "core/database.h"
#include "doctest.h"

namespace {

core::Database make_db() {
  core::Database db;
  db.nprocs = 3;
  for (int i = 0; i < 4; ++i) {
    core::TaskDescriptor t;
    t.unique_id = i;
    t.node = i % 3;
    t.local_id = i;
    db.tasks.push_back(t);
    core::EntityState s;
    s.running = true;
    db.task_states[i] = s;
  }
  core::GroupDescriptor g;
  g.unique_id = 10;
  g.members = {1, 2, 3};
  db.groups.push_back(g);
  for (int n = 0; n < 3; ++n) {
    core::EntityState s;
    s.running = true;
    db.node_states[n] = s;
  }
  return db;
}

core::Notification error_on(int task, long long label, long long when = 0) {
  core::Notification n;
  n.condition = core::cond_error;
  n.subject_kind = core::Kind::task;
  n.subject = task;
  n.label = label;
  n.sim_time = when;
  return n;
}

}  // namespace

TEST_CASE("error notifications populate the error list and request recovery") {
  core::Database db = make_db();
  auto out = core::raise_event(db, error_on(1, 1));
  REQUIRE(out.ok);
  CHECK(out.recovery_needed);
  CHECK(db.task_states[1].error_list.size() == 1);
  CHECK_FALSE(db.task_states[1].running);
  CHECK(core::query_status(db, core::Status::faulty, core::task_ref(1)).truth);
}

TEST_CASE("phase reports set the phase and are not errors") {
  core::Database db = make_db();
  core::Notification n;
  n.condition = core::cond_phase_report;
  n.subject_kind = core::Kind::task;
  n.subject = 2;
  n.args = {9999};
  auto out = core::raise_event(db, n);
  REQUIRE(out.ok);
  CHECK_FALSE(out.recovery_needed);
  CHECK(core::query_value(db, core::ValueAtom::phase, core::task_ref(2)).value == 9999);
  CHECK_FALSE(core::query_status(db, core::Status::faulty, core::task_ref(2)).truth);
}

TEST_CASE("unknown subjects are rejected") {
  core::Database db = make_db();
  auto out = core::raise_event(db, error_on(99, 1));
  CHECK_FALSE(out.ok);
  CHECK_FALSE(out.error.empty());
}

TEST_CASE("group queries split members into match and complement") {
  core::Database db = make_db();
  core::raise_event(db, error_on(2, 1));
  auto r = core::query_status(db, core::Status::faulty, core::group_ref(10));
  CHECK(r.truth);
  REQUIRE(r.match.size() == 1);
  CHECK(r.match[0].id == 2);
  CHECK(r.complement.size() == 2);
}

TEST_CASE("errn sums over group members, errt reports the latest condition") {
  core::Database db = make_db();
  core::raise_event(db, error_on(1, 1, 100));
  core::raise_event(db, error_on(2, 1, 200));
  {
    core::Notification n = error_on(2, 2, 300);
    n.condition = core::cond_missed_deadline;
    core::raise_event(db, n);
  }
  CHECK(core::query_value(db, core::ValueAtom::errn, core::group_ref(10)).value == 3);
  CHECK(core::query_value(db, core::ValueAtom::errt, core::group_ref(10)).value ==
        core::cond_missed_deadline);
}

TEST_CASE("remove phase resets phases, remove any also clears errors") {
  core::Database db = make_db();
  core::raise_event(db, error_on(1, 1));
  db.task_states[1].phase = 7;
  core::db_remove(db, core::RemoveSel::phase, core::group_ref(10));
  CHECK(db.task_states[1].phase == 0);
  CHECK(db.task_states[1].error_list.size() == 1);
  core::db_remove(db, core::RemoveSel::any, core::group_ref(10));
  CHECK(db.task_states[1].error_list.empty());
}

TEST_CASE("alpha counter keeps history across remove any") {
  core::Database db = make_db();
  core::AlphaCounter a;
  db.task_states[1].alpha = a;
  core::raise_event(db, error_on(1, 1));
  CHECK(db.task_states[1].alpha->value == doctest::Approx(1.0));
  core::db_remove(db, core::RemoveSel::any, core::task_ref(1));
  CHECK(db.task_states[1].alpha->value == doctest::Approx(1.0));
}

TEST_CASE("transient status requires an attached counter below threshold") {
  core::Database db = make_db();
  core::AlphaCounter a;
  a.threshold = 2.0;
  db.task_states[3].alpha = a;
  core::raise_event(db, error_on(3, 1));
  CHECK(core::query_status(db, core::Status::transient, core::task_ref(3)).truth);
  core::raise_event(db, error_on(3, 2));
  CHECK_FALSE(core::query_status(db, core::Status::transient, core::task_ref(3)).truth);
  CHECK(core::query_status(db, core::Status::faulty, core::task_ref(3)).truth);
}

TEST_CASE("deadlock needs mutual partners") {
  core::Database db = make_db();
  db.task_states[1].deadlock_partner = 2;
  CHECK_FALSE(core::query_deadlocked(db, core::task_ref(1), core::task_ref(2)));
  db.task_states[2].deadlock_partner = 1;
  CHECK(core::query_deadlocked(db, core::task_ref(1), core::task_ref(2)));
  CHECK(core::query_deadlocked(db, core::task_ref(2), core::task_ref(1)));
}

TEST_CASE("task rebooted defers to its node") {
  core::Database db = make_db();
  db.node_states[1].reboot_count = 1;
  CHECK(core::query_status(db, core::Status::rebooted, core::task_ref(1)).truth);
  CHECK_FALSE(core::query_status(db, core::Status::rebooted, core::task_ref(0)).truth);
}
