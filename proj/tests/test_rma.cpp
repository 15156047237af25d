#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <future>
#include <thread>
#include <vector>

#include "awr/rma.hpp"

using namespace awr;

namespace {

Eigen::VectorXd v2(double a, double b) { return (Eigen::VectorXd(2) << a, b).finished(); }

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() == 0.0;
}

// Minimal actor program: per iteration a sync and a put per step, then an
// end-of-sweep rendezvous.
void actor_loop(ScheduleController& c, int actor, int steps, int iterations) {
    for (int k = 1; k <= iterations; ++k) {
        for (int n = 0; n < steps; ++n) {
            c.checkpoint(actor, "sync", "win", n, k);
            c.checkpoint(actor, "put", "win", n, k);
        }
        c.checkpoint(actor, "sweep_end", "-", steps, k);
    }
    c.finish(actor);
}

Trace run_actors(SchedulerOptions opt, int steps0, int steps1, int iterations) {
    ScheduleController c(opt);
    auto f0 = std::async(std::launch::async, [&] { actor_loop(c, 0, steps0, iterations); });
    auto f1 = std::async(std::launch::async, [&] { actor_loop(c, 1, steps1, iterations); });
    f0.get();
    f1.get();
    return c.trace();
}

TraceEvent ev(int actor, const char* action, const char* target, int step, int k) {
    return TraceEvent{actor, action, target, step, k};
}

} // namespace

TEST_SUITE("rma") {

TEST_CASE("window puts become visible at unlock, after the owner syncs") {
    Window win("ug", 3, 2);
    win.fill(v2(1.0, 1.0), 0.0);
    win.sync();
    CHECK(same(win.values(1), v2(1.0, 1.0)));
    CHECK(win.tag(1) == 0.0);

    auto epoch = win.lock(LockKind::exclusive);
    epoch.put(1, v2(5.0, 6.0), 2.0);
    win.sync();
    CHECK(same(win.values(1), v2(1.0, 1.0))); // still buffered in the epoch
    epoch.unlock();

    CHECK(same(win.values(1), v2(1.0, 1.0))); // public only; owner has not synced
    win.sync();
    CHECK(same(win.values(1), v2(5.0, 6.0)));
    CHECK(win.tag(1) == 2.0);
    CHECK(win.tag(0) == 0.0);
}

TEST_CASE("window validates epochs, slots and dimensions") {
    Window win("q", 2, 1);
    CHECK_THROWS_AS(Window("bad", 0, 1), std::invalid_argument);

    auto shared = win.lock(LockKind::shared);
    CHECK_THROWS_AS(shared.put(0, Eigen::VectorXd::Ones(1), 1.0), std::logic_error);
    shared.unlock();

    auto epoch = win.lock(LockKind::exclusive);
    CHECK_THROWS_AS(epoch.put(5, Eigen::VectorXd::Ones(1), 1.0), std::out_of_range);
    CHECK_THROWS_AS(epoch.put(0, Eigen::VectorXd::Ones(2), 1.0), std::invalid_argument);

    auto moved = std::move(epoch);
    moved.put(0, Eigen::VectorXd::Ones(1), 3.0);
    moved.unlock();
    CHECK_THROWS_AS(moved.put(0, Eigen::VectorXd::Ones(1), 1.0), std::logic_error);
    win.sync();
    CHECK(win.values(0)(0) == 1.0);

    CHECK_THROWS_AS(win.values(7), std::out_of_range);
}

TEST_CASE("exclusive lock waits for a shared holder") {
    Window win("ug", 1, 1);
    std::atomic<bool> released{false};
    auto holder = std::async(std::launch::async, [&] {
        auto epoch = win.lock(LockKind::shared);
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        released = true;
        epoch.unlock();
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    auto epoch = win.lock(LockKind::exclusive);
    CHECK(released.load());
    epoch.put(0, Eigen::VectorXd::Constant(1, 9.0), 1.0);
    epoch.unlock();
    holder.get();
    win.sync();
    CHECK(win.values(0)(0) == 9.0);
}

TEST_CASE("lockstep interleaves sync and put pairs step by step") {
    const Trace t = run_actors({.mode = ScheduleMode::lockstep}, 2, 2, 1);
    const std::vector<TraceEvent> want{
        ev(0, "sync", "win", 0, 1), ev(1, "sync", "win", 0, 1), ev(0, "put", "win", 0, 1),
        ev(1, "put", "win", 0, 1),  ev(0, "sync", "win", 1, 1), ev(1, "sync", "win", 1, 1),
        ev(0, "put", "win", 1, 1),  ev(1, "put", "win", 1, 1),  ev(0, "sweep_end", "-", 2, 1),
        ev(1, "sweep_end", "-", 2, 1),
    };
    CHECK(t.events == want);
    CHECK(t.mode == ScheduleMode::lockstep);
}

TEST_CASE("priority modes run one actor's whole sweep first") {
    const Trace t0 = run_actors({.mode = ScheduleMode::p0_ahead}, 1, 1, 2);
    const std::vector<TraceEvent> want0{
        ev(0, "sync", "win", 0, 1), ev(0, "put", "win", 0, 1), ev(1, "sync", "win", 0, 1),
        ev(1, "put", "win", 0, 1),  ev(0, "sweep_end", "-", 1, 1), ev(1, "sweep_end", "-", 1, 1),
        ev(0, "sync", "win", 0, 2), ev(0, "put", "win", 0, 2), ev(1, "sync", "win", 0, 2),
        ev(1, "put", "win", 0, 2),  ev(0, "sweep_end", "-", 1, 2), ev(1, "sweep_end", "-", 1, 2),
    };
    CHECK(t0.events == want0);

    const Trace t1 = run_actors({.mode = ScheduleMode::p1_ahead}, 1, 1, 1);
    const std::vector<TraceEvent> want1{
        ev(1, "sync", "win", 0, 1), ev(1, "put", "win", 0, 1), ev(0, "sync", "win", 0, 1),
        ev(0, "put", "win", 0, 1),  ev(1, "sweep_end", "-", 1, 1), ev(0, "sweep_end", "-", 1, 1),
    };
    CHECK(t1.events == want1);
}

TEST_CASE("mismatched step counts still drain without deadlock") {
    const Trace t = run_actors({.mode = ScheduleMode::lockstep}, 2, 5, 2);
    CHECK(t.events.size() == 2 * (2 * 2 + 2 * 5 + 2));
    const Trace p = run_actors({.mode = ScheduleMode::p0_ahead}, 3, 1, 2);
    CHECK(p.events.size() == 2 * (2 * 3 + 2 * 1 + 2));
}

TEST_CASE("seeded schedules are reproducible functions of the seed") {
    const SchedulerOptions opt{.mode = ScheduleMode::seeded, .seed = 42, .jitter = 0.5};
    const Trace a = run_actors(opt, 3, 3, 2);
    const Trace b = run_actors(opt, 3, 3, 2);
    CHECK(a.events == b.events);
    CHECK(a.seed == 42);
    CHECK(a.events.size() == 2 * (2 * 3 + 1) * 2);
}

TEST_CASE("a recorded schedule replays event for event") {
    const SchedulerOptions record{.mode = ScheduleMode::seeded, .seed = 7, .jitter = 0.9};
    const Trace t = run_actors(record, 2, 3, 2);

    SchedulerOptions replay = record;
    replay.replay = std::make_shared<Trace>(t);
    const Trace again = run_actors(replay, 2, 3, 2);
    CHECK(again.events == t.events);
}

TEST_CASE("replay of a different program reports divergence") {
    const SchedulerOptions record{.mode = ScheduleMode::lockstep};
    const Trace t = run_actors(record, 2, 2, 1);

    SchedulerOptions replay = record;
    replay.replay = std::make_shared<Trace>(t);
    ScheduleController c(replay);
    auto f0 = std::async(std::launch::async, [&] {
        try {
            actor_loop(c, 0, 1, 1); // one step short of the recording
        } catch (const std::exception& e) {
            c.fail(0, e.what());
            throw;
        }
    });
    auto f1 = std::async(std::launch::async, [&] {
        try {
            actor_loop(c, 1, 2, 1);
        } catch (const std::exception& e) {
            c.fail(1, e.what());
            throw;
        }
    });
    int failures = 0;
    for (auto* f : {&f0, &f1}) {
        try {
            f->get();
        } catch (const std::exception& e) {
            ++failures;
            CHECK(std::string(e.what()).find("diverged") != std::string::npos);
        }
    }
    CHECK(failures >= 1);
}

TEST_CASE("free-run rendezvous exchanges data and its trace refuses to replay") {
    ScheduleController c({.mode = ScheduleMode::free_run});
    int mailbox0 = 0, mailbox1 = 0;
    auto f0 = std::async(std::launch::async, [&] {
        mailbox0 = 10;
        c.checkpoint(0, "sweep_end", "-", 0, 1);
        const int got = mailbox1;
        c.finish(0);
        return got;
    });
    auto f1 = std::async(std::launch::async, [&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        mailbox1 = 20;
        c.checkpoint(1, "sweep_end", "-", 0, 1);
        const int got = mailbox0;
        c.finish(1);
        return got;
    });
    CHECK(f0.get() == 20);
    CHECK(f1.get() == 10);

    SchedulerOptions bad{.mode = ScheduleMode::free_run};
    bad.replay = std::make_shared<Trace>(c.trace());
    CHECK_THROWS_AS(ScheduleController{bad}, std::invalid_argument);

    SchedulerOptions mismatched{.mode = ScheduleMode::lockstep};
    mismatched.replay = std::make_shared<Trace>(run_actors({.mode = ScheduleMode::seeded, .seed = 1}, 1, 1, 1));
    CHECK_THROWS_AS(ScheduleController{mismatched}, std::invalid_argument);
}

TEST_CASE("failure poisons the peer instead of deadlocking it") {
    ScheduleController c({.mode = ScheduleMode::lockstep});
    auto f0 = std::async(std::launch::async, [&] {
        c.checkpoint(0, "sync", "win", 0, 1);
        c.fail(0, "synthetic breakdown");
    });
    auto f1 = std::async(std::launch::async, [&] {
        c.checkpoint(1, "sync", "win", 0, 1);
        c.checkpoint(1, "put", "win", 0, 1);
        c.finish(1);
    });
    f0.get();
    CHECK_THROWS_AS(f1.get(), std::runtime_error);
}

TEST_CASE("traces survive a save/load round trip") {
    const Trace t = run_actors({.mode = ScheduleMode::seeded, .seed = 11, .jitter = 0.3}, 2, 2, 1);
    const std::string path = "/tmp/awr_trace_roundtrip.txt";
    t.save(path);
    const Trace back = Trace::load(path);
    CHECK(back.mode == t.mode);
    CHECK(back.seed == t.seed);
    CHECK(back.events == t.events);
    std::remove(path.c_str());

    CHECK_THROWS_AS(Trace::load("/tmp/awr_no_such_trace.txt"), std::runtime_error);
    CHECK_THROWS_AS(schedule_mode_from_string("bogus"), std::invalid_argument);
    CHECK(schedule_mode_from_string("p0_ahead") == ScheduleMode::p0_ahead);
}

} // TEST_SUITE
