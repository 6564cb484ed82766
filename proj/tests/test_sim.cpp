#include <string>
#include <vector>

#include "doctest.h"

#include "cook/errors.hpp"
#include "cook/sim.hpp"

using namespace cook;

TEST_CASE("events fire in time order, ties in scheduling order") {
    Sim sim;
    std::vector<int> order;
    sim.schedule(10, [&] { order.push_back(1); });
    sim.schedule(5, [&] { order.push_back(0); });
    sim.schedule(10, [&] { order.push_back(2); });
    sim.run();
    CHECK(order == std::vector<int>{0, 1, 2});
    CHECK(sim.now() == 10);
    CHECK(sim.events_processed() == 3);
}

TEST_CASE("a process parks until it is woken, and time advances around it") {
    Sim sim;
    std::vector<std::string> log;
    Process* p = sim.spawn("waiter", [&] {
        log.push_back("start@" + std::to_string(sim.now()));
        sim.park();
        log.push_back("resumed@" + std::to_string(sim.now()));
    });
    sim.schedule(100, [&] {
        log.push_back("wake@100");
        sim.wake(p);
    });
    sim.run();
    CHECK(log == std::vector<std::string>{"start@0", "wake@100", "resumed@100"});
}

TEST_CASE("wake_at resumes a parked process at the requested time") {
    Sim sim;
    Cycles resumed_at = 0;
    Process* p = sim.spawn("sleeper", [&] {
        sim.park();
        resumed_at = sim.now();
    });
    sim.schedule(0, [&] { sim.wake_at(p, 77); });
    sim.run();
    CHECK(resumed_at == 77);
}

TEST_CASE("current() identifies the calling context") {
    Sim sim;
    CHECK(Sim::current() == nullptr);
    Process* seen = nullptr;
    Process* p = sim.spawn("self", [&] { seen = Sim::current(); });
    sim.run();
    CHECK(seen == p);
    CHECK(p->finished());
    CHECK(Sim::current() == nullptr);
}

TEST_CASE("a non-daemon parked at quiescence is a deadlock") {
    Sim sim;
    sim.spawn("stuck", [&] { sim.park(); });
    CHECK_THROWS_AS(sim.run(), SimError);
}

TEST_CASE("daemons may still be parked when the run winds down") {
    Sim sim;
    bool body_ran = false;
    sim.spawn("background", [&] {
        body_ran = true;
        sim.park();
    }, /*daemon=*/true);
    CHECK_NOTHROW(sim.run());
    CHECK(body_ran);
}

TEST_CASE("the event budget stops a runaway simulation") {
    Sim sim;
    sim.set_event_budget(5);
    std::function<void()> self_feeding = [&] { sim.schedule(sim.now() + 1, self_feeding); };
    sim.schedule(0, self_feeding);
    CHECK_THROWS_AS(sim.run(), SimError);
}

TEST_CASE("exceptions thrown in a process body surface from run()") {
    Sim sim;
    sim.spawn("thrower", [] { throw ConfigError("boom"); });
    CHECK_THROWS_AS(sim.run(), ConfigError);
}

TEST_CASE("same-time spawns run in spawn order") {
    Sim sim;
    std::vector<int> order;
    sim.spawn("a", [&] { order.push_back(0); });
    sim.spawn("b", [&] { order.push_back(1); });
    sim.spawn("c", [&] { order.push_back(2); });
    sim.run();
    CHECK(order == std::vector<int>{0, 1, 2});
}

TEST_CASE("two identical programs interleave identically") {
    auto script = [] {
        std::vector<std::string> log;
        Sim sim;
        Process* a = sim.spawn("a", [&] {
            log.push_back("a0");
            sim.park();
            log.push_back("a1");
        });
        Process* b = sim.spawn("b", [&] {
            log.push_back("b0");
            sim.park();
            log.push_back("b1");
        });
        sim.schedule(3, [&, a] { sim.wake(a); });
        sim.schedule(3, [&, b] { sim.wake(b); });
        sim.run();
        return log;
    };
    CHECK(script() == script());
}

TEST_CASE("shutdown unwinds parked processes cleanly") {
    bool unwound = false;
    {
        Sim sim;
        struct Sentinel {
            bool* flag;
            ~Sentinel() { *flag = true; }
        };
        sim.spawn("held", [&] {
            Sentinel s{&unwound};
            sim.park();  // never woken; destructor must still run
        }, /*daemon=*/true);
        sim.run();
        CHECK_FALSE(unwound);
    }  // ~Sim -> shutdown
    CHECK(unwound);
}
