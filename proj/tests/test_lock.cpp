#include <vector>

#include "doctest.h"

#include "cook/errors.hpp"
#include "cook/gpu.hpp"
#include "cook/lock.hpp"
#include "cook/sim.hpp"
#include "cook/trace.hpp"

using namespace cook;

namespace {

struct LockRig {
    Sim sim;
    Gpu gpu{sim, GpuSpec{}, TimingParams{}, 42};
    GpuLock lock{gpu};
};

}  // namespace

TEST_CASE("uncontended acquire and release") {
    LockRig rig;
    CHECK_FALSE(rig.lock.owner().has_value());
    rig.lock.acquire(0);
    CHECK(rig.lock.owner() == 0);
    CHECK(rig.lock.waiting() == 0);
    rig.lock.release(0);
    CHECK_FALSE(rig.lock.owner().has_value());
}

TEST_CASE("waiters are granted ownership in arrival order") {
    LockRig rig;
    std::vector<AppId> grant_order;

    Process* holder = rig.sim.spawn("holder", [&] {
        rig.lock.acquire(0);
        rig.sim.park();  // hold the lock until woken at t=5
        rig.lock.release(0);
    });
    for (AppId id : {1, 2, 3}) {
        rig.sim.spawn("waiter" + std::to_string(id), [&rig, &grant_order, id] {
            rig.lock.acquire(id);
            grant_order.push_back(id);
            rig.lock.release(id);
        });
    }
    rig.sim.schedule(5, [&] { rig.sim.wake(holder); });
    rig.sim.run();

    CHECK(grant_order == std::vector<AppId>{1, 2, 3});
    CHECK_FALSE(rig.lock.owner().has_value());
    CHECK(rig.lock.waiting() == 0);
}

TEST_CASE("at most one owner at any instant") {
    LockRig rig;
    int concurrent = 0;
    bool violated = false;

    for (AppId id : {0, 1, 2, 3}) {
        rig.sim.spawn("app" + std::to_string(id), [&rig, &concurrent, &violated, id] {
            for (int round = 0; round < 3; ++round) {
                rig.lock.acquire(id);
                concurrent += 1;
                if (concurrent != 1) violated = true;
                concurrent -= 1;
                rig.lock.release(id);
            }
        });
    }
    rig.sim.run();
    CHECK_FALSE(violated);
}

TEST_CASE("re-acquiring a held lock is a protocol error") {
    LockRig rig;
    rig.lock.acquire(7);
    CHECK_THROWS_AS(rig.lock.acquire(7), LockProtocolError);
}

TEST_CASE("releasing without ownership is a protocol error") {
    LockRig rig;
    CHECK_THROWS_AS(rig.lock.release(0), LockProtocolError);
    rig.lock.acquire(1);
    CHECK_THROWS_AS(rig.lock.release(2), LockProtocolError);
}

TEST_CASE("lock transitions land in the chronogram as instantaneous rows") {
    LockRig rig;
    rig.lock.acquire(4);
    rig.lock.release(4);

    const auto& evs = rig.gpu.trace().events();
    REQUIRE(evs.size() == 2);
    CHECK(evs[0].kind == EventKind::LockAcquire);
    CHECK(evs[1].kind == EventKind::LockRelease);
    for (const auto& ev : evs) {
        CHECK(ev.app == 4);
        CHECK(ev.start == ev.end);
        CHECK(ev.op == -1);
        CHECK(ev.sm == -1);
    }
}
