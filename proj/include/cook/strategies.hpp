#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cook/gpu.hpp"
#include "cook/types.hpp"

namespace cook {

class MockRuntime;
struct Application;
struct RoutineCall;

// A launch or copy captured by the worker hook, waiting in the per-app
// queue. Arguments were already deep-copied against the registered layout,
// so the item stays valid however the caller reuses its buffers.
struct WorkerItem {
    RoutineKind kind = RoutineKind::KernelLaunch;
    KernelId kernel = -1;
    GridShape grid{};
    std::vector<std::byte> args;
    CopySpec copy{};
    int issue_index = -1;
};

// Deferred-execution state of one application under the worker strategy:
// an unbounded FIFO of captured calls, the dedicated stream the worker
// executes them in, and the worker process itself.
struct WorkerState {
    StreamId stream = -1;
    Process* proc = nullptr;
    std::deque<WorkerItem> items;
    bool in_flight = false;   // item popped but not yet finished
    bool idle_parked = false; // worker is parked waiting for work
    bool stop = false;
    std::vector<Process*> drain_waiters;

    bool drained() const { return items.empty() && !in_flight; }
};

// Creates the worker stream and process for `app`. Called on strategy
// activation, before the application issues its first call.
void start_worker(MockRuntime& rt, Application& app);

// Drain-then-stop: the worker finishes everything still queued, then exits.
// Blocks no one; run the simulation afterwards to let it wind down.
void request_worker_stop(MockRuntime& rt, Application& app);

// Parks the calling process until the app's worker queue is drained.
void wait_worker_drained(MockRuntime& rt, Application& app);

using StrategyHookFn = void (*)(MockRuntime&, Application&, const RoutineCall&,
                                int issue_index);

// template id -> hook implementation. Dispatch resolves StrategyHook entries
// through this; a generated table referencing an id missing here is a
// configuration error.
const std::map<std::string, StrategyHookFn>& strategy_hook_registry();

void run_strategy_hook(const std::string& template_id, MockRuntime& rt, Application& app,
                       const RoutineCall& call, int issue_index);

}  // namespace cook
