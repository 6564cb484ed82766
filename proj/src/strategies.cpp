#include "cook/strategies.hpp"

#include "cook/errors.hpp"
#include "cook/lock.hpp"
#include "cook/runtime.hpp"

namespace cook {

namespace {

// Launch-or-copy submission shared by every guard template: copies reuse
// the launch template, so each hook body routes on the call kind.
OpId submit_guarded(MockRuntime& rt, Application& app, const RoutineCall& call,
                    int issue_index, StreamId stream_override = -1) {
    switch (call.kind) {
        case RoutineKind::KernelLaunch:
            return rt.base_enqueue_kernel(app, call, issue_index, stream_override);
        case RoutineKind::MemCopy:
            return rt.base_enqueue_copy(app, call, issue_index, stream_override);
        default:
            throw ConfigError("guard template bound to non-launch, non-copy symbol '" +
                              call.symbol + "'");
    }
}

//======================== callback strategy ========================
//
// Brackets the guarded operation between two host callbacks on the same
// stream: the first acquires the device lock when it reaches the stream
// head, the second releases it after the operation completes. The
// intercepted call itself stays asynchronous.

void hook_callback_guard(MockRuntime& rt, Application& app, const RoutineCall& call,
                         int issue_index) {
    StreamId stream = rt.resolve_stream(app, call.stream);
    GpuLock& lock = rt.lock();
    AppId id = app.id;
    rt.gpu().enqueue_callback(id, stream, [&lock, id] { lock.acquire(id); },
                              issue_index);
    submit_guarded(rt, app, call, issue_index, stream);
    rt.gpu().enqueue_callback(id, stream, [&lock, id] { lock.release(id); },
                              issue_index);
}

//========================= synced strategy =========================
//
// Holds the lock across the whole operation from the calling thread:
// acquire, submit, wait for the device to go idle, release. Turns every
// guarded call into a blocking one.

void hook_synced_guard(MockRuntime& rt, Application& app, const RoutineCall& call,
                       int issue_index) {
    rt.lock().acquire(app.id);
    submit_guarded(rt, app, call, issue_index);
    rt.gpu().sync_app(app.id);
    rt.lock().release(app.id);
}

//========================= worker strategy =========================
//
// The intercepted call only captures the operation (deep-copying launch
// arguments against the registered layout) and returns. A per-app worker
// executes captured items one at a time: acquire, submit into the worker
// stream, wait for that stream, release. Stream-ordered and sync calls
// first wait for the queue to drain, then run in order.

void notify_drained(Sim& sim, WorkerState& w) {
    for (Process* p : w.drain_waiters) sim.wake(p);
    w.drain_waiters.clear();
}

void worker_loop(MockRuntime& rt, Application& app) {
    WorkerState& w = *app.worker;
    Sim& sim = rt.gpu().sim();
    for (;;) {
        while (w.items.empty() && !w.stop) {
            w.idle_parked = true;
            sim.park();
        }
        if (w.items.empty()) break;  // stop requested and queue drained

        WorkerItem item = std::move(w.items.front());
        w.items.pop_front();
        w.in_flight = true;

        rt.lock().acquire(app.id);
        if (item.kind == RoutineKind::KernelLaunch) {
            rt.gpu().enqueue_kernel(app.id, w.stream, item.kernel, item.grid,
                                    std::move(item.args), item.issue_index);
        } else {
            rt.gpu().enqueue_copy(app.id, w.stream, item.copy, item.issue_index);
        }
        rt.gpu().sync_stream(w.stream);
        rt.lock().release(app.id);

        w.in_flight = false;
        if (w.drained()) notify_drained(sim, w);
    }
    notify_drained(sim, w);
}

// Wakes the worker if it is parked waiting for work. The flag is cleared
// here, not in the loop, so that two pushes before the worker resumes do
// not schedule a second wake.
void nudge_worker(Sim& sim, WorkerState& w) {
    if (w.idle_parked) {
        w.idle_parked = false;
        sim.wake(w.proc);
    }
}

void hook_worker_defer(MockRuntime& rt, Application& app, const RoutineCall& call,
                       int issue_index) {
    if (!app.worker) throw ConfigError("worker strategy hook fired with no worker started");

    WorkerItem item;
    item.kind = call.kind;
    item.issue_index = issue_index;
    switch (call.kind) {
        case RoutineKind::KernelLaunch: {
            validate_grid(call.grid);
            // Deep-copy the launch arguments against the registered layout:
            // the caller's buffer is free to change once this hook returns.
            const KernelRegistry::Info& info = app.registry.lookup(call.kernel);
            item.kernel = call.kernel;
            item.grid = call.grid;
            item.args = copy_args_by_layout(call.args, info.layout);
            break;
        }
        case RoutineKind::MemCopy:
            item.copy = call.copy;
            break;
        default:
            throw ConfigError("defer template bound to non-launch, non-copy symbol '" +
                              call.symbol + "'");
    }

    app.worker->items.push_back(std::move(item));
    nudge_worker(rt.gpu().sim(), *app.worker);
}

// Ordering-sensitive calls that are not launches or copies: let the queue
// drain so everything captured before this call has finished, then run the
// call's plain behavior.
void hook_worker_ordered(MockRuntime& rt, Application& app, const RoutineCall& call,
                         int issue_index) {
    wait_worker_drained(rt, app);
    switch (classify_symbol(call.symbol)) {
        case SymbolCategory::DeviceSync:
            rt.gpu().sync_app(app.id);
            break;
        case SymbolCategory::StreamSync:
            rt.gpu().sync_stream(rt.resolve_stream(app, call.stream));
            break;
        case SymbolCategory::HostFunc:
            rt.gpu().enqueue_callback(app.id, rt.resolve_stream(app, call.stream),
                                      call.host_fn, issue_index);
            break;
        case SymbolCategory::EventRecord:
            rt.gpu().enqueue_marker(app.id, rt.resolve_stream(app, call.stream),
                                    issue_index);
            break;
        default:
            throw ConfigError("ordered-op hook bound to unsupported symbol '" +
                              call.symbol + "'");
    }
}

}  // namespace

void start_worker(MockRuntime& rt, Application& app) {
    if (app.worker) return;
    auto w = std::make_unique<WorkerState>();
    w->stream = rt.gpu().create_stream(app.id);
    app.worker = std::move(w);
    Application* app_ptr = &app;
    MockRuntime* rt_ptr = &rt;
    app.worker->proc =
        rt.gpu().sim().spawn("worker/a" + std::to_string(app.id),
                             [rt_ptr, app_ptr] { worker_loop(*rt_ptr, *app_ptr); },
                             /*daemon=*/true);
}

void request_worker_stop(MockRuntime& rt, Application& app) {
    if (!app.worker) return;
    app.worker->stop = true;
    nudge_worker(rt.gpu().sim(), *app.worker);
}

void wait_worker_drained(MockRuntime& rt, Application& app) {
    if (!app.worker) return;
    WorkerState& w = *app.worker;
    if (w.drained()) return;
    Process* self = Sim::current();
    if (!self) throw SimError("wait_worker_drained called outside a simulation process");
    w.drain_waiters.push_back(self);
    rt.gpu().sim().park();
}

const std::map<std::string, StrategyHookFn>& strategy_hook_registry() {
    static const std::map<std::string, StrategyHookFn> table = {
        {"callback-launch", &hook_callback_guard},
        {"synced-launch", &hook_synced_guard},
        {"worker-launch", &hook_worker_defer},
        {"worker-ordered", &hook_worker_ordered},
    };
    return table;
}

void run_strategy_hook(const std::string& template_id, MockRuntime& rt, Application& app,
                       const RoutineCall& call, int issue_index) {
    const auto& table = strategy_hook_registry();
    auto it = table.find(template_id);
    if (it == table.end())
        throw ConfigError("hook table references unknown strategy template '" +
                          template_id + "'");
    it->second(rt, app, call, issue_index);
}

}  // namespace cook
