#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cook/gpu.hpp"
#include "cook/hooktable.hpp"
#include "cook/lock.hpp"
#include "cook/registry.hpp"
#include "cook/types.hpp"

namespace cook {

struct WorkerState;

// One intercepted library call. Payload fields are read according to `kind`;
// everything else is ignored. `args` is a view into the caller's buffer and
// is only valid for the duration of the call.
struct RoutineCall {
    std::string symbol;
    RoutineKind kind = RoutineKind::Other;
    StreamId stream = -1;  // -1 means the app's default stream

    KernelId kernel = -1;
    GridShape grid{};
    ArgView args{};

    CopySpec copy{};
    std::function<void()> host_fn;

    // registration payload
    std::string reg_name;
    ArgLayout reg_layout{};
};

struct HostCallRecord {
    std::string symbol;
    int issue_index = -1;
    Cycles t_call = 0;
    Cycles t_return = 0;
};

struct Application {
    Application();
    ~Application();
    Application(const Application&) = delete;
    Application& operator=(const Application&) = delete;

    AppId id = -1;
    StreamId default_stream = -1;
    const HookTable* hooks = nullptr;
    KernelRegistry registry;
    std::unique_ptr<WorkerState> worker;  // set while the worker strategy is active
    int next_issue_index = 0;
    std::vector<HostCallRecord> call_log;
};

// How the plain (unhooked) runtime treats each symbol it exports.
enum class SymbolCategory {
    Launch,
    Copy,
    HostFunc,
    DeviceSync,
    StreamSync,
    EventRecord,
    Register,
    Benign,  // queries, allocs and other calls with no simulated effect
};

// Fixed classification of the mock runtime's own interface. Returns Benign
// for symbols the runtime does not recognize: ignoring an exotic symbol
// makes it a no-op, the same way a real preload shim would just not
// interpose it.
SymbolCategory classify_symbol(const std::string& symbol);

// In-process dispatch layer: every call an application makes enters here and
// is routed by the application's hook table.
class MockRuntime {
public:
    MockRuntime(Gpu& gpu, GpuLock& lock) : gpu_(gpu), lock_(lock) {}

    MockRuntime(const MockRuntime&) = delete;
    MockRuntime& operator=(const MockRuntime&) = delete;

    Application& create_app(const HookTable* hooks);

    // Routes one call per the hook table: ErrorStub raises, Trampoline runs
    // the plain behavior, StrategyHook runs the bound strategy template.
    void invoke(Application& app, const RoutineCall& call);

    // Typed wrappers over invoke() with the canonical symbol names.
    void launch_kernel(Application& app, KernelId kernel, GridShape grid, ArgView args,
                       StreamId stream = -1);
    void mem_copy(Application& app, CopySpec copy, StreamId stream = -1);
    void launch_host_func(Application& app, std::function<void()> fn, StreamId stream = -1);
    void device_synchronize(Application& app);
    void stream_synchronize(Application& app, StreamId stream);
    void event_record(Application& app, StreamId stream = -1);
    void register_kernel(Application& app, KernelId kernel, const std::string& name,
                         const ArgLayout& layout);

    // Plain behavior of a call, bypassing the hook table. Strategy hooks use
    // these to enqueue the operations they guard.
    OpId base_enqueue_kernel(Application& app, const RoutineCall& call, int issue_index,
                             StreamId stream_override = -1,
                             const std::vector<std::byte>* payload_override = nullptr);
    OpId base_enqueue_copy(Application& app, const RoutineCall& call, int issue_index,
                           StreamId stream_override = -1);

    StreamId resolve_stream(const Application& app, StreamId stream) const;

    Gpu& gpu() { return gpu_; }
    GpuLock& lock() { return lock_; }
    const std::vector<std::unique_ptr<Application>>& apps() const { return apps_; }

private:
    void run_trampoline(Application& app, const RoutineCall& call, int issue_index);

    Gpu& gpu_;
    GpuLock& lock_;
    std::vector<std::unique_ptr<Application>> apps_;
};

// Checks a launch grid, throwing GridError with the offending values.
void validate_grid(const GridShape& grid);

}  // namespace cook
