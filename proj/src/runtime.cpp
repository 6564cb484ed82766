#include "cook/runtime.hpp"

#include <map>

#include "cook/strategies.hpp"

namespace cook {

Application::Application() = default;
Application::~Application() = default;

void validate_grid(const GridShape& grid) {
    if (grid.blocks < 1)
        throw GridError("kernel launched with " + std::to_string(grid.blocks) + " blocks");
    if (grid.threads_per_block < 1 || grid.threads_per_block > kMaxThreadsPerBlock)
        throw GridError("kernel launched with " + std::to_string(grid.threads_per_block) +
                        " threads per block (allowed: 1.." +
                        std::to_string(kMaxThreadsPerBlock) + ")");
}

SymbolCategory classify_symbol(const std::string& symbol) {
    static const std::map<std::string, SymbolCategory> table = {
        {"cudaLaunchKernel", SymbolCategory::Launch},
        {"cudaLaunchCooperativeKernel", SymbolCategory::Launch},
        {"cudaMemcpy", SymbolCategory::Copy},
        {"cudaMemcpyAsync", SymbolCategory::Copy},
        {"cudaMemcpy2DAsync", SymbolCategory::Copy},
        {"cudaMemcpyToSymbolAsync", SymbolCategory::Copy},
        {"cudaMemcpyFromSymbolAsync", SymbolCategory::Copy},
        {"cudaMemcpyPeerAsync", SymbolCategory::Copy},
        {"cudaLaunchHostFunc", SymbolCategory::HostFunc},
        {"cudaDeviceSynchronize", SymbolCategory::DeviceSync},
        {"cudaStreamSynchronize", SymbolCategory::StreamSync},
        {"cudaEventSynchronize", SymbolCategory::DeviceSync},
        {"cudaEventRecord", SymbolCategory::EventRecord},
        {"__cudaRegisterFunction", SymbolCategory::Register},
    };
    auto it = table.find(symbol);
    return it == table.end() ? SymbolCategory::Benign : it->second;
}

Application& MockRuntime::create_app(const HookTable* hooks) {
    auto app = std::make_unique<Application>();
    app->id = static_cast<AppId>(apps_.size());
    app->hooks = hooks;
    app->default_stream = gpu_.create_stream(app->id);
    apps_.push_back(std::move(app));
    return *apps_.back();
}

StreamId MockRuntime::resolve_stream(const Application& app, StreamId stream) const {
    return stream < 0 ? app.default_stream : stream;
}

void MockRuntime::invoke(Application& app, const RoutineCall& call) {
    if (!app.hooks) throw ConfigError("application has no hook table installed");
    const HookEntry* entry = app.hooks->find(call.symbol);
    if (!entry)
        throw UnhookedSymbolError(call.symbol);
    int issue_index = app.next_issue_index++;
    Cycles t_call = gpu_.now();

    switch (entry->behavior) {
        case HookBehavior::ErrorStub:
            throw UnhookedSymbolError(call.symbol);
        case HookBehavior::Trampoline:
            run_trampoline(app, call, issue_index);
            break;
        case HookBehavior::StrategyHook:
            run_strategy_hook(entry->template_id, *this, app, call, issue_index);
            break;
    }

    HostCallRecord rec;
    rec.symbol = call.symbol;
    rec.issue_index = issue_index;
    rec.t_call = t_call;
    rec.t_return = gpu_.now();
    app.call_log.push_back(std::move(rec));
}

void MockRuntime::run_trampoline(Application& app, const RoutineCall& call,
                                 int issue_index) {
    switch (classify_symbol(call.symbol)) {
        case SymbolCategory::Launch:
            base_enqueue_kernel(app, call, issue_index);
            break;
        case SymbolCategory::Copy:
            base_enqueue_copy(app, call, issue_index);
            break;
        case SymbolCategory::HostFunc:
            gpu_.enqueue_callback(app.id, resolve_stream(app, call.stream), call.host_fn,
                                  issue_index);
            break;
        case SymbolCategory::DeviceSync:
            gpu_.sync_app(app.id);
            break;
        case SymbolCategory::StreamSync:
            gpu_.sync_stream(resolve_stream(app, call.stream));
            break;
        case SymbolCategory::EventRecord:
            gpu_.enqueue_marker(app.id, resolve_stream(app, call.stream), issue_index);
            break;
        case SymbolCategory::Register:
            app.registry.add(call.kernel, call.reg_name, call.reg_layout);
            break;
        case SymbolCategory::Benign:
            break;
    }
}

OpId MockRuntime::base_enqueue_kernel(Application& app, const RoutineCall& call,
                                      int issue_index, StreamId stream_override,
                                      const std::vector<std::byte>* payload_override) {
    validate_grid(call.grid);
    std::vector<std::byte> payload =
        payload_override ? *payload_override : decode_arg_blob(call.args);
    StreamId stream =
        stream_override >= 0 ? stream_override : resolve_stream(app, call.stream);
    return gpu_.enqueue_kernel(app.id, stream, call.kernel, call.grid, std::move(payload),
                               issue_index);
}

OpId MockRuntime::base_enqueue_copy(Application& app, const RoutineCall& call,
                                    int issue_index, StreamId stream_override) {
    StreamId stream =
        stream_override >= 0 ? stream_override : resolve_stream(app, call.stream);
    return gpu_.enqueue_copy(app.id, stream, call.copy, issue_index);
}

void MockRuntime::launch_kernel(Application& app, KernelId kernel, GridShape grid,
                                ArgView args, StreamId stream) {
    RoutineCall call;
    call.symbol = "cudaLaunchKernel";
    call.kind = RoutineKind::KernelLaunch;
    call.kernel = kernel;
    call.grid = grid;
    call.args = args;
    call.stream = stream;
    invoke(app, call);
}

void MockRuntime::mem_copy(Application& app, CopySpec copy, StreamId stream) {
    RoutineCall call;
    call.symbol = "cudaMemcpyAsync";
    call.kind = RoutineKind::MemCopy;
    call.copy = copy;
    call.stream = stream;
    invoke(app, call);
}

void MockRuntime::launch_host_func(Application& app, std::function<void()> fn,
                                   StreamId stream) {
    RoutineCall call;
    call.symbol = "cudaLaunchHostFunc";
    call.kind = RoutineKind::HostCallback;
    call.host_fn = std::move(fn);
    call.stream = stream;
    invoke(app, call);
}

void MockRuntime::device_synchronize(Application& app) {
    RoutineCall call;
    call.symbol = "cudaDeviceSynchronize";
    call.kind = RoutineKind::DeviceSync;
    invoke(app, call);
}

void MockRuntime::stream_synchronize(Application& app, StreamId stream) {
    RoutineCall call;
    call.symbol = "cudaStreamSynchronize";
    call.kind = RoutineKind::StreamSync;
    call.stream = stream;
    invoke(app, call);
}

void MockRuntime::event_record(Application& app, StreamId stream) {
    RoutineCall call;
    call.symbol = "cudaEventRecord";
    call.kind = RoutineKind::Other;
    call.stream = stream;
    invoke(app, call);
}

void MockRuntime::register_kernel(Application& app, KernelId kernel,
                                  const std::string& name, const ArgLayout& layout) {
    RoutineCall call;
    call.symbol = "__cudaRegisterFunction";
    call.kind = RoutineKind::Other;
    call.kernel = kernel;
    call.reg_name = name;
    call.reg_layout = layout;
    invoke(app, call);
}

}  // namespace cook
