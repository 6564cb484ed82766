#include "cook/workloads.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <utility>

#include "cook/assets.hpp"
#include "cook/lock.hpp"
#include "cook/runtime.hpp"
#include "cook/strategies.hpp"
#include "cook/toolchain.hpp"

namespace cook {
namespace workloads {

const char* to_string(Bench b) {
    switch (b) {
        case Bench::MmultLike: return "mmult";
        case Bench::DnaLike: return "dna";
    }
    return "?";
}

const char* to_string(Isol i) {
    switch (i) {
        case Isol::Isolation: return "isolation";
        case Isol::Parallel: return "parallel";
    }
    return "?";
}

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::None: return "none";
        case Strategy::Callback: return "callback";
        case Strategy::Synced: return "synced";
        case Strategy::Worker: return "worker";
    }
    return "?";
}

Bench bench_from_string(const std::string& s) {
    if (s == "mmult") return Bench::MmultLike;
    if (s == "dna") return Bench::DnaLike;
    throw ConfigError("unknown benchmark '" + s + "' (expected mmult or dna)");
}

Isol isol_from_string(const std::string& s) {
    if (s == "isolation") return Isol::Isolation;
    if (s == "parallel") return Isol::Parallel;
    throw ConfigError("unknown isolation mode '" + s + "' (expected isolation or parallel)");
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "none") return Strategy::None;
    if (s == "callback") return Strategy::Callback;
    if (s == "synced") return Strategy::Synced;
    if (s == "worker") return Strategy::Worker;
    throw ConfigError("unknown strategy '" + s +
                      "' (expected none, callback, synced or worker)");
}

// ---------------------------------------------------------------------------
// Kernel identities
// ---------------------------------------------------------------------------

const KernelDef& mmult_kernel_def() {
    static const KernelDef def{100, "mmult_kernel", 25000, ArgLayout{{4, 4, 4}}};
    return def;
}

const std::vector<KernelDef>& dna_kernel_defs() {
    static const std::vector<KernelDef> defs = {
        {200, "dna_embed", 1200, ArgLayout{{8}}},
        {201, "dna_conv_a", 3500, ArgLayout{{4, 4, 8}}},
        {202, "dna_conv_b", 2800, ArgLayout{{4, 4, 8}}},
        {203, "dna_gemm", 2500, ArgLayout{{4, 4, 4, 8}}},
        {204, "dna_pool", 1500, ArgLayout{{4, 4}}},
        {205, "dna_softmax", 1400, ArgLayout{{4, 8}}},
    };
    return defs;
}

const KernelDef* find_kernel_def(KernelId id) {
    if (id == mmult_kernel_def().id) return &mmult_kernel_def();
    for (const auto& def : dna_kernel_defs())
        if (def.id == id) return &def;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Seeds and payloads
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

namespace {

std::vector<std::byte> random_payload(std::mt19937_64& rng, std::size_t size) {
    std::vector<std::byte> out(size);
    std::size_t i = 0;
    while (i < size) {
        std::uint64_t v = rng();
        for (int b = 0; b < 8 && i < size; ++b, ++i)
            out[i] = static_cast<std::byte>((v >> (8 * b)) & 0xff);
    }
    return out;
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b)
        out.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xff));
}

}  // namespace

std::vector<std::byte> mmult_payload() {
    // Matrix dimensions m, n, k — fixed for every launch of every instance.
    std::vector<std::byte> out;
    put_u32(out, 512);
    put_u32(out, 512);
    put_u32(out, 512);
    return out;
}

// ---------------------------------------------------------------------------
// Plan generators
// ---------------------------------------------------------------------------

InferencePlan gen_mmult_workload(std::uint64_t /*seed*/) {
    InferencePlan plan;
    Burst burst;
    burst.calls.reserve(300);
    for (int i = 0; i < 300; ++i) {
        BurstCall c;
        c.kind = RoutineKind::KernelLaunch;
        c.kernel = mmult_kernel_def().id;
        c.grid = GridShape{200, 256};
        burst.calls.push_back(c);
    }
    burst.barrier = true;
    plan.bursts.push_back(std::move(burst));
    return plan;
}

InferencePlan gen_dna_inference(std::uint64_t seed, int inference_index) {
    std::mt19937_64 rng(mix_seed(seed, 0xD7A0,
                                 static_cast<std::uint64_t>(inference_index)));
    const auto& defs = dna_kernel_defs();

    InferencePlan plan;
    const int n_bursts = 2 + static_cast<int>(rng() % 3);  // 2..4
    for (int b = 0; b < n_bursts; ++b) {
        Burst burst;
        const int n_calls = 30 + static_cast<int>(rng() % 51);  // 30..80
        burst.calls.reserve(static_cast<std::size_t>(n_calls));
        for (int i = 0; i < n_calls; ++i) {
            BurstCall c;
            const std::uint64_t roll = rng() % 10;
            if (roll < 7) {
                c.kind = RoutineKind::KernelLaunch;
                c.kernel = defs[rng() % defs.size()].id;
                c.grid.blocks = 4 + static_cast<int>(rng() % 61);  // 4..64
                c.grid.threads_per_block = (rng() % 2) ? 256 : 128;
            } else if (roll < 9) {
                c.kind = RoutineKind::MemCopy;
                c.copy.size_bytes = std::size_t{1024} << (rng() % 8);  // 1KB..128KB
                c.copy.dir = (rng() % 2) ? CopyDir::DeviceToHost : CopyDir::HostToDevice;
            } else {
                c.kind = RoutineKind::Other;  // event-record marker
            }
            burst.calls.push_back(c);
        }
        burst.barrier = true;
        plan.bursts.push_back(std::move(burst));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Run harness
// ---------------------------------------------------------------------------

namespace {

toolchain::HookBundle make_bundle(Strategy s) {
    const std::string name = to_string(s);
    return toolchain::generate_all(assets::text("interface/runtime_api.txt"),
                                   assets::text("interface/exports.txt"),
                                   assets::builtin_config(name),
                                   assets::builtin_templates(name));
}

void register_workload_kernels(MockRuntime& rt, Application& app) {
    const auto& m = mmult_kernel_def();
    rt.register_kernel(app, m.id, m.name, m.layout);
    for (const auto& def : dna_kernel_defs())
        rt.register_kernel(app, def.id, def.name, def.layout);
}

void set_calibration(Gpu& gpu) {
    gpu.set_kernel_base_cycles(mmult_kernel_def().id, mmult_kernel_def().base_cycles);
    for (const auto& def : dna_kernel_defs())
        gpu.set_kernel_base_cycles(def.id, def.base_cycles);
}

// Issues one plan, drawing launch payloads from `payload_rng` in call order
// (or the fixed mmult payload when `fixed_payload` is set). Barrier marks
// land in `result`.
void issue_plan(MockRuntime& rt, Application& app, const InferencePlan& plan,
                std::mt19937_64& payload_rng, bool fixed_payload, AppResult& result) {
    for (const Burst& burst : plan.bursts) {
        for (const BurstCall& c : burst.calls) {
            switch (c.kind) {
                case RoutineKind::KernelLaunch: {
                    const KernelDef* def = find_kernel_def(c.kernel);
                    if (!def)
                        throw ConfigError("plan references unknown kernel id " +
                                          std::to_string(c.kernel));
                    std::vector<std::byte> payload =
                        fixed_payload
                            ? mmult_payload()
                            : random_payload(payload_rng, def->layout.total_size());
                    std::vector<std::byte> blob = encode_arg_blob(payload);
                    rt.launch_kernel(app, c.kernel, c.grid,
                                     ArgView{blob.data(), blob.size()});
                    break;
                }
                case RoutineKind::MemCopy:
                    rt.mem_copy(app, c.copy);
                    break;
                case RoutineKind::Other:
                    rt.event_record(app);
                    break;
                default:
                    throw ConfigError("plan contains an unsupported call kind");
            }
        }
        if (burst.barrier) {
            BarrierMark mark;
            mark.barrier_issue_index = app.next_issue_index;
            rt.device_synchronize(app);
            mark.t_return = rt.gpu().now();
            result.barriers.push_back(mark);
        }
    }
}

struct Harness {
    Sim sim;
    Gpu gpu;
    GpuLock lock;
    MockRuntime rt;
    std::map<std::string, toolchain::HookBundle> bundles;

    Harness(const EngineConfig& engine, std::uint64_t seed, std::uint64_t event_budget)
        : gpu(sim, engine.spec, engine.timing, mix_seed(seed, 0xC00C)),
          lock(gpu),
          rt(gpu, lock) {
        if (event_budget > 0) sim.set_event_budget(event_budget);
        set_calibration(gpu);
    }

    const HookTable* table_for(Strategy s) {
        const std::string name = to_string(s);
        auto it = bundles.find(name);
        if (it == bundles.end()) it = bundles.emplace(name, make_bundle(s)).first;
        return &it->second.table;
    }

    Application& add_app(Strategy s) {
        Application& app = rt.create_app(table_for(s));
        if (s == Strategy::Worker) start_worker(rt, app);
        return app;
    }

    RunResult collect(std::vector<AppResult> apps) {
        RunResult res;
        res.trace = gpu.trace();
        res.records = gpu.ops();
        res.apps = std::move(apps);
        for (const auto& r : res.records)
            if (r.completion_seq >= 0) res.makespan = std::max(res.makespan, r.end);
        res.events = sim.events_processed();
        return res;
    }
};

}  // namespace

RunResult run_configuration(const RunConfig& config) {
    if (config.parallel_instances < 1)
        throw ConfigError("parallel_instances must be at least 1");
    if (config.interval_cycles == 0)
        throw ConfigError("interval_cycles must be positive");

    Harness h(config.engine, config.seed, config.event_budget);
    const int n_apps = config.isol == Isol::Parallel ? config.parallel_instances : 1;

    std::vector<AppResult> results(static_cast<std::size_t>(n_apps));
    std::vector<Application*> apps;
    for (int i = 0; i < n_apps; ++i) {
        Application& app = h.add_app(config.strategy);
        results[static_cast<std::size_t>(i)].id = app.id;
        apps.push_back(&app);
    }

    const Cycles horizon = config.warmup_cycles + config.sample_cycles;
    for (int i = 0; i < n_apps; ++i) {
        Application* app = apps[static_cast<std::size_t>(i)];
        AppResult* result = &results[static_cast<std::size_t>(i)];
        auto body = [&h, app, result, &config, horizon] {
            register_workload_kernels(h.rt, *app);
            if (config.bench == Bench::MmultLike) {
                InferencePlan plan = gen_mmult_workload(config.seed);
                std::mt19937_64 rng(mix_seed(config.seed,
                                             static_cast<std::uint64_t>(app->id) + 1, 0));
                issue_plan(h.rt, *app, plan, rng, /*fixed_payload=*/true, *result);
                result->inference_completions.push_back(h.gpu.now());
                result->inferences_completed += 1;
            } else {
                int idx = 0;
                while (h.gpu.now() < horizon) {
                    InferencePlan plan = gen_dna_inference(config.seed, idx);
                    std::mt19937_64 rng(mix_seed(config.seed,
                                                 static_cast<std::uint64_t>(app->id) + 1,
                                                 0x1000 + static_cast<std::uint64_t>(idx)));
                    issue_plan(h.rt, *app, plan, rng, /*fixed_payload=*/false, *result);
                    result->inference_completions.push_back(h.gpu.now());
                    result->inferences_completed += 1;
                    ++idx;
                }
            }
            if (app->worker) request_worker_stop(h.rt, *app);
        };
        h.sim.spawn("app/" + std::to_string(app->id), std::move(body));
    }

    h.sim.run();
    return h.collect(std::move(results));
}

RunResult run_plans(const PlanRun& run) {
    if (run.strategies.empty())
        throw ConfigError("plan run needs at least one application");
    if (run.plans.size() != run.strategies.size())
        throw ConfigError("plan run needs one plan list per application");

    Harness h(run.engine, run.seed, run.event_budget);
    const int n_apps = static_cast<int>(run.strategies.size());

    std::vector<AppResult> results(static_cast<std::size_t>(n_apps));
    std::vector<Application*> apps;
    for (int i = 0; i < n_apps; ++i) {
        Application& app = h.add_app(run.strategies[static_cast<std::size_t>(i)]);
        results[static_cast<std::size_t>(i)].id = app.id;
        apps.push_back(&app);
    }

    for (int i = 0; i < n_apps; ++i) {
        Application* app = apps[static_cast<std::size_t>(i)];
        AppResult* result = &results[static_cast<std::size_t>(i)];
        const std::vector<InferencePlan>* plans = &run.plans[static_cast<std::size_t>(i)];
        const std::uint64_t seed = run.seed;
        auto body = [&h, app, result, plans, seed] {
            register_workload_kernels(h.rt, *app);
            for (std::size_t p = 0; p < plans->size(); ++p) {
                std::mt19937_64 rng(mix_seed(seed,
                                             static_cast<std::uint64_t>(app->id) + 1,
                                             0x2000 + p));
                issue_plan(h.rt, *app, (*plans)[p], rng, /*fixed_payload=*/false,
                           *result);
                result->inference_completions.push_back(h.gpu.now());
                result->inferences_completed += 1;
            }
            if (app->worker) request_worker_stop(h.rt, *app);
        };
        h.sim.spawn("app/" + std::to_string(app->id), std::move(body));
    }

    h.sim.run();
    return h.collect(std::move(results));
}

}  // namespace workloads
}  // namespace cook
