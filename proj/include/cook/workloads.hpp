#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cook/gpu.hpp"
#include "cook/trace.hpp"
#include "cook/types.hpp"

namespace cook {
namespace workloads {

enum class Bench { MmultLike, DnaLike };
enum class Isol { Isolation, Parallel };
enum class Strategy { None, Callback, Synced, Worker };

const char* to_string(Bench b);
const char* to_string(Isol i);
const char* to_string(Strategy s);
Bench bench_from_string(const std::string& s);        // "mmult" | "dna"
Isol isol_from_string(const std::string& s);          // "isolation" | "parallel"
Strategy strategy_from_string(const std::string& s);  // "none" | "callback" | ...

// One full benchmark run: which workload, how many mirrored instances, the
// access-control strategy guarding them, and the sampling windows (in
// simulated cycles; sampling starts when warmup ends).
struct RunConfig {
    Bench bench = Bench::MmultLike;
    Isol isol = Isol::Isolation;
    Strategy strategy = Strategy::None;
    std::uint64_t seed = 1;
    Cycles warmup_cycles = 3'000'000;
    Cycles sample_cycles = 6'000'000;
    Cycles interval_cycles = 1'000'000;  // the "1s" bucket of the rate metric
    int parallel_instances = 2;
    EngineConfig engine{};
    std::uint64_t event_budget = 0;  // 0 = unlimited
};

// One host-side call of a workload plan. Launch payloads are produced at
// issue time (size comes from the kernel's registered layout).
struct BurstCall {
    RoutineKind kind = RoutineKind::KernelLaunch;
    KernelId kernel = -1;
    GridShape grid{};
    CopySpec copy{};
};

struct Burst {
    std::vector<BurstCall> calls;
    bool barrier = true;  // blocking device sync after the last call
};

struct InferencePlan {
    std::vector<Burst> bursts;
};

// Fixed kernel identities the synthetic workloads register and launch.
struct KernelDef {
    KernelId id = -1;
    const char* name = "";
    Cycles base_cycles = 0;  // per-block cost, engine calibration override
    ArgLayout layout;
};

const KernelDef& mmult_kernel_def();
const std::vector<KernelDef>& dna_kernel_defs();
const KernelDef* find_kernel_def(KernelId id);

// Deterministic seed mixer for derived random streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

// The matrix-multiplication-shaped plan: one burst of 300 identical
// launches over fixed input dimensions, then a barrier. Seed-independent.
InferencePlan gen_mmult_workload(std::uint64_t seed);

// One inference of the model-serving-shaped plan: 2..4 bursts of 30..80
// mixed calls (roughly 70% launches, 20% copies, 10% marker ops), each
// burst barrier-terminated. The shape depends only on (seed, index), so
// mirrored instances issue identical call sequences.
InferencePlan gen_dna_inference(std::uint64_t seed, int inference_index);

// The fixed argument payload every mmult launch carries.
std::vector<std::byte> mmult_payload();

// What one application did during a run, as seen from the host side.
struct BarrierMark {
    int barrier_issue_index = -1;  // issue index of the blocking call itself
    Cycles t_return = 0;           // simulated time the barrier returned
};

struct AppResult {
    AppId id = -1;
    int inferences_completed = 0;
    std::vector<Cycles> inference_completions;  // barrier-return instants
    std::vector<BarrierMark> barriers;
};

struct RunResult {
    Trace trace;
    std::vector<OpRecord> records;
    std::vector<AppResult> apps;
    Cycles makespan = 0;        // over completed operations
    std::uint64_t events = 0;   // simulator events processed
};

// Builds the whole stack (simulator, engine, lock, runtime, hook tables),
// runs the configured benchmark to completion and returns its artifacts.
// mmult runs execute the plan exactly once per instance; dna runs repeat
// inferences until warmup+sample cycles have elapsed.
RunResult run_configuration(const RunConfig& config);

// Generic plan runner used by property tests: n applications, a strategy
// and a list of plans for each, every plan issued exactly once. Launch
// payloads are drawn per (seed, app, plan index).
struct PlanRun {
    std::vector<Strategy> strategies;              // one per application
    std::vector<std::vector<InferencePlan>> plans; // one list per application
    std::uint64_t seed = 1;
    EngineConfig engine{};
    std::uint64_t event_budget = 0;
};

RunResult run_plans(const PlanRun& run);

}  // namespace workloads
}  // namespace cook
