#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cook/sim.hpp"
#include "cook/trace.hpp"
#include "cook/types.hpp"

namespace cook {

// Routine-call taxonomy shared by the runtime layer and the engine. Sync
// kinds never become engine operations; they block the calling context
// instead.
enum class RoutineKind {
    KernelLaunch,
    MemCopy,
    HostCallback,
    DeviceSync,
    StreamSync,
    Other,  // stream-ordered marker ops (event records and the like)
};

const char* to_string(RoutineKind k);

struct GpuSpec {
    int sm_count = 8;
    int max_blocks_per_sm = 32;

    int capacity() const { return sm_count * max_blocks_per_sm; }
    void validate() const;
};

// Calibration constants of the timing model. The shipped defaults live in a
// timing config file; this struct's initializers mirror that file and a test
// keeps the two from drifting apart.
struct TimingParams {
    Cycles block_base_cycles = 25000;      // per-block cycles of a warm kernel
    double copy_cycles_per_byte = 0.05;
    Cycles context_switch_cycles = 10000;  // cost to swap the active context
    double cold_penalty_factor = 4.0;      // first kernel after a switch
    Cycles callback_host_cycles = 5000;    // host-callback overhead
    Cycles timeslice_cycles = 150000;      // alternation period under contention
    double jitter_pct = 0.03;              // kernel duration noise, +/- fraction

    void validate() const;
};

struct EngineConfig {
    GpuSpec spec;
    TimingParams timing;
};

// key = value lines, '#' comments. Unknown keys are rejected so that a typo
// in a calibration file fails loudly instead of silently running defaults.
EngineConfig parse_timing_config(const std::string& text);
EngineConfig load_timing_config(const std::string& path);

// Number of block waves a grid needs on a GPU with the given capacity.
int waves(int blocks, const GpuSpec& spec);

class Gpu;

// Predicts a kernel's duration from launch parameters and contention state:
// waves * per-block cycles, where the per-block cycles carry the cold
// penalty and the jitter multiplier. The engine's emitted trace matches this
// exactly; tests lean on that.
Cycles kernel_duration(Cycles base_cycles, int blocks, const GpuSpec& spec,
                       bool cold, double cold_penalty_factor, double jitter_mult);

// Block-granularity GPU timing engine.
//
// Streams are FIFO: an operation starts only after everything ahead of it in
// its stream completed. Kernel blocks go to the least-loaded SM (ties to the
// lowest index) and wait for residency when all SMs are at their block
// limit. Only one application's context is active at a time; when several
// contexts have pending kernels or copies the engine alternates between them
// every timeslice_cycles, charging context_switch_cycles per swap and
// running the first kernel after a swap cold. Host callbacks and marker ops
// bypass the context machinery: they run at the head of their stream
// regardless of which context owns the GPU.
class Gpu {
public:
    Gpu(Sim& sim, const GpuSpec& spec, const TimingParams& timing, std::uint64_t seed);
    ~Gpu();

    Gpu(const Gpu&) = delete;
    Gpu& operator=(const Gpu&) = delete;

    StreamId create_stream(AppId app);

    // Enqueue one operation at the tail of a stream. The grid must already
    // be validated; args are the payload bytes the operation will execute
    // with. Returns the operation instance id.
    OpId enqueue_kernel(AppId app, StreamId stream, KernelId kernel, GridShape grid,
                        std::vector<std::byte> args, int issue_index);
    OpId enqueue_copy(AppId app, StreamId stream, CopySpec copy, int issue_index);
    OpId enqueue_callback(AppId app, StreamId stream, std::function<void()> fn,
                          int issue_index);
    OpId enqueue_marker(AppId app, StreamId stream, int issue_index);

    // Block the calling process until every operation currently enqueued in
    // the stream (resp. by the app) has completed. Safe to call with nothing
    // outstanding.
    void sync_stream(StreamId stream);
    void sync_app(AppId app);

    bool op_complete(OpId id) const;
    bool app_idle(AppId app) const;

    // Per-kernel calibration override; kernels without one use
    // timing.block_base_cycles.
    void set_kernel_base_cycles(KernelId kernel, Cycles cycles);
    Cycles kernel_base_cycles(KernelId kernel) const;

    // Lock grant/release markers for the chronogram; called by GpuLock.
    void note_lock_event(AppId app, bool acquire);

    Cycles now() const { return sim_.now(); }
    Sim& sim() { return sim_; }
    const GpuSpec& spec() const { return spec_; }
    const TimingParams& timing() const { return timing_; }
    const Trace& trace() const { return trace_; }
    const std::vector<OpRecord>& ops() const { return records_; }

private:
    struct Op {
        OpId id = -1;
        AppId app = -1;
        StreamId stream = -1;
        RoutineKind kind = RoutineKind::Other;
        KernelId kernel = -1;
        GridShape grid{};
        std::vector<std::byte> args;
        CopySpec copy{};
        std::function<void()> host_fn;
        bool dispatched = false;
        bool complete = false;
        int blocks_unplaced = 0;
        int blocks_running = 0;
        Cycles block_cycles = 0;
        Cycles start = 0;
    };

    struct StreamState {
        StreamId id = -1;
        AppId app = -1;
        std::deque<OpId> fifo;
        OpId last_enqueued = -1;
        Process* runner = nullptr;       // lazily created host-callback runner
        std::optional<OpId> runner_slot; // callback handed to the runner
    };

    struct CtxState {
        std::vector<StreamId> streams;
        int inflight = 0;          // running blocks plus running copies
        bool copy_inflight = false;
        OpId last_enqueued = -1;
        int outstanding = 0;
    };

    struct SyncWaiter {
        Process* proc = nullptr;
        AppId app = -1;          // -1 for stream waiters
        StreamId stream = -1;    // -1 for app waiters
        OpId threshold = -1;
        int remaining = 0;       // open ops <= threshold (app waiters)
    };

    OpId enqueue(Op op, int issue_index, std::uint64_t args_hash);
    CtxState& ctx(AppId app);
    void reschedule();
    void dispatch_host_side();
    void dispatch_gpu_side();
    bool has_dispatchable(AppId app) const;
    std::optional<AppId> next_candidate_after(AppId from) const;
    void begin_switch(AppId target);
    void dispatch_kernel(Op& op);
    void dispatch_copy(Op& op);
    void place_pending_blocks();
    void on_block_complete(OpId id, int block, int sm, Cycles started);
    void complete_op(OpId id);
    void run_callback(StreamState& st);
    double draw_jitter_mult();

    Sim& sim_;
    GpuSpec spec_;
    TimingParams timing_;
    Trace trace_;
    std::vector<Op> ops_;
    std::vector<OpRecord> records_;
    std::vector<StreamState> streams_;
    std::map<AppId, CtxState> ctxs_;
    std::map<KernelId, Cycles> kernel_base_;
    std::vector<SyncWaiter> waiters_;
    std::vector<int> sm_resident_;
    std::deque<OpId> placement_queue_;  // dispatched kernels with unplaced blocks
    AppId active_ = -1;
    bool switching_ = false;
    bool pending_cold_ = false;
    Cycles activation_time_ = 0;
    std::int64_t completion_seq_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace cook
