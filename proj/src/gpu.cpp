#include "cook/gpu.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cook {

const char* to_string(RoutineKind k) {
    switch (k) {
        case RoutineKind::KernelLaunch: return "kernel-launch";
        case RoutineKind::MemCopy: return "mem-copy";
        case RoutineKind::HostCallback: return "host-callback";
        case RoutineKind::DeviceSync: return "device-sync";
        case RoutineKind::StreamSync: return "stream-sync";
        case RoutineKind::Other: return "other";
    }
    return "?";
}

void GpuSpec::validate() const {
    if (sm_count < 1) throw ConfigError("sm_count must be at least 1");
    if (max_blocks_per_sm < 1) throw ConfigError("max_blocks_per_sm must be at least 1");
}

void TimingParams::validate() const {
    if (block_base_cycles < 1) throw ConfigError("block_base_cycles must be positive");
    if (copy_cycles_per_byte <= 0.0) throw ConfigError("copy_cycles_per_byte must be positive");
    if (context_switch_cycles < 1) throw ConfigError("context_switch_cycles must be positive");
    if (cold_penalty_factor < 1.0) throw ConfigError("cold_penalty_factor must be at least 1.0");
    if (callback_host_cycles < 1) throw ConfigError("callback_host_cycles must be positive");
    if (timeslice_cycles < 1) throw ConfigError("timeslice_cycles must be positive");
    if (jitter_pct < 0.0 || jitter_pct >= 0.5)
        throw ConfigError("jitter_pct must lie in [0, 0.5)");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

EngineConfig parse_timing_config(const std::string& text) {
    EngineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("timing config line " + std::to_string(lineno) +
                              " is not a key = value pair: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "sm_count") cfg.spec.sm_count = std::stoi(val);
            else if (key == "max_blocks_per_sm") cfg.spec.max_blocks_per_sm = std::stoi(val);
            else if (key == "block_base_cycles") cfg.timing.block_base_cycles = std::stoull(val);
            else if (key == "copy_cycles_per_byte") cfg.timing.copy_cycles_per_byte = std::stod(val);
            else if (key == "context_switch_cycles") cfg.timing.context_switch_cycles = std::stoull(val);
            else if (key == "cold_penalty_factor") cfg.timing.cold_penalty_factor = std::stod(val);
            else if (key == "callback_host_cycles") cfg.timing.callback_host_cycles = std::stoull(val);
            else if (key == "timeslice_cycles") cfg.timing.timeslice_cycles = std::stoull(val);
            else if (key == "jitter_pct") cfg.timing.jitter_pct = std::stod(val);
            else throw ConfigError("unknown timing config key: " + key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad value for " + key + ": " + val);
        }
    }
    cfg.spec.validate();
    cfg.timing.validate();
    return cfg;
}

EngineConfig load_timing_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read timing config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_timing_config(ss.str());
}

int waves(int blocks, const GpuSpec& spec) {
    int cap = spec.capacity();
    return (blocks + cap - 1) / cap;
}

Cycles kernel_duration(Cycles base_cycles, int blocks, const GpuSpec& spec,
                       bool cold, double cold_penalty_factor, double jitter_mult) {
    double per_block = static_cast<double>(base_cycles) *
                       (cold ? cold_penalty_factor : 1.0) * jitter_mult;
    return static_cast<Cycles>(waves(blocks, spec)) *
           static_cast<Cycles>(std::llround(per_block));
}

Gpu::Gpu(Sim& sim, const GpuSpec& spec, const TimingParams& timing, std::uint64_t seed)
    : sim_(sim), spec_(spec), timing_(timing), rng_(seed) {
    spec_.validate();
    timing_.validate();
    sm_resident_.assign(static_cast<std::size_t>(spec_.sm_count), 0);
}

// Tears down every simulation process (including callback runners whose
// bodies point back into this object) before the engine state goes away.
Gpu::~Gpu() { sim_.shutdown(); }

StreamId Gpu::create_stream(AppId app) {
    StreamId id = static_cast<StreamId>(streams_.size());
    StreamState st;
    st.id = id;
    st.app = app;
    streams_.push_back(std::move(st));
    ctx(app).streams.push_back(id);
    return id;
}

Gpu::CtxState& Gpu::ctx(AppId app) { return ctxs_[app]; }

OpId Gpu::enqueue(Op op, int issue_index, std::uint64_t args_hash) {
    assert(op.stream >= 0 && op.stream < static_cast<StreamId>(streams_.size()));
    assert(streams_[static_cast<std::size_t>(op.stream)].app == op.app);
    OpId id = static_cast<OpId>(ops_.size());
    op.id = id;

    OpRecord rec;
    rec.id = id;
    rec.app = op.app;
    rec.kind = static_cast<int>(op.kind);
    rec.kernel = op.kernel;
    rec.issue_index = issue_index;
    rec.stream = op.stream;
    rec.enqueue = sim_.now();
    rec.args_hash = args_hash;
    records_.push_back(rec);

    auto& st = streams_[static_cast<std::size_t>(op.stream)];
    st.fifo.push_back(id);
    st.last_enqueued = id;
    auto& c = ctx(op.app);
    c.last_enqueued = id;
    c.outstanding += 1;
    ops_.push_back(std::move(op));
    reschedule();
    return id;
}

OpId Gpu::enqueue_kernel(AppId app, StreamId stream, KernelId kernel, GridShape grid,
                         std::vector<std::byte> args, int issue_index) {
    assert(grid.valid());
    Op op;
    op.app = app;
    op.stream = stream;
    op.kind = RoutineKind::KernelLaunch;
    op.kernel = kernel;
    op.grid = grid;
    std::uint64_t h = hash_bytes(args.data(), args.size());
    op.args = std::move(args);
    return enqueue(std::move(op), issue_index, h);
}

OpId Gpu::enqueue_copy(AppId app, StreamId stream, CopySpec copy, int issue_index) {
    Op op;
    op.app = app;
    op.stream = stream;
    op.kind = RoutineKind::MemCopy;
    op.copy = copy;
    return enqueue(std::move(op), issue_index, 0);
}

OpId Gpu::enqueue_callback(AppId app, StreamId stream, std::function<void()> fn,
                           int issue_index) {
    Op op;
    op.app = app;
    op.stream = stream;
    op.kind = RoutineKind::HostCallback;
    op.host_fn = std::move(fn);
    return enqueue(std::move(op), issue_index, 0);
}

OpId Gpu::enqueue_marker(AppId app, StreamId stream, int issue_index) {
    Op op;
    op.app = app;
    op.stream = stream;
    op.kind = RoutineKind::Other;
    return enqueue(std::move(op), issue_index, 0);
}

void Gpu::sync_stream(StreamId stream) {
    Process* p = Sim::current();
    assert(p && "sync_stream must be called from a simulation process");
    auto& st = streams_[static_cast<std::size_t>(stream)];
    OpId threshold = st.last_enqueued;
    if (threshold < 0 || ops_[static_cast<std::size_t>(threshold)].complete) return;
    SyncWaiter w;
    w.proc = p;
    w.stream = stream;
    w.threshold = threshold;
    waiters_.push_back(w);
    sim_.park();
}

void Gpu::sync_app(AppId app) {
    Process* p = Sim::current();
    assert(p && "sync_app must be called from a simulation process");
    auto& c = ctx(app);
    if (c.outstanding == 0) return;
    SyncWaiter w;
    w.proc = p;
    w.app = app;
    w.threshold = c.last_enqueued;
    w.remaining = c.outstanding;
    waiters_.push_back(w);
    sim_.park();
}

bool Gpu::op_complete(OpId id) const {
    return ops_[static_cast<std::size_t>(id)].complete;
}

bool Gpu::app_idle(AppId app) const {
    auto it = ctxs_.find(app);
    return it == ctxs_.end() || it->second.outstanding == 0;
}

void Gpu::set_kernel_base_cycles(KernelId kernel, Cycles cycles) {
    if (cycles < 1) throw ConfigError("kernel base cycles must be positive");
    kernel_base_[kernel] = cycles;
}

Cycles Gpu::kernel_base_cycles(KernelId kernel) const {
    auto it = kernel_base_.find(kernel);
    return it == kernel_base_.end() ? timing_.block_base_cycles : it->second;
}

void Gpu::note_lock_event(AppId app, bool acquire) {
    TraceEvent ev;
    ev.app = app;
    ev.op = -1;
    ev.block = -1;
    ev.sm = -1;
    ev.start = sim_.now();
    ev.end = sim_.now();
    ev.kind = acquire ? EventKind::LockAcquire : EventKind::LockRelease;
    trace_.append(ev);
}

double Gpu::draw_jitter_mult() {
    double u = static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
    return 1.0 + timing_.jitter_pct * (2.0 * u - 1.0);
}

void Gpu::reschedule() {
    dispatch_host_side();
    dispatch_gpu_side();
}

// Host callbacks and marker ops run as soon as they reach the head of their
// stream; they do not need the GPU context and never pay switch costs.
void Gpu::dispatch_host_side() {
    for (std::size_t i = 0; i < streams_.size(); ++i) {
        auto& st = streams_[i];
        if (st.fifo.empty()) continue;
        OpId head = st.fifo.front();
        Op& op = ops_[static_cast<std::size_t>(head)];
        if (op.dispatched) continue;
        if (op.kind == RoutineKind::HostCallback) {
            op.dispatched = true;
            op.start = sim_.now();
            records_[static_cast<std::size_t>(head)].start = op.start;
            run_callback(st);
        } else if (op.kind == RoutineKind::Other) {
            op.dispatched = true;
            op.start = sim_.now();
            records_[static_cast<std::size_t>(head)].start = op.start;
            sim_.schedule(sim_.now(), [this, head] {
                Op& o = ops_[static_cast<std::size_t>(head)];
                TraceEvent ev;
                ev.app = o.app;
                ev.op = head;
                ev.block = 0;
                ev.sm = -1;
                ev.start = o.start;
                ev.end = sim_.now();
                ev.kind = EventKind::BlockExec;
                trace_.append(ev);
                complete_op(head);
            });
        }
    }
}

bool Gpu::has_dispatchable(AppId app) const {
    auto it = ctxs_.find(app);
    if (it == ctxs_.end()) return false;
    for (StreamId sid : it->second.streams) {
        const auto& st = streams_[static_cast<std::size_t>(sid)];
        if (st.fifo.empty()) continue;
        const Op& op = ops_[static_cast<std::size_t>(st.fifo.front())];
        if (!op.dispatched &&
            (op.kind == RoutineKind::KernelLaunch || op.kind == RoutineKind::MemCopy))
            return true;
    }
    return false;
}

std::optional<AppId> Gpu::next_candidate_after(AppId from) const {
    // Round-robin over contexts in app-id order, starting just past `from`.
    std::vector<AppId> ids;
    ids.reserve(ctxs_.size());
    for (const auto& [id, _] : ctxs_) ids.push_back(id);
    if (ids.empty()) return std::nullopt;
    std::size_t start = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] > from) {
            start = i;
            break;
        }
        if (i + 1 == ids.size()) start = 0;  // wrapped
    }
    for (std::size_t k = 0; k < ids.size(); ++k) {
        AppId cand = ids[(start + k) % ids.size()];
        if (cand != from && has_dispatchable(cand)) return cand;
    }
    return std::nullopt;
}

void Gpu::begin_switch(AppId target) {
    assert(!switching_);
    assert(placement_queue_.empty());
    switching_ = true;
    Cycles t0 = sim_.now();
    Cycles t1 = t0 + timing_.context_switch_cycles;
    TraceEvent ev;
    ev.app = target;
    ev.op = -1;
    ev.block = -1;
    ev.sm = -1;
    ev.start = t0;
    ev.end = t1;
    ev.kind = EventKind::ContextSwitch;
    trace_.append(ev);
    sim_.schedule(t1, [this, target] {
        switching_ = false;
        active_ = target;
        activation_time_ = sim_.now();
        pending_cold_ = true;
        reschedule();
    });
}

void Gpu::dispatch_gpu_side() {
    if (switching_) return;
    if (active_ < 0) {
        if (auto target = next_candidate_after(-1)) begin_switch(*target);
        return;
    }
    auto& ac = ctx(active_);
    bool expired = sim_.now() - activation_time_ >= timing_.timeslice_cycles;
    auto next = next_candidate_after(active_);
    bool yield = next.has_value() && (expired || !has_dispatchable(active_));
    if (yield) {
        // Running operations are black boxes: drain them, then swap.
        if (ac.inflight == 0) begin_switch(*next);
        return;
    }
    for (StreamId sid : ac.streams) {
        auto& st = streams_[static_cast<std::size_t>(sid)];
        if (st.fifo.empty()) continue;
        OpId head = st.fifo.front();
        Op& op = ops_[static_cast<std::size_t>(head)];
        if (op.dispatched) continue;
        if (op.kind == RoutineKind::KernelLaunch && !ac.copy_inflight) {
            dispatch_kernel(op);
        } else if (op.kind == RoutineKind::MemCopy && ac.inflight == 0) {
            dispatch_copy(op);
        }
    }
}

void Gpu::dispatch_kernel(Op& op) {
    bool cold = pending_cold_;
    pending_cold_ = false;
    double j = draw_jitter_mult();
    double per_block = static_cast<double>(kernel_base_cycles(op.kernel)) *
                       (cold ? timing_.cold_penalty_factor : 1.0) * j;
    op.block_cycles = static_cast<Cycles>(std::llround(per_block));
    op.dispatched = true;
    op.start = sim_.now();
    records_[static_cast<std::size_t>(op.id)].start = op.start;
    op.blocks_unplaced = op.grid.blocks;
    placement_queue_.push_back(op.id);
    place_pending_blocks();
}

void Gpu::dispatch_copy(Op& op) {
    op.dispatched = true;
    op.start = sim_.now();
    records_[static_cast<std::size_t>(op.id)].start = op.start;
    Cycles dur = static_cast<Cycles>(std::llround(
        static_cast<double>(op.copy.size_bytes) * timing_.copy_cycles_per_byte));
    auto& c = ctx(op.app);
    c.inflight += 1;
    c.copy_inflight = true;
    OpId id = op.id;
    sim_.schedule(sim_.now() + dur, [this, id] {
        Op& o = ops_[static_cast<std::size_t>(id)];
        auto& cc = ctx(o.app);
        cc.inflight -= 1;
        cc.copy_inflight = false;
        TraceEvent ev;
        ev.app = o.app;
        ev.op = id;
        ev.block = 0;
        ev.sm = -1;
        ev.start = o.start;
        ev.end = sim_.now();
        ev.kind = EventKind::BlockExec;
        trace_.append(ev);
        complete_op(id);
    });
}

void Gpu::place_pending_blocks() {
    while (!placement_queue_.empty()) {
        OpId id = placement_queue_.front();
        Op& op = ops_[static_cast<std::size_t>(id)];
        while (op.blocks_unplaced > 0) {
            int best = -1;
            for (int s = 0; s < spec_.sm_count; ++s) {
                if (sm_resident_[static_cast<std::size_t>(s)] >= spec_.max_blocks_per_sm)
                    continue;
                if (best < 0 || sm_resident_[static_cast<std::size_t>(s)] <
                                    sm_resident_[static_cast<std::size_t>(best)])
                    best = s;
            }
            if (best < 0) return;  // all SMs full; resume on block completion
            sm_resident_[static_cast<std::size_t>(best)] += 1;
            ctx(op.app).inflight += 1;
            op.blocks_running += 1;
            int bidx = op.grid.blocks - op.blocks_unplaced;
            op.blocks_unplaced -= 1;
            Cycles started = sim_.now();
            sim_.schedule(started + op.block_cycles, [this, id, bidx, best, started] {
                on_block_complete(id, bidx, best, started);
            });
        }
        placement_queue_.pop_front();
    }
}

void Gpu::on_block_complete(OpId id, int block, int sm, Cycles started) {
    Op& op = ops_[static_cast<std::size_t>(id)];
    sm_resident_[static_cast<std::size_t>(sm)] -= 1;
    op.blocks_running -= 1;
    ctx(op.app).inflight -= 1;
    TraceEvent ev;
    ev.app = op.app;
    ev.op = id;
    ev.block = block;
    ev.sm = sm;
    ev.start = started;
    ev.end = sim_.now();
    ev.kind = EventKind::BlockExec;
    trace_.append(ev);
    if (op.blocks_unplaced == 0 && op.blocks_running == 0) {
        complete_op(id);
    } else {
        place_pending_blocks();
    }
}

void Gpu::complete_op(OpId id) {
    Op& op = ops_[static_cast<std::size_t>(id)];
    assert(!op.complete);
    op.complete = true;
    auto& rec = records_[static_cast<std::size_t>(id)];
    rec.start = op.start;
    rec.end = sim_.now();
    rec.completion_seq = completion_seq_++;

    auto& st = streams_[static_cast<std::size_t>(op.stream)];
    assert(!st.fifo.empty() && st.fifo.front() == id);
    st.fifo.pop_front();
    ctx(op.app).outstanding -= 1;

    // Release host contexts whose sync condition is now met.
    std::vector<Process*> to_wake;
    for (auto& w : waiters_) {
        if (!w.proc) continue;
        if (w.stream >= 0) {
            if (w.stream == op.stream && w.threshold == id) {
                to_wake.push_back(w.proc);
                w.proc = nullptr;
            }
        } else if (w.app == op.app && id <= w.threshold) {
            if (--w.remaining == 0) {
                to_wake.push_back(w.proc);
                w.proc = nullptr;
            }
        }
    }
    waiters_.erase(std::remove_if(waiters_.begin(), waiters_.end(),
                                  [](const SyncWaiter& w) { return w.proc == nullptr; }),
                   waiters_.end());
    for (Process* p : to_wake) sim_.wake(p);

    reschedule();
}

void Gpu::run_callback(StreamState& st) {
    StreamId sid = st.id;
    assert(!st.runner_slot.has_value());
    st.runner_slot = st.fifo.front();
    if (st.runner == nullptr) {
        // One persistent runner per stream. A callback that blocks (say, on
        // the GPU lock) stalls exactly its own stream; other streams keep
        // their own runners.
        st.runner = sim_.spawn(
            "cb-runner/s" + std::to_string(sid),
            [this, sid] {
                for (;;) {
                    if (!streams_[static_cast<std::size_t>(sid)].runner_slot.has_value()) {
                        sim_.park();
                        continue;
                    }
                    OpId id = *streams_[static_cast<std::size_t>(sid)].runner_slot;
                    streams_[static_cast<std::size_t>(sid)].runner_slot.reset();
                    // The callback may park this process (lock waits), so no
                    // references into engine state may be held across it.
                    ops_[static_cast<std::size_t>(id)].host_fn();
                    Cycles started = ops_[static_cast<std::size_t>(id)].start;
                    sim_.schedule(sim_.now() + timing_.callback_host_cycles,
                                  [this, id, started] {
                                      Op& o = ops_[static_cast<std::size_t>(id)];
                                      TraceEvent ev;
                                      ev.app = o.app;
                                      ev.op = id;
                                      ev.block = 0;
                                      ev.sm = -1;
                                      ev.start = started;
                                      ev.end = sim_.now();
                                      ev.kind = EventKind::Callback;
                                      trace_.append(ev);
                                      complete_op(id);
                                  });
                }
            },
            /*daemon=*/true);
    } else {
        sim_.wake(st.runner);
    }
}

}  // namespace cook
