#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cook/types.hpp"

namespace cook {

enum class EventKind {
    BlockExec,       // one block (or the single unit of a copy / marker op)
    ContextSwitch,   // GPU switching active context; app is the incoming one
    LockAcquire,     // GPU lock granted to app
    LockRelease,     // GPU lock released by app
    Callback,        // host callback ran at the head of a stream
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

// One row of a run's chronogram. `op` is the operation instance the row
// belongs to, or -1 for rows that do not belong to an operation (context
// switches, lock events). Non-SM rows carry sm = -1.
struct TraceEvent {
    AppId app = -1;
    OpId op = -1;
    int block = 0;
    int sm = -1;
    Cycles start = 0;
    Cycles end = 0;
    EventKind kind = EventKind::BlockExec;
};

class Trace {
public:
    void append(const TraceEvent& ev) { events_.push_back(ev); }
    const std::vector<TraceEvent>& events() const { return events_; }
    bool empty() const { return events_.empty(); }
    std::size_t size() const { return events_.size(); }

    // CSV with the fixed header app,kernel,block,sm,start,end,kind, one row
    // per event in emission order. Emission order is deterministic, so the
    // bytes of this file are a fingerprint of the whole run.
    void write_csv(std::ostream& out) const;
    std::string to_csv() const;

    // Same rows as a JSON array of objects.
    void write_json(std::ostream& out) const;

    static Trace parse_csv(std::istream& in);

private:
    std::vector<TraceEvent> events_;
};

// Completion summary of one routine-call instance, recorded by the engine
// next to the raw trace. Metrics read these instead of re-deriving operation
// boundaries from block rows.
struct OpRecord {
    OpId id = -1;
    AppId app = -1;
    int kind = 0;             // RoutineKind as int, see runtime.hpp
    KernelId kernel = -1;     // kernel identity for launches, -1 otherwise
    int issue_index = -1;     // per-app position in issue order
    StreamId stream = -1;
    Cycles enqueue = 0;
    Cycles start = 0;
    Cycles end = 0;
    std::uint64_t args_hash = 0;
    std::int64_t completion_seq = -1;  // global completion order, -1 if open
};

// OpRecord round-trip in CSV form (fixed header), so reports can be
// recomputed from a run directory without rerunning the simulation.
void write_records_csv(const std::vector<OpRecord>& records, std::ostream& out);
std::string records_to_csv(const std::vector<OpRecord>& records);
std::vector<OpRecord> parse_records_csv(std::istream& in);

}  // namespace cook
