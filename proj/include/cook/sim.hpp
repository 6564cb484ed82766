#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cook/errors.hpp"
#include "cook/types.hpp"

namespace cook {

// Discrete-event simulation core with cooperatively scheduled host contexts.
//
// Host-side code (application threads, worker loops, callback runners) runs
// on real OS threads, but at most one of them is ever released at a time:
// the event loop hands a thread the baton, and the thread hands it back when
// it parks on a simulated wait or finishes. Because every handoff is ordered
// by the (time, sequence) event key, a run is a pure function of its inputs,
// and two runs with the same seed produce identical traces down to the byte.
//
// Blocking is therefore cheap to express: runtime code called from inside a
// process just registers a wakeup and calls park(). Plain std::mutex would
// block the whole loop; never use one inside a process for simulated state.

class Sim;

class Process {
public:
    const std::string& name() const { return name_; }
    bool finished() const { return state_ == State::Finished; }
    bool daemon() const { return daemon_; }

private:
    friend class Sim;
    enum class State { Fresh, Parked, Running, Finished };

    std::string name_;
    bool daemon_ = false;
    std::thread thread_;
    std::exception_ptr error_;
    State state_ = State::Fresh;
    bool wake_pending_ = false;

    // Baton handoff between the event loop and this process.
    std::mutex m_;
    std::condition_variable cv_;
    bool my_turn_ = false;
};

class Sim {
public:
    Sim();
    ~Sim();

    Sim(const Sim&) = delete;
    Sim& operator=(const Sim&) = delete;

    Cycles now() const { return now_; }

    // Schedules fn at absolute time t (>= now). Same-time events fire in
    // scheduling order.
    void schedule(Cycles t, std::function<void()> fn);

    // Creates a process whose body starts running at the current time, in
    // spawn order relative to other pending events. Daemons are allowed to
    // still be parked when the run winds down; regular processes parked at
    // quiescence indicate a deadlock.
    Process* spawn(std::string name, std::function<void()> body, bool daemon = false);

    // Schedules a parked process to resume at time t (default: now). A
    // process may have at most one wake in flight.
    void wake(Process* p);
    void wake_at(Process* p, Cycles t);

    // Called from inside a process: yields to the event loop until woken.
    void park();

    // The process the calling thread belongs to, or nullptr on the loop
    // thread.
    static Process* current();

    // Runs until no events remain. Rethrows the first exception raised in a
    // process body. Throws SimError if the event budget is exhausted or if
    // any non-daemon process is still parked when the queue drains.
    void run();

    // Resumes every unfinished process with an abort flag set so that it
    // unwinds, then joins all threads. Runs implicitly on destruction.
    void shutdown();

    void set_event_budget(std::uint64_t budget) { budget_ = budget; }
    std::uint64_t events_processed() const { return processed_; }

private:
    void resume(Process* p);
    void check_process_result(Process* p);

    Cycles now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t budget_ = UINT64_MAX;
    bool aborting_ = false;
    std::map<std::pair<Cycles, std::uint64_t>, std::function<void()>> events_;
    std::vector<std::unique_ptr<Process>> processes_;
};

}  // namespace cook
