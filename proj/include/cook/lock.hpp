#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "cook/gpu.hpp"
#include "cook/types.hpp"

namespace cook {

// Device-wide mutual exclusion between applications. Waiters are granted the
// lock strictly in arrival order, which keeps contended schedules (and so
// the whole trace) reproducible. Grant and release instants are recorded in
// the chronogram.
//
// acquire() parks the calling simulation process while another application
// holds the lock, so it must only be called from inside a process.
class GpuLock {
public:
    explicit GpuLock(Gpu& gpu) : gpu_(gpu) {}

    GpuLock(const GpuLock&) = delete;
    GpuLock& operator=(const GpuLock&) = delete;

    void acquire(AppId app);

    // Throws LockProtocolError when `app` is not the current owner.
    void release(AppId app);

    std::optional<AppId> owner() const { return owner_; }
    std::size_t waiting() const { return queue_.size(); }

private:
    Gpu& gpu_;
    std::optional<AppId> owner_;
    std::deque<std::pair<AppId, Process*>> queue_;
};

}  // namespace cook
