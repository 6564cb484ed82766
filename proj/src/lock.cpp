#include "cook/lock.hpp"

#include <cassert>

namespace cook {

void GpuLock::acquire(AppId app) {
    if (!owner_.has_value()) {
        owner_ = app;
        gpu_.note_lock_event(app, /*acquire=*/true);
        return;
    }
    if (*owner_ == app)
        throw LockProtocolError("application " + std::to_string(app) +
                                " re-acquired the GPU lock it already holds");
    Process* p = Sim::current();
    assert(p && "GpuLock::acquire must be called from a simulation process");
    queue_.emplace_back(app, p);
    gpu_.sim().park();
    // Ownership was transferred to us by the releaser before the wake.
    assert(owner_.has_value() && *owner_ == app);
}

void GpuLock::release(AppId app) {
    if (!owner_.has_value() || *owner_ != app)
        throw LockProtocolError("application " + std::to_string(app) +
                                " released the GPU lock without owning it");
    gpu_.note_lock_event(app, /*acquire=*/false);
    if (queue_.empty()) {
        owner_.reset();
        return;
    }
    auto [next, proc] = queue_.front();
    queue_.pop_front();
    owner_ = next;
    gpu_.note_lock_event(next, /*acquire=*/true);
    gpu_.sim().wake(proc);
}

}  // namespace cook
