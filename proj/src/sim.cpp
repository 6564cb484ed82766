#include "cook/sim.hpp"

#include <cassert>
#include <utility>

namespace cook {
namespace {

// Thrown out of park() during shutdown to unwind a process body.
struct AbortProcess {};

thread_local Process* t_current = nullptr;

}  // namespace

Sim::Sim() = default;

Sim::~Sim() { shutdown(); }

Process* Sim::current() { return t_current; }

void Sim::schedule(Cycles t, std::function<void()> fn) {
    assert(t >= now_);
    events_.emplace(std::make_pair(t, seq_++), std::move(fn));
}

Process* Sim::spawn(std::string name, std::function<void()> body, bool daemon) {
    auto p = std::make_unique<Process>();
    Process* raw = p.get();
    raw->name_ = std::move(name);
    raw->daemon_ = daemon;
    processes_.push_back(std::move(p));

    raw->thread_ = std::thread([this, raw, body = std::move(body)] {
        {
            std::unique_lock lk(raw->m_);
            raw->cv_.wait(lk, [raw] { return raw->my_turn_; });
        }
        t_current = raw;
        if (!aborting_) {
            try {
                body();
            } catch (const AbortProcess&) {
            } catch (...) {
                raw->error_ = std::current_exception();
            }
        }
        std::unique_lock lk(raw->m_);
        raw->state_ = Process::State::Finished;
        raw->my_turn_ = false;
        raw->cv_.notify_all();
    });

    raw->state_ = Process::State::Parked;
    wake(raw);
    return raw;
}

void Sim::wake(Process* p) { wake_at(p, now_); }

void Sim::wake_at(Process* p, Cycles t) {
    assert(!p->wake_pending_ && "process already has a wake in flight");
    assert(p->state_ != Process::State::Finished);
    p->wake_pending_ = true;
    schedule(t, [this, p] {
        p->wake_pending_ = false;
        resume(p);
    });
}

void Sim::park() {
    Process* p = t_current;
    assert(p && "park() called outside a simulation process");
    std::unique_lock lk(p->m_);
    p->state_ = Process::State::Parked;
    p->my_turn_ = false;
    p->cv_.notify_all();
    p->cv_.wait(lk, [p] { return p->my_turn_; });
    p->state_ = Process::State::Running;
    if (aborting_) throw AbortProcess{};
}

void Sim::resume(Process* p) {
    if (p->state_ == Process::State::Finished) return;
    std::unique_lock lk(p->m_);
    p->state_ = Process::State::Running;
    p->my_turn_ = true;
    p->cv_.notify_all();
    p->cv_.wait(lk, [p] { return !p->my_turn_; });
    check_process_result(p);
}

void Sim::check_process_result(Process* p) {
    if (p->state_ == Process::State::Finished && p->error_) {
        std::exception_ptr e = p->error_;
        p->error_ = nullptr;
        std::rethrow_exception(e);
    }
}

void Sim::run() {
    while (!events_.empty()) {
        if (processed_ >= budget_)
            throw SimError("event budget exhausted after " +
                           std::to_string(processed_) + " events");
        ++processed_;
        auto it = events_.begin();
        Cycles t = it->first.first;
        std::function<void()> fn = std::move(it->second);
        events_.erase(it);
        assert(t >= now_);
        now_ = t;
        fn();
    }

    std::string stuck;
    for (const auto& p : processes_) {
        if (!p->daemon_ && !p->finished()) {
            if (!stuck.empty()) stuck += ", ";
            stuck += p->name_;
        }
    }
    if (!stuck.empty())
        throw SimError("simulation quiescent with parked processes: " + stuck);
}

void Sim::shutdown() {
    aborting_ = true;
    for (const auto& p : processes_) {
        if (!p->finished()) {
            std::unique_lock lk(p->m_);
            p->my_turn_ = true;
            p->cv_.notify_all();
            p->cv_.wait(lk, [&] { return !p->my_turn_; });
        }
    }
    for (const auto& p : processes_) {
        if (p->thread_.joinable()) p->thread_.join();
    }
    processes_.clear();
    events_.clear();
}

}  // namespace cook
