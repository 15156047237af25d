#include "awr/rma.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace awr {

namespace {

constexpr auto kWaitBudget = std::chrono::seconds(30);

double slot_checksum(const double* values, int value_dim, double tag) {
    double sum = tag;
    for (int i = 0; i < value_dim; ++i) sum += values[i];
    return sum;
}

} // namespace

// ---------------------------------------------------------------------------
// Window
// ---------------------------------------------------------------------------

Window::Window(std::string name, int slots, int value_dim)
    : name_(std::move(name)), slots_(slots), value_dim_(value_dim), stride_(value_dim + 2) {
    if (slots_ < 1 || value_dim_ < 1)
        throw std::invalid_argument("Window: need at least one slot and one value entry");
    public_copy_.assign(static_cast<size_t>(slots_) * stride_, 0.0);
    private_copy_ = public_copy_;
    fill(Eigen::VectorXd::Zero(value_dim_), 0.0);
}

void Window::fill(const Eigen::VectorXd& values, double tag) {
    for (int s = 0; s < slots_; ++s) fill_slot(s, values, tag);
}

void Window::fill_slot(int slot, const Eigen::VectorXd& values, double tag) {
    if (slot < 0 || slot >= slots_) throw std::out_of_range("Window::fill_slot: slot out of range");
    if (values.size() != value_dim_) throw std::invalid_argument("Window::fill_slot: dimension mismatch");
    std::lock_guard<std::mutex> lk(mutex_);
    for (auto* copy : {&public_copy_, &private_copy_}) {
        double* base = copy->data() + static_cast<size_t>(slot) * stride_;
        for (int i = 0; i < value_dim_; ++i) base[i] = values(i);
        base[value_dim_] = tag;
        base[value_dim_ + 1] = slot_checksum(base, value_dim_, tag);
    }
}

Window::Epoch Window::lock(LockKind kind) {
    acquire(kind);
    return Epoch(this, kind);
}

void Window::acquire(LockKind kind) {
    std::unique_lock<std::mutex> lk(mutex_);
    const bool ok = cv_.wait_for(lk, kWaitBudget, [&] {
        return kind == LockKind::exclusive ? (!exclusive_held_ && shared_holders_ == 0) : !exclusive_held_;
    });
    if (!ok) throw std::runtime_error("Window::lock: timed out waiting for " + name_);
    if (kind == LockKind::exclusive)
        exclusive_held_ = true;
    else
        ++shared_holders_;
}

void Window::release(LockKind kind, const std::vector<std::pair<int, std::vector<double>>>& pending) {
    std::lock_guard<std::mutex> lk(mutex_);
    for (const auto& [slot, raw] : pending) {
        double* base = public_copy_.data() + static_cast<size_t>(slot) * stride_;
        for (int i = 0; i < stride_; ++i) base[i] = raw[static_cast<size_t>(i)];
    }
    if (kind == LockKind::exclusive)
        exclusive_held_ = false;
    else
        --shared_holders_;
    cv_.notify_all();
}

void Window::sync() {
    std::lock_guard<std::mutex> lk(mutex_);
    private_copy_ = public_copy_;
    for (int s = 0; s < slots_; ++s) {
        const double* base = private_copy_.data() + static_cast<size_t>(s) * stride_;
        if (base[value_dim_ + 1] != slot_checksum(base, value_dim_, base[value_dim_]))
            throw std::runtime_error("Window::sync: torn slot in " + name_);
    }
}

Eigen::VectorXd Window::values(int slot) const {
    if (slot < 0 || slot >= slots_) throw std::out_of_range("Window::values: slot out of range");
    std::lock_guard<std::mutex> lk(mutex_);
    const double* base = private_copy_.data() + static_cast<size_t>(slot) * stride_;
    return Eigen::Map<const Eigen::VectorXd>(base, value_dim_);
}

double Window::tag(int slot) const {
    if (slot < 0 || slot >= slots_) throw std::out_of_range("Window::tag: slot out of range");
    std::lock_guard<std::mutex> lk(mutex_);
    return private_copy_[static_cast<size_t>(slot) * stride_ + value_dim_];
}

Window::Epoch::Epoch(Window* win, LockKind kind) : win_(win), kind_(kind), open_(true) {}

Window::Epoch::Epoch(Epoch&& other) noexcept
    : win_(other.win_), kind_(other.kind_), open_(other.open_), pending_(std::move(other.pending_)) {
    other.open_ = false;
}

Window::Epoch::~Epoch() {
    if (open_) unlock();
}

void Window::Epoch::put(int slot, const Eigen::VectorXd& values, double tag) {
    if (!open_) throw std::logic_error("Window::Epoch::put: epoch already closed");
    if (kind_ != LockKind::exclusive) throw std::logic_error("Window::Epoch::put: needs an exclusive epoch");
    if (slot < 0 || slot >= win_->slots_) throw std::out_of_range("Window::Epoch::put: slot out of range");
    if (values.size() != win_->value_dim_) throw std::invalid_argument("Window::Epoch::put: dimension mismatch");
    std::vector<double> raw(static_cast<size_t>(win_->stride_));
    for (int i = 0; i < win_->value_dim_; ++i) raw[static_cast<size_t>(i)] = values(i);
    raw[static_cast<size_t>(win_->value_dim_)] = tag;
    raw[static_cast<size_t>(win_->value_dim_) + 1] = slot_checksum(raw.data(), win_->value_dim_, tag);
    pending_.emplace_back(slot, std::move(raw));
}

void Window::Epoch::unlock() {
    if (!open_) return;
    open_ = false;
    win_->release(kind_, pending_);
    pending_.clear();
}

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

std::string to_string(ScheduleMode mode) {
    switch (mode) {
        case ScheduleMode::free_run: return "free_run";
        case ScheduleMode::lockstep: return "lockstep";
        case ScheduleMode::p0_ahead: return "p0_ahead";
        case ScheduleMode::p1_ahead: return "p1_ahead";
        case ScheduleMode::seeded: return "seeded";
    }
    return "?";
}

ScheduleMode schedule_mode_from_string(const std::string& s) {
    for (ScheduleMode m : {ScheduleMode::free_run, ScheduleMode::lockstep, ScheduleMode::p0_ahead,
                           ScheduleMode::p1_ahead, ScheduleMode::seeded}) {
        if (to_string(m) == s) return m;
    }
    throw std::invalid_argument("unknown schedule mode: " + s);
}

void Trace::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("Trace::save: cannot open " + path);
    out << "# schedule trace v1\n";
    out << "mode " << to_string(mode) << "\n";
    out << "seed " << seed << "\n";
    out << "events " << events.size() << "\n";
    for (const TraceEvent& e : events)
        out << e.actor << ' ' << e.action << ' ' << e.target << ' ' << e.step << ' ' << e.iteration << "\n";
    if (!out) throw std::runtime_error("Trace::save: write failed for " + path);
}

Trace Trace::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Trace::load: cannot open " + path);
    std::string line;
    std::getline(in, line); // comment header
    Trace t;
    std::string key, value;
    size_t count = 0;
    for (int i = 0; i < 3; ++i) {
        if (!(in >> key >> value)) throw std::runtime_error("Trace::load: truncated header in " + path);
        if (key == "mode")
            t.mode = schedule_mode_from_string(value);
        else if (key == "seed")
            t.seed = std::stoull(value);
        else if (key == "events")
            count = std::stoul(value);
        else
            throw std::runtime_error("Trace::load: unexpected header key " + key);
    }
    t.events.resize(count);
    for (TraceEvent& e : t.events) {
        if (!(in >> e.actor >> e.action >> e.target >> e.step >> e.iteration))
            throw std::runtime_error("Trace::load: truncated event list in " + path);
    }
    return t;
}

namespace {

bool is_barrier(const std::string& action) { return action == "sweep_sync" || action == "sweep_end"; }

int action_phase(const std::string& action) {
    if (action == "sync") return 0;
    if (action == "put") return 1;
    if (action == "sweep_sync") return 2;
    if (action == "sweep_end") return 3;
    return 4;
}

std::string describe(const TraceEvent& e) {
    std::ostringstream os;
    os << "actor " << e.actor << " " << e.action << "(" << e.target << ") step " << e.step << " iteration "
       << e.iteration;
    return os.str();
}

} // namespace

ScheduleController::ScheduleController(SchedulerOptions opt, int actors)
    : opt_(std::move(opt)), actors_(actors), waiting_(static_cast<size_t>(actors)),
      finished_(static_cast<size_t>(actors), false), clock_(static_cast<size_t>(actors), 0.0),
      rng_(opt_.seed) {
    if (actors_ < 1) throw std::invalid_argument("ScheduleController: need at least one actor");
    if (opt_.replay) {
        if (opt_.replay->mode == ScheduleMode::free_run)
            throw std::invalid_argument("ScheduleController: free_run traces are not replayable");
        if (opt_.replay->mode != opt_.mode)
            throw std::invalid_argument("ScheduleController: replay trace was recorded under mode " +
                                        to_string(opt_.replay->mode) + ", not " + to_string(opt_.mode));
    }
}

void ScheduleController::checkpoint(int actor, const char* action, const std::string& target, int step,
                                    int iteration) {
    std::unique_lock<std::mutex> lk(mutex_);
    if (has_error_) throw std::runtime_error(error_);
    TraceEvent event{actor, action, target, step, iteration};

    if (opt_.mode == ScheduleMode::free_run && !opt_.replay) {
        trace_.push_back(event);
        if (!is_barrier(event.action)) return;
        waiting_[static_cast<size_t>(actor)] = std::make_unique<Pending>(Pending{event, false, false});
        try_decide();
        cv_.notify_all();
        auto& slot = waiting_[static_cast<size_t>(actor)];
        const bool ok = cv_.wait_for(lk, kWaitBudget, [&] { return has_error_ || slot->granted; });
        if (has_error_) throw std::runtime_error(error_);
        if (!ok) {
            has_error_ = true;
            error_ = "schedule deadlock at " + describe(event);
            cv_.notify_all();
            throw std::runtime_error(error_);
        }
        slot.reset();
        return;
    }

    if (running_ == actor) running_ = -1;
    waiting_[static_cast<size_t>(actor)] = std::make_unique<Pending>(Pending{event, false, false});
    try_decide();
    cv_.notify_all();
    auto& slot = waiting_[static_cast<size_t>(actor)];
    const bool ok = cv_.wait_for(lk, kWaitBudget, [&] { return has_error_ || slot->granted; });
    if (has_error_) throw std::runtime_error(error_);
    if (!ok) {
        has_error_ = true;
        error_ = "schedule deadlock at " + describe(event);
        cv_.notify_all();
        throw std::runtime_error(error_);
    }
    slot.reset();
}

void ScheduleController::finish(int actor) {
    std::lock_guard<std::mutex> lk(mutex_);
    finished_[static_cast<size_t>(actor)] = true;
    if (running_ == actor) running_ = -1;
    try_decide();
    cv_.notify_all();
}

void ScheduleController::fail(int actor, const std::string& message) {
    std::lock_guard<std::mutex> lk(mutex_);
    finished_[static_cast<size_t>(actor)] = true;
    if (running_ == actor) running_ = -1;
    if (!has_error_) {
        has_error_ = true;
        error_ = "actor " + std::to_string(actor) + " failed: " + message;
    }
    cv_.notify_all();
}

Trace ScheduleController::trace() const {
    std::lock_guard<std::mutex> lk(mutex_);
    Trace t;
    t.mode = opt_.mode;
    t.seed = opt_.seed;
    t.events = trace_;
    return t;
}

// Called with the mutex held.  A decision is possible only when no actor
// holds the grant and every live actor is parked, so the candidate set is a
// pure function of the program state.
void ScheduleController::try_decide() {
    const bool free = opt_.mode == ScheduleMode::free_run && !opt_.replay;
    if (!free) {
        if (running_ != -1) return;
        for (int a = 0; a < actors_; ++a) {
            if (!finished_[static_cast<size_t>(a)] && !waiting_[static_cast<size_t>(a)]) return;
        }
    }

    // Release a barrier once every live actor stands at the same one.
    for (int a = 0; a < actors_; ++a) {
        auto& p = waiting_[static_cast<size_t>(a)];
        if (!p || !is_barrier(p->event.action) || p->barrier_released) continue;
        bool all_here = true;
        for (int b = 0; b < actors_; ++b) {
            if (finished_[static_cast<size_t>(b)]) continue;
            const auto& q = waiting_[static_cast<size_t>(b)];
            all_here = all_here && q && q->event.action == p->event.action &&
                       q->event.iteration == p->event.iteration;
        }
        if (all_here) {
            for (int b = 0; b < actors_; ++b) {
                auto& q = waiting_[static_cast<size_t>(b)];
                if (q && q->event.action == p->event.action) {
                    q->barrier_released = true;
                    if (free) q->granted = true;
                }
            }
        }
    }
    if (free) return;

    if (opt_.replay) {
        const auto& events = opt_.replay->events;
        bool any_waiting = false;
        for (int a = 0; a < actors_; ++a) any_waiting = any_waiting || static_cast<bool>(waiting_[static_cast<size_t>(a)]);
        if (!any_waiting) return;
        if (replay_pos_ >= events.size()) {
            has_error_ = true;
            error_ = "replay diverged: trace exhausted but actors are still communicating";
            return;
        }
        const TraceEvent& head = events[replay_pos_];
        if (head.actor < 0 || head.actor >= actors_ || finished_[static_cast<size_t>(head.actor)]) {
            has_error_ = true;
            error_ = "replay diverged: trace expects " + describe(head) + " but that actor is done";
            return;
        }
        const auto& p = waiting_[static_cast<size_t>(head.actor)];
        if (!p) return; // unreachable once all are parked; defensive
        if (!(p->event == head)) {
            has_error_ = true;
            error_ = "replay diverged: trace expects " + describe(head) + ", actor is at " + describe(p->event);
            return;
        }
        ++replay_pos_;
        grant(head.actor);
        return;
    }

    const int next = pick_next();
    if (next >= 0) {
        grant(next);
        return;
    }
    for (int a = 0; a < actors_; ++a) {
        if (waiting_[static_cast<size_t>(a)]) {
            has_error_ = true;
            error_ = "schedule stuck: actors parked at incompatible barriers, first is " +
                     describe(waiting_[static_cast<size_t>(a)]->event);
            return;
        }
    }
}

bool ScheduleController::grantable(int actor) const {
    const auto& p = waiting_[static_cast<size_t>(actor)];
    if (!p) return false;
    return !is_barrier(p->event.action) || p->barrier_released;
}

int ScheduleController::pick_next() const {
    int best = -1;
    auto better = [&](int a, int b) { // true when a should run before b
        const TraceEvent& ea = waiting_[static_cast<size_t>(a)]->event;
        const TraceEvent& eb = waiting_[static_cast<size_t>(b)]->event;
        switch (opt_.mode) {
            case ScheduleMode::lockstep: {
                const auto ka = std::tuple(ea.iteration, ea.step, action_phase(ea.action), ea.actor);
                const auto kb = std::tuple(eb.iteration, eb.step, action_phase(eb.action), eb.actor);
                return ka < kb;
            }
            case ScheduleMode::p0_ahead:
                return std::tuple(ea.iteration, ea.actor) < std::tuple(eb.iteration, eb.actor);
            case ScheduleMode::p1_ahead:
                return std::tuple(ea.iteration, -ea.actor) < std::tuple(eb.iteration, -eb.actor);
            case ScheduleMode::seeded:
                return std::tuple(clock_[static_cast<size_t>(a)], a) < std::tuple(clock_[static_cast<size_t>(b)], b);
            case ScheduleMode::free_run: break;
        }
        return a < b;
    };
    for (int a = 0; a < actors_; ++a) {
        if (!grantable(a)) continue;
        if (best < 0 || better(a, best)) best = a;
    }
    return best;
}

void ScheduleController::grant(int actor) {
    auto& p = waiting_[static_cast<size_t>(actor)];
    p->granted = true;
    trace_.push_back(p->event);
    running_ = actor;
    if (opt_.mode == ScheduleMode::seeded) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        clock_[static_cast<size_t>(actor)] += 1.0 + opt_.jitter * u01(rng_);
    }
}

} // namespace awr
