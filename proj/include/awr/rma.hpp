#ifndef AWR_RMA_HPP
#define AWR_RMA_HPP

#include <Eigen/Dense>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

namespace awr {

// ---------------------------------------------------------------------------
// One-sided communication emulated in-process: windows with distinct public
// and private copies, passive-target lock epochs, buffered puts flushed at
// unlock, and explicit owner-side synchronization.  The call surface mirrors
// the MPI RMA subset the algorithms need, so the orchestration code stays
// transport-agnostic.
// ---------------------------------------------------------------------------

enum class LockKind { shared, exclusive };

class Window {
public:
    // slots time points, each holding value_dim doubles plus a tag word and a
    // checksum word.  The tag carries the producing iteration number and
    // doubles as the update indicator (tag == k+1 means current-iteration
    // data); the checksum guards against torn slots.
    Window(std::string name, int slots, int value_dim);

    const std::string& name() const { return name_; }
    int slots() const { return slots_; }
    int value_dim() const { return value_dim_; }

    class Epoch {
    public:
        Epoch(Epoch&& other) noexcept;
        Epoch& operator=(Epoch&&) = delete;
        Epoch(const Epoch&) = delete;
        ~Epoch();

        // Buffered write of one slot; lands in the public copy at unlock.
        void put(int slot, const Eigen::VectorXd& values, double tag);
        void unlock();

    private:
        friend class Window;
        Epoch(Window* win, LockKind kind);
        Window* win_;
        LockKind kind_;
        bool open_ = false;
        std::vector<std::pair<int, std::vector<double>>> pending_;
    };

    Epoch lock(LockKind kind);

    // Owner side: private := public snapshot.  Validates slot checksums.
    void sync();
    Eigen::VectorXd values(int slot) const; // from the private copy
    double tag(int slot) const;

    // Pre-run initialization of both copies (not part of the RMA surface).
    void fill(const Eigen::VectorXd& values, double tag);
    void fill_slot(int slot, const Eigen::VectorXd& values, double tag);

private:
    friend class Epoch;
    void acquire(LockKind kind);
    void release(LockKind kind, const std::vector<std::pair<int, std::vector<double>>>& pending);

    std::string name_;
    int slots_, value_dim_, stride_;
    std::vector<double> public_copy_, private_copy_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int shared_holders_ = 0;
    bool exclusive_held_ = false;
};

// ---------------------------------------------------------------------------
// Deterministic scheduling of the two actor threads.
// ---------------------------------------------------------------------------

enum class ScheduleMode { free_run, lockstep, p0_ahead, p1_ahead, seeded };

std::string to_string(ScheduleMode mode);
ScheduleMode schedule_mode_from_string(const std::string& s);

struct TraceEvent {
    int actor = 0;
    std::string action;  // "sync", "put", "sweep_sync", "sweep_end"
    std::string target;  // window name, or "-" for barriers
    int step = 0;
    int iteration = 0;

    bool operator==(const TraceEvent&) const = default;
};

struct Trace {
    ScheduleMode mode = ScheduleMode::free_run;
    std::uint64_t seed = 0;
    std::vector<TraceEvent> events;

    void save(const std::string& path) const;
    static Trace load(const std::string& path);
};

struct SchedulerOptions {
    ScheduleMode mode = ScheduleMode::free_run;
    std::uint64_t seed = 0;
    double jitter = 0.5;  // seeded mode: random extra cost per action, in units of one step
    std::shared_ptr<const Trace> replay; // when set, follow this trace exactly
};

// Serializes the actors' communication actions.  Outside free_run mode the
// actors form a cooperative system: a checkpoint call parks the actor and the
// controller lets exactly one run at a time, so the grant order (and with it
// every data race) is a pure function of mode, seed and program.
//   lockstep   - per step: actor0 sync, actor1 sync, actor0 put, actor1 put.
//   p0_ahead   - actor0 runs its whole sweep before actor1 starts (mirrored
//                for p1_ahead), reproducing sequential GS data flow.
//   seeded     - discrete-event simulation on virtual clocks with seeded
//                per-action jitter; emulates load imbalance deterministically.
// "sweep_sync"/"sweep_end" checkpoints are rendezvous: both actors must
// arrive before either proceeds (all modes, including free_run).
class ScheduleController {
public:
    explicit ScheduleController(SchedulerOptions opt, int actors = 2);

    // Blocks until this actor may perform the action; the grant lasts until
    // the actor's next checkpoint (or finish).
    void checkpoint(int actor, const char* action, const std::string& target, int step, int iteration);
    void finish(int actor);

    // Poisons the schedule so every parked or arriving actor throws; called
    // by an actor that dies with an exception, so its peer cannot hang.
    void fail(int actor, const std::string& message);

    Trace trace() const;

private:
    struct Pending {
        TraceEvent event;
        bool granted = false;
        bool barrier_released = false;
    };

    void try_decide();
    bool grantable(int actor) const;
    int pick_next() const;
    void grant(int actor);

    SchedulerOptions opt_;
    int actors_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::unique_ptr<Pending>> waiting_;
    std::vector<bool> finished_;
    std::vector<double> clock_;
    std::mt19937_64 rng_;
    int running_ = -1; // actor currently holding the grant
    std::string error_;
    bool has_error_ = false;
    size_t replay_pos_ = 0;
    std::vector<TraceEvent> trace_;
};

} // namespace awr

#endif
