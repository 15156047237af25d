#ifndef AWR_WR_HPP
#define AWR_WR_HPP

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "awr/interp.hpp"
#include "awr/model.hpp"
#include "awr/relaxopt.hpp"
#include "awr/rma.hpp"
#include "awr/timegrid.hpp"
#include "awr/timeint.hpp"

namespace awr {

enum class WRMethod { jacobi, gs_dn, gs_nd, async };

std::string to_string(WRMethod method);
WRMethod wr_method_from_string(const std::string& s);

// Folded per-side relaxation weights: theta_v acts on the v-side exchanged
// quantity (heat flux role), theta_w on the w-side one (interface
// temperature role).  theta = 1 on a side means no relaxation there.
struct ConstantTheta {
    double theta_v = 1.0;
    double theta_w = 1.0;
};

// The single shared relaxation update; every code path combines new and old
// data through this one expression so equal inputs give equal bits.
inline double relax_combine(double theta, double fresh, double previous) {
    return (1.0 - theta) * previous + theta * fresh;
}
inline Eigen::VectorXd relax_combine(double theta, const Eigen::VectorXd& fresh,
                                     const Eigen::VectorXd& previous) {
    return (1.0 - theta) * previous + theta * fresh;
}

// Passing a RelaxTable selects, for the async method, variable relaxation
// (receiver-side, per-point Jacobi/GS weights on the union grid); for the
// other methods it is shorthand for the matching constant weights.
using RelaxChoice = std::variant<ConstantTheta, RelaxTable>;

struct WRConfig {
    WRMethod method = WRMethod::jacobi;
    RelaxChoice relax = ConstantTheta{};
    double tol = 1e-10;
    int kmax = 50;
    TimeGrid grid_v, grid_w;
    LMMethod lmm = LMMethod::implicit_euler();
    SchedulerOptions schedule;            // async only
    double interface_norm_weight = 1.0;   // discrete interface L2 weight
    const Waveform* reference_ug = nullptr; // converged u_Gamma for error reporting
    const Waveform* initial_v = nullptr;  // optional initial guesses (full side
    const Waveform* initial_w = nullptr;  // vectors on the side grids)
    bool record_iterates = false;         // keep full per-iteration trajectories
};

// Per-point realized splitting data, recorded on the union grid: whether
// each consumer read current-iteration peer data at that point, and the
// relaxation weight each exchanged quantity received there.
struct ShapePoint {
    bool fresh_ug = false; // v consumed iteration-(k+1) interface temperature
    bool fresh_q = false;  // w consumed iteration-(k+1) flux
    double theta_ug = 1.0;
    double theta_q = 1.0;
};

enum class StepShape { jacobi, gs_dn, gs_nd };

StepShape classify(const ShapePoint& p); // (fresh_ug, fresh_q) -> shape; asserts the trichotomy

struct IterationRecord {
    int k = 0;
    double update_norm = 0.0;
    double interface_error = 0.0; // NaN without a reference
    double wall_time = 0.0;
    std::vector<StepShape> shape_log;    // async: one entry per union-grid point
    std::vector<ShapePoint> splitting_log;
};

struct WRResult {
    Waveform v, w; // final iterates on the side grids (full side vectors)
    std::vector<IterationRecord> records;
    bool converged = false;
    int iterations = 0;
    std::vector<std::pair<Waveform, Waveform>> iterate_history; // when record_iterates
    Trace trace; // async: the schedule actually executed
};

WRResult run_jacobi(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config);
WRResult run_gauss_seidel(const MonolithicSystem& sys, const CoupledPartition& part,
                          const WRConfig& config, SplitKind order);
WRResult run_async(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config);

// Dispatch on config.method.
WRResult run_wr(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config);

// u_Gamma trajectory of a result: the w-side restricted to its gamma rows.
Waveform interface_trace(const WRResult& result, const CoupledPartition& part);

} // namespace awr

#endif
