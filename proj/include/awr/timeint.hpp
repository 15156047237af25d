#ifndef AWR_TIMEINT_HPP
#define AWR_TIMEINT_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "awr/interp.hpp"
#include "awr/model.hpp"
#include "awr/timegrid.hpp"

namespace awr {

// m-step linear multistep method sum_l a_l u_{n+l} = dt sum_l b_l f_{n+l}.
// Construction validates consistency (order >= 1) and zero-stability via the
// root condition on the generating polynomial.
struct LMMethod {
    int m = 1;
    Eigen::VectorXd a, b; // size m+1 each

    LMMethod(Eigen::VectorXd a_coeffs, Eigen::VectorXd b_coeffs);
    static LMMethod implicit_euler();
    static LMMethod trapezoidal();
};

// Discrete monolithic solution: sum_l (a_l B + b_l dt A) u_{n+l} = dt sum_l b_l f(t_{n+l}).
// One factorization of (a_m B + b_m dt A) is reused for every step.
// starting_values must supply u_1..u_{m-1} for m > 1 (u_0 comes from the system).
Waveform lmm_solve_monolithic(const MonolithicSystem& sys, const LMMethod& method,
                              const TimeGrid& grid,
                              const std::vector<Eigen::VectorXd>* starting_values = nullptr);

// One side of the partitioned system with its step matrix factorized once.
// The peer enters only through its exchanged (gamma) unknowns; the
// constructor rejects systems with cross couplings outside those columns.
class Subproblem {
public:
    Subproblem(const MonolithicSystem& sys, const CoupledPartition& part, bool v_side,
               const LMMethod& method, const TimeGrid& grid);

    int dim() const { return static_cast<int>(rows_.size()); }
    int peer_gamma_dim() const { return static_cast<int>(peer_gamma_.size()); }
    bool is_v_side() const { return v_side_; }
    const std::vector<int>& rows() const { return rows_; }
    const TimeGrid& grid() const { return grid_; }

    // Advance one step: own_history holds u_n..u_{n+m-1}; peer_gamma_at(t)
    // returns the peer's gamma values at time t.
    Eigen::VectorXd step(int n, const std::vector<Eigen::VectorXd>& own_history,
                         const std::function<Eigen::VectorXd(double)>& peer_gamma_at) const;

private:
    bool v_side_;
    LMMethod method_;
    TimeGrid grid_;
    std::vector<int> rows_, peer_gamma_;
    SparseMat B_own_, A_own_;   // own rows x own cols
    SparseMat B_peer_, A_peer_; // own rows x peer gamma cols
    std::shared_ptr<Eigen::SparseLU<SparseMat>> solver_;
    std::function<Eigen::VectorXd(double)> forcing_; // full-system f
};

} // namespace awr

#endif
