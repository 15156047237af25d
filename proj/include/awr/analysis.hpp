#ifndef AWR_ANALYSIS_HPP
#define AWR_ANALYSIS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "awr/model.hpp"
#include "awr/timegrid.hpp"
#include "awr/timeint.hpp"
#include "awr/wr.hpp"

namespace awr {

// Per-point splitting sequence over one sweep (length N+1).  Entry j
// describes the splitting realized at grid point j: constant methods repeat
// one shape, asynchronous runs replay their recorded log.
using ShapeSequence = std::vector<ShapePoint>;

ShapeSequence constant_shape(SplitKind kind, double theta_v, double theta_w, int N);
ShapeSequence shape_sequence(const IterationRecord& record);

// Blocks of the stacked one-sweep iteration system: for n = m..N and
// l = 0..m,  C_{n,l} = a_l MB(j) + b_l dt MA(j)  and  D_{n,l} = a_l NB(j) + b_l dt NA(j)
// with j = n - m + l the grid point the column belongs to.
class BlockPair {
public:
    BlockPair(const MonolithicSystem& sys, const CoupledPartition& part,
              const ShapeSequence& shapes, const LMMethod& method, const TimeGrid& grid);

    int N() const { return N_; }
    int m() const { return method_.m; }
    int d() const { return d_; }
    double dt() const { return dt_; }
    const LMMethod& method() const { return method_; }

    Eigen::MatrixXd C(int n, int l) const;
    Eigen::MatrixXd D(int n, int l) const;

private:
    int N_, d_;
    double dt_;
    LMMethod method_;
    std::vector<Eigen::MatrixXd> MB_, NB_, MA_, NA_; // per grid point
};

// Dense stacked matrices over unknowns u_m..u_N, dimension d(N-m+1); the
// proof-layout band structure (C block lower-banded with bandwidth m).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_all_at_once(const BlockPair& blocks,
                                                              int dim_cap = 2000);

struct Theorem1Report {
    bool pass = false;            // all 2-norms < 1 and every C_{n,m} well posed
    bool diagonal_nonsingular = false;
    double max_norm2 = 0.0, max_norminf = 0.0;
    std::vector<double> norm2, norminf; // per n = m..N
    std::string summary() const;  // key/value lines for the CLI
};

Theorem1Report theorem1_check(const BlockPair& blocks);

// Error recursion e^{k+1} = C^{-1} D e^k by block forward substitution.
// e0_history holds e^{(0)}_n for n = m..N (errors at the starting values are
// zero by construction).  Returns iterations 1..k_count, each of length N-m+1.
std::vector<std::vector<Eigen::VectorXd>>
error_recursion(const BlockPair& blocks, const std::vector<Eigen::VectorXd>& e0_history, int k_count);

double iteration_spectral_radius(const BlockPair& blocks, int dim_cap = 2000);

} // namespace awr

#endif
