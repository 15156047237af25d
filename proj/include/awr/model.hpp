#ifndef AWR_MODEL_HPP
#define AWR_MODEL_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "awr/materials.hpp"

namespace awr {

using SparseMat = Eigen::SparseMatrix<double>;

// Linear coupled system B u' + A u = f(t), u(0) = u0, on [0, Tf].
// B may be singular (the heat benchmark carries the interface flux as an
// algebraic unknown); validity rests on the time-stepping matrix
// a_m B + b_m dt A being nonsingular, which the solvers check.
struct MonolithicSystem {
    SparseMat B, A;
    std::function<Eigen::VectorXd(double)> f; // empty means f == 0
    Eigen::VectorXd u0;
    double Tf = 0.0;

    int dim() const { return static_cast<int>(B.rows()); }
    Eigen::VectorXd forcing(double t) const;
    void validate() const;
};

// 2x2 block partition of the unknowns.  gamma_v holds the quantity the
// v-side produces for w (heat flux role), gamma_w the quantity the w-side
// produces for v (interface temperature role).
struct CoupledPartition {
    std::vector<int> v_indices, w_indices;
    std::vector<int> gamma_v, gamma_w;

    void validate(int dim) const;
    std::vector<int> gamma_v_local() const; // positions of gamma_v within v_indices
    std::vector<int> gamma_w_local() const;
};

enum class SplitKind { jacobi, gs_dn, gs_nd };

std::string to_string(SplitKind kind);

// Matrix splitting B = MB - NB, A = MA - NA realizing one WR method with
// relaxation folded in: iterating
//   sum_l (a_l MB + b_l dt MA) u^{k+1}_{n+l} = sum_l (a_l NB + b_l dt NA) u^k_{n+l} + dt sum_l b_l f
// is algebraically identical to solving the subproblems against the peer
// interpolant and relaxing the exchanged quantities pointwise.
struct Splitting {
    SparseMat MB, NB, MA, NA;
    SplitKind kind = SplitKind::jacobi;
    double theta_v = 1.0, theta_w = 1.0;
};

Splitting make_splitting(const MonolithicSystem& sys, const CoupledPartition& part,
                         SplitKind kind, double theta_v, double theta_w);

// Generalized per-point form: the cross-coupling blocks sit on the implicit
// (M) side when the consuming side read current-iteration data, otherwise on
// the N side.  (v_fresh, w_fresh) = (false,false) is Jacobi, (false,true)
// GS-DN, (true,false) GS-ND.
Splitting make_splitting_flags(const MonolithicSystem& sys, const CoupledPartition& part,
                               bool v_consumed_fresh, bool w_consumed_fresh,
                               double theta_v, double theta_w);

// Coupled heat conduction on (-1,0) | (0,1) (1D) or the two unit squares
// (-1,0)x(0,1) | (0,1)x(0,1) (2D) with interface at x = 0, homogeneous
// Dirichlet outer boundary, P1 elements on a uniform grid.
struct HeatProblemConfig {
    int dimension = 1;
    double dx = 1.0 / 64;
    MaterialParams mat1 = materials::air();
    MaterialParams mat2 = materials::steel();
    double Tf = 1e4;
    int Nv = 50, Nw = 50;
    std::function<double(double, double)> initial_temperature; // empty means benchmark profile
};

// 500 sin(pi/2 (x+1)) sin(pi y); the y factor is dropped in 1D.
double benchmark_initial_temperature_1d(double x);
double benchmark_initial_temperature_2d(double x, double y);

struct HeatProblem {
    MonolithicSystem system;
    CoupledPartition partition;
    int cells = 0;  // per unit length, dx = 1/cells
    int dimension = 1;
    double interface_norm_weight = 1.0; // discrete interface L2 weight (sqrt(dx) in 2D)
};

HeatProblem assemble_heat(const HeatProblemConfig& config);

// Discrete initial heat flux q0 = lambda_1 * int_Gamma (grad u0 . n1) phi dS,
// assembled from the P1 interpolant of the initial temperature on the
// Omega_1 side; one entry per interface node.
Eigen::VectorXd initial_flux(const HeatProblemConfig& config);

SparseMat submatrix(const SparseMat& M, const std::vector<int>& rows, const std::vector<int>& cols);

} // namespace awr

#endif
