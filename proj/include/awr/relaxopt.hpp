#ifndef AWR_RELAXOPT_HPP
#define AWR_RELAXOPT_HPP

#include <Eigen/Dense>
#include <utility>

#include "awr/materials.hpp"
#include "awr/model.hpp"

namespace awr {

// Optimal relaxation parameters for the 1D model problem (linear elements,
// implicit Euler, matching step-sizes), derived from the discrete interface
// operators S1, S2 of the two sides.
struct RelaxTable {
    double S1 = 0.0, S2 = 0.0;
    double theta_jacobi = 1.0;
    double theta_gs_dn = 1.0;
    double theta_gs_nd = 1.0;
    double rho_jacobi = 0.0; // predicted optimal Jacobi spectral radius
};

// Discrete 1D interface operator
//   S = [6 dt dx (alpha dx^2 + 3 lambda dt) - (alpha dx^2 - 6 lambda dt)^2 s] / (18 dt dx^3),
//   s = sum_{i=1..N} 3 dt dx^2 sin^2(i pi dx) / [2 alpha dx^2 + 6 lambda dt + (alpha dx^2 - 6 lambda dt) cos(i pi dx)],
// with N = 1/dx - 1 interior nodes per unit interval.
double s_operator(const MaterialParams& mat, double dt, double dx, int interior_nodes);
double s_operator(const MaterialParams& mat, double dt, double dx);

// theta_gs = 1/|1 + S1/S2| (zero spectral radius for either GS order in 1D),
// theta_jacobi = 1/(S1/S2 + 1), rho_jacobi = sqrt((S1/S2)/(S1/S2 + 1)).
RelaxTable optimal_thetas(double S1, double S2);

RelaxTable relax_table(const MaterialParams& mat1, const MaterialParams& mat2, double dx, double dt);

// The three 2x2 interface iteration matrices acting on (u_Gamma, q),
// used to validate the optimal-theta claims numerically.
Eigen::Matrix2d dn_interface_matrix(double S1, double S2, double theta);
Eigen::Matrix2d nd_interface_matrix(double S1, double S2, double theta);
Eigen::Matrix2d jacobi_interface_matrix(double S1, double S2, double theta);

double spectral_radius(const Eigen::Matrix2d& M);

// Per-side folded relaxation weights (theta_v on q, theta_w on u_Gamma)
// realizing the classical single-parameter methods.
std::pair<double, double> thetas_for(SplitKind kind, const RelaxTable& table);

} // namespace awr

#endif
