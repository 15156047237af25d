#include "awr/relaxopt.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace awr {

double s_operator(const MaterialParams& mat, double dt, double dx, int interior_nodes) {
    if (dt <= 0.0 || dx <= 0.0 || interior_nodes < 1)
        throw std::invalid_argument("s_operator: need dt > 0, dx > 0, at least one interior node");
    const double alpha = mat.alpha, lambda = mat.lambda;
    const double mass_off = alpha * dx * dx - 6.0 * lambda * dt;
    double s = 0.0;
    for (int i = 1; i <= interior_nodes; ++i) {
        const double phase = i * std::numbers::pi * dx;
        const double sin_i = std::sin(phase), cos_i = std::cos(phase);
        s += 3.0 * dt * dx * dx * sin_i * sin_i /
             (2.0 * alpha * dx * dx + 6.0 * lambda * dt + mass_off * cos_i);
    }
    return (6.0 * dt * dx * (alpha * dx * dx + 3.0 * lambda * dt) - mass_off * mass_off * s) /
           (18.0 * dt * dx * dx * dx);
}

double s_operator(const MaterialParams& mat, double dt, double dx) {
    const double inv = 1.0 / dx;
    const int n = static_cast<int>(std::lround(inv));
    if (n < 2 || std::abs(inv - n) > 1e-9 * inv)
        throw std::invalid_argument("s_operator: 1/dx must be an integer >= 2");
    return s_operator(mat, dt, dx, n - 1);
}

RelaxTable optimal_thetas(double S1, double S2) {
    if (S1 <= 0.0 || S2 <= 0.0) throw std::invalid_argument("optimal_thetas: interface operators must be positive");
    const double r = S1 / S2;
    RelaxTable t;
    t.S1 = S1;
    t.S2 = S2;
    t.theta_gs_dn = 1.0 / std::abs(1.0 + r);
    t.theta_gs_nd = t.theta_gs_dn;
    t.theta_jacobi = 1.0 / (r + 1.0);
    t.rho_jacobi = std::sqrt(r / (1.0 + r));
    return t;
}

RelaxTable relax_table(const MaterialParams& mat1, const MaterialParams& mat2, double dx, double dt) {
    return optimal_thetas(s_operator(mat1, dt, dx), s_operator(mat2, dt, dx));
}

Eigen::Matrix2d dn_interface_matrix(double S1, double S2, double theta) {
    Eigen::Matrix2d M;
    M << (1.0 - theta) - theta * S1 / S2, 0.0, S1, 0.0;
    return M;
}

Eigen::Matrix2d nd_interface_matrix(double S1, double S2, double theta) {
    Eigen::Matrix2d M;
    M << 0.0, -1.0 / S2, 0.0, (1.0 - theta) - theta * S1 / S2;
    return M;
}

Eigen::Matrix2d jacobi_interface_matrix(double S1, double S2, double theta) {
    Eigen::Matrix2d M;
    M << 1.0 - theta, -theta / S2, theta * S1, 1.0 - theta;
    return M;
}

double spectral_radius(const Eigen::Matrix2d& M) {
    return Eigen::EigenSolver<Eigen::Matrix2d>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<double, double> thetas_for(SplitKind kind, const RelaxTable& table) {
    switch (kind) {
        case SplitKind::jacobi: return {table.theta_jacobi, table.theta_jacobi};
        case SplitKind::gs_dn: return {1.0, table.theta_gs_dn};
        case SplitKind::gs_nd: return {table.theta_gs_nd, 1.0};
    }
    throw std::invalid_argument("thetas_for: unknown splitting kind");
}

} // namespace awr
