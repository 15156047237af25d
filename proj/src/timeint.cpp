#include "awr/timeint.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace awr {

namespace {

void check_root_condition(const Eigen::VectorXd& a) {
    const int m = static_cast<int>(a.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -a(i) / a(m);
    const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    for (int i = 0; i < m; ++i) {
        if (std::abs(roots(i)) > 1.0 + 1e-9)
            throw std::invalid_argument("LMMethod: generating polynomial has a root outside the unit disk");
        for (int j = i + 1; j < m; ++j) {
            if (std::abs(roots(i)) > 1.0 - 1e-6 && std::abs(roots(i) - roots(j)) < 1e-6)
                throw std::invalid_argument("LMMethod: repeated root on the unit circle");
        }
    }
}

} // namespace

LMMethod::LMMethod(Eigen::VectorXd a_coeffs, Eigen::VectorXd b_coeffs)
    : m(static_cast<int>(a_coeffs.size()) - 1), a(std::move(a_coeffs)), b(std::move(b_coeffs)) {
    if (m < 1 || b.size() != a.size()) throw std::invalid_argument("LMMethod: need m+1 coefficients each, m >= 1");
    if (a(m) == 0.0) throw std::invalid_argument("LMMethod: leading coefficient must not vanish");
    const double scale = a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
    double rho1 = 0.0, drho1 = 0.0, sigma1 = 0.0;
    for (int l = 0; l <= m; ++l) {
        rho1 += a(l);
        drho1 += l * a(l);
        sigma1 += b(l);
    }
    if (std::abs(rho1) > 1e-12 * scale || std::abs(drho1 - sigma1) > 1e-12 * scale)
        throw std::invalid_argument("LMMethod: coefficients are not consistent of order >= 1");
    check_root_condition(a);
}

LMMethod LMMethod::implicit_euler() {
    return LMMethod{(Eigen::VectorXd(2) << -1.0, 1.0).finished(), (Eigen::VectorXd(2) << 0.0, 1.0).finished()};
}

LMMethod LMMethod::trapezoidal() {
    return LMMethod{(Eigen::VectorXd(2) << -1.0, 1.0).finished(), (Eigen::VectorXd(2) << 0.5, 0.5).finished()};
}

Waveform lmm_solve_monolithic(const MonolithicSystem& sys, const LMMethod& method,
                              const TimeGrid& grid,
                              const std::vector<Eigen::VectorXd>* starting_values) {
    sys.validate();
    if (std::abs(grid.Tf - sys.Tf) > 1e-12 * sys.Tf)
        throw std::invalid_argument("lmm_solve_monolithic: grid horizon does not match the system");
    const int m = method.m, d = sys.dim();
    if (grid.N < m) throw std::invalid_argument("lmm_solve_monolithic: fewer steps than the method needs");
    if (m > 1 && (!starting_values || static_cast<int>(starting_values->size()) != m - 1))
        throw std::invalid_argument("lmm_solve_monolithic: need m-1 starting values");

    const double dt = grid.dt();
    SparseMat S = method.a(m) * sys.B + (method.b(m) * dt) * sys.A;
    Eigen::SparseLU<SparseMat> solver;
    solver.compute(S);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("lmm_solve_monolithic: step matrix is singular");

    Waveform u(grid, d);
    u.update_point(0, sys.u0);
    for (int l = 1; l < m; ++l) u.update_point(l, (*starting_values)[static_cast<size_t>(l - 1)]);

    for (int n = 0; n + m <= grid.N; ++n) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
        for (int l = 0; l <= m; ++l) {
            const double t = grid.time(n + l);
            if (sys.f && method.b(l) != 0.0) rhs += (dt * method.b(l)) * sys.f(t);
            if (l < m) {
                const Eigen::VectorXd& ul = u.at(n + l);
                if (method.a(l) != 0.0) rhs -= method.a(l) * (sys.B * ul);
                if (method.b(l) != 0.0) rhs -= (dt * method.b(l)) * (sys.A * ul);
            }
        }
        u.update_point(n + m, solver.solve(rhs));
    }
    return u;
}

Subproblem::Subproblem(const MonolithicSystem& sys, const CoupledPartition& part, bool v_side,
                       const LMMethod& method, const TimeGrid& grid)
    : v_side_(v_side), method_(method), grid_(grid) {
    sys.validate();
    part.validate(sys.dim());
    if (std::abs(grid.Tf - sys.Tf) > 1e-12 * sys.Tf)
        throw std::invalid_argument("Subproblem: grid horizon does not match the system");
    rows_ = v_side ? part.v_indices : part.w_indices;
    peer_gamma_ = v_side ? part.gamma_w : part.gamma_v;

    std::vector<char> own(static_cast<size_t>(sys.dim()), 0), exported(static_cast<size_t>(sys.dim()), 0);
    for (int i : rows_) own[static_cast<size_t>(i)] = 1;
    for (int i : peer_gamma_) exported[static_cast<size_t>(i)] = 1;
    const auto check_columns = [&](const SparseMat& M, const char* name) {
        for (int k = 0; k < M.outerSize(); ++k) {
            for (SparseMat::InnerIterator it(M, k); it; ++it) {
                const auto r = static_cast<size_t>(it.row()), c = static_cast<size_t>(it.col());
                if (own[r] && !own[c] && !exported[c])
                    throw std::invalid_argument(std::string("Subproblem: ") + name +
                                                " couples across the interface outside the exchanged unknowns");
            }
        }
    };
    check_columns(sys.B, "B");
    check_columns(sys.A, "A");

    B_own_ = submatrix(sys.B, rows_, rows_);
    A_own_ = submatrix(sys.A, rows_, rows_);
    B_peer_ = submatrix(sys.B, rows_, peer_gamma_);
    A_peer_ = submatrix(sys.A, rows_, peer_gamma_);
    forcing_ = sys.f;

    const int mm = method_.m;
    SparseMat S = method_.a(mm) * B_own_ + (method_.b(mm) * grid_.dt()) * A_own_;
    solver_ = std::make_shared<Eigen::SparseLU<SparseMat>>();
    solver_->compute(S);
    if (solver_->info() != Eigen::Success)
        throw std::runtime_error("Subproblem: step matrix is singular");
}

Eigen::VectorXd Subproblem::step(int n, const std::vector<Eigen::VectorXd>& own_history,
                                 const std::function<Eigen::VectorXd(double)>& peer_gamma_at) const {
    const int m = method_.m;
    if (static_cast<int>(own_history.size()) != m)
        throw std::invalid_argument("Subproblem::step: history must hold exactly m values");
    const double dt = grid_.dt();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim());
    for (int l = 0; l <= m; ++l) {
        const double t = grid_.time(n + l);
        if (forcing_ && method_.b(l) != 0.0) {
            const Eigen::VectorXd full = forcing_(t);
            Eigen::VectorXd f_own(dim());
            for (int i = 0; i < dim(); ++i) f_own(i) = full(rows_[static_cast<size_t>(i)]);
            rhs += (dt * method_.b(l)) * f_own;
        }
        if (l < m) {
            const Eigen::VectorXd& ul = own_history[static_cast<size_t>(l)];
            if (method_.a(l) != 0.0) rhs -= method_.a(l) * (B_own_ * ul);
            if (method_.b(l) != 0.0) rhs -= (dt * method_.b(l)) * (A_own_ * ul);
        }
        if (method_.a(l) != 0.0 || method_.b(l) != 0.0) {
            const Eigen::VectorXd z = peer_gamma_at(t);
            if (method_.a(l) != 0.0) rhs -= method_.a(l) * (B_peer_ * z);
            if (method_.b(l) != 0.0) rhs -= (dt * method_.b(l)) * (A_peer_ * z);
        }
    }
    return solver_->solve(rhs);
}

} // namespace awr
