#include "awr/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace awr {

namespace {

Eigen::MatrixXd dense(const SparseMat& s) { return Eigen::MatrixXd(s); }

double norm2_of(const Eigen::MatrixXd& X) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double norminf_of(const Eigen::MatrixXd& X) {
    return X.rows() ? X.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
}

} // namespace

ShapeSequence constant_shape(SplitKind kind, double theta_v, double theta_w, int N) {
    if (N < 1) throw std::invalid_argument("constant_shape: need at least one step");
    if (!(theta_v > 0.0) || !(theta_w > 0.0))
        throw std::invalid_argument("constant_shape: theta must be positive");
    ShapeSequence seq(static_cast<size_t>(N) + 1);
    for (int j = 1; j <= N; ++j) {
        ShapePoint& p = seq[static_cast<size_t>(j)];
        p.fresh_ug = (kind == SplitKind::gs_nd);
        p.fresh_q = (kind == SplitKind::gs_dn);
        p.theta_ug = theta_w;
        p.theta_q = theta_v;
    }
    return seq;
}

ShapeSequence shape_sequence(const IterationRecord& record) {
    if (record.splitting_log.empty())
        throw std::invalid_argument("shape_sequence: record carries no splitting log");
    return record.splitting_log;
}

BlockPair::BlockPair(const MonolithicSystem& sys, const CoupledPartition& part,
                     const ShapeSequence& shapes, const LMMethod& method, const TimeGrid& grid)
    : N_(grid.N), d_(static_cast<int>(sys.B.rows())), dt_(grid.dt()), method_(method) {
    if (static_cast<int>(shapes.size()) != N_ + 1)
        throw std::invalid_argument("BlockPair: shape sequence must have one entry per grid point");
    if (N_ < method_.m)
        throw std::invalid_argument("BlockPair: grid too short for the method's step count");
    MB_.reserve(shapes.size());
    NB_.reserve(shapes.size());
    MA_.reserve(shapes.size());
    NA_.reserve(shapes.size());
    for (const ShapePoint& p : shapes) {
        const Splitting s =
            make_splitting_flags(sys, part, p.fresh_ug, p.fresh_q, p.theta_q, p.theta_ug);
        MB_.push_back(dense(s.MB));
        NB_.push_back(dense(s.NB));
        MA_.push_back(dense(s.MA));
        NA_.push_back(dense(s.NA));
    }
}

Eigen::MatrixXd BlockPair::C(int n, int l) const {
    if (n < method_.m || n > N_ || l < 0 || l > method_.m)
        throw std::out_of_range("BlockPair::C: block index out of range");
    const size_t j = static_cast<size_t>(n - method_.m + l);
    return method_.a[l] * MB_[j] + method_.b[l] * dt_ * MA_[j];
}

Eigen::MatrixXd BlockPair::D(int n, int l) const {
    if (n < method_.m || n > N_ || l < 0 || l > method_.m)
        throw std::out_of_range("BlockPair::D: block index out of range");
    const size_t j = static_cast<size_t>(n - method_.m + l);
    return method_.a[l] * NB_[j] + method_.b[l] * dt_ * NA_[j];
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_all_at_once(const BlockPair& blocks,
                                                              int dim_cap) {
    const int m = blocks.m(), N = blocks.N(), d = blocks.d();
    const int nb = N - m + 1;
    const long dim = static_cast<long>(d) * nb;
    if (dim > dim_cap)
        throw std::length_error("build_all_at_once: stacked dimension exceeds the cap");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = m; n <= N; ++n) {
        for (int l = 0; l <= m; ++l) {
            const int j = n - m + l;
            if (j < m) continue;
            C.block((n - m) * d, (j - m) * d, d, d) = blocks.C(n, l);
            D.block((n - m) * d, (j - m) * d, d, d) = blocks.D(n, l);
        }
    }
    return {std::move(C), std::move(D)};
}

std::string Theorem1Report::summary() const {
    std::ostringstream os;
    os << "pass = " << (pass ? "yes" : "no") << '\n';
    os << "diagonal_nonsingular = " << (diagonal_nonsingular ? "yes" : "no") << '\n';
    os << "blocks = " << norm2.size() << '\n';
    os << std::setprecision(12);
    os << "max_norm2 = " << max_norm2 << '\n';
    os << "max_norminf = " << max_norminf << '\n';
    return os.str();
}

Theorem1Report theorem1_check(const BlockPair& blocks) {
    Theorem1Report report;
    report.diagonal_nonsingular = true;
    const double inf = std::numeric_limits<double>::infinity();
    for (int n = blocks.m(); n <= blocks.N(); ++n) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(blocks.C(n, blocks.m()));
        if (!lu.isInvertible()) {
            report.diagonal_nonsingular = false;
            report.norm2.push_back(inf);
            report.norminf.push_back(inf);
            report.max_norm2 = inf;
            report.max_norminf = inf;
            continue;
        }
        const Eigen::MatrixXd X = lu.solve(blocks.D(n, blocks.m()));
        const double n2 = norm2_of(X), ninf = norminf_of(X);
        report.norm2.push_back(n2);
        report.norminf.push_back(ninf);
        report.max_norm2 = std::max(report.max_norm2, n2);
        report.max_norminf = std::max(report.max_norminf, ninf);
    }
    report.pass = report.diagonal_nonsingular && report.max_norm2 < 1.0;
    return report;
}

std::vector<std::vector<Eigen::VectorXd>>
error_recursion(const BlockPair& blocks, const std::vector<Eigen::VectorXd>& e0_history,
                int k_count) {
    const int m = blocks.m(), N = blocks.N(), d = blocks.d();
    const int nb = N - m + 1;
    if (k_count < 0) throw std::invalid_argument("error_recursion: negative iteration count");
    if (static_cast<int>(e0_history.size()) != nb)
        throw std::invalid_argument("error_recursion: starting history must cover n = m..N");
    for (const Eigen::VectorXd& e : e0_history)
        if (e.size() != d)
            throw std::invalid_argument("error_recursion: starting error has wrong dimension");

    std::vector<Eigen::FullPivLU<Eigen::MatrixXd>> diag;
    diag.reserve(static_cast<size_t>(nb));
    for (int n = m; n <= N; ++n) {
        diag.emplace_back(blocks.C(n, m));
        if (!diag.back().isInvertible())
            throw std::runtime_error("error_recursion: singular diagonal block");
    }

    std::vector<std::vector<Eigen::VectorXd>> out;
    out.reserve(static_cast<size_t>(k_count));
    std::vector<Eigen::VectorXd> prev = e0_history;
    for (int k = 0; k < k_count; ++k) {
        std::vector<Eigen::VectorXd> cur(static_cast<size_t>(nb));
        for (int n = m; n <= N; ++n) {
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
            for (int l = 0; l <= m; ++l) {
                const int j = n - m + l;
                if (j < m) continue;
                rhs += blocks.D(n, l) * prev[static_cast<size_t>(j - m)];
                if (l < m) rhs -= blocks.C(n, l) * cur[static_cast<size_t>(j - m)];
            }
            cur[static_cast<size_t>(n - m)] = diag[static_cast<size_t>(n - m)].solve(rhs);
        }
        out.push_back(cur);
        prev = std::move(cur);
    }
    return out;
}

double iteration_spectral_radius(const BlockPair& blocks, int dim_cap) {
    auto [C, D] = build_all_at_once(blocks, dim_cap);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    if (!lu.isInvertible())
        throw std::runtime_error("iteration_spectral_radius: singular stacked matrix");
    const Eigen::MatrixXd K = lu.solve(D);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(K, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace awr
