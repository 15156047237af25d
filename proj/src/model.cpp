#include "awr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace awr {

using Triplet = Eigen::Triplet<double>;

Eigen::VectorXd MonolithicSystem::forcing(double t) const {
    if (f) return f(t);
    return Eigen::VectorXd::Zero(dim());
}

void MonolithicSystem::validate() const {
    if (B.rows() != B.cols() || A.rows() != A.cols() || A.rows() != B.rows())
        throw std::invalid_argument("MonolithicSystem: B, A must be square and equal-sized");
    if (u0.size() != B.rows())
        throw std::invalid_argument("MonolithicSystem: u0 size mismatch");
    if (Tf <= 0.0) throw std::invalid_argument("MonolithicSystem: Tf must be positive");
}

void CoupledPartition::validate(int dim) const {
    std::vector<char> seen(static_cast<size_t>(dim), 0);
    for (int i : v_indices) {
        if (i < 0 || i >= dim || seen[static_cast<size_t>(i)]++)
            throw std::invalid_argument("CoupledPartition: v/w must disjointly cover 0..d-1");
    }
    for (int i : w_indices) {
        if (i < 0 || i >= dim || seen[static_cast<size_t>(i)]++)
            throw std::invalid_argument("CoupledPartition: v/w must disjointly cover 0..d-1");
    }
    if (static_cast<int>(v_indices.size() + w_indices.size()) != dim)
        throw std::invalid_argument("CoupledPartition: v/w must cover all unknowns");
    auto contained = [](const std::vector<int>& sub, const std::vector<int>& super) {
        return std::all_of(sub.begin(), sub.end(), [&](int g) {
            return std::find(super.begin(), super.end(), g) != super.end();
        });
    };
    if (!contained(gamma_v, v_indices) || !contained(gamma_w, w_indices))
        throw std::invalid_argument("CoupledPartition: gamma sets must lie in their sides");
}

namespace {

std::vector<int> local_positions(const std::vector<int>& gamma, const std::vector<int>& side) {
    std::vector<int> local;
    local.reserve(gamma.size());
    for (int g : gamma) {
        auto it = std::find(side.begin(), side.end(), g);
        if (it == side.end()) throw std::invalid_argument("gamma index outside its side");
        local.push_back(static_cast<int>(it - side.begin()));
    }
    return local;
}

} // namespace

std::vector<int> CoupledPartition::gamma_v_local() const { return local_positions(gamma_v, v_indices); }
std::vector<int> CoupledPartition::gamma_w_local() const { return local_positions(gamma_w, w_indices); }

std::string to_string(SplitKind kind) {
    switch (kind) {
        case SplitKind::jacobi: return "jacobi";
        case SplitKind::gs_dn: return "gs-dn";
        case SplitKind::gs_nd: return "gs-nd";
    }
    return "?";
}

SparseMat submatrix(const SparseMat& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    std::vector<int> rowmap(static_cast<size_t>(M.rows()), -1), colmap(static_cast<size_t>(M.cols()), -1);
    for (size_t i = 0; i < rows.size(); ++i) rowmap[static_cast<size_t>(rows[i])] = static_cast<int>(i);
    for (size_t i = 0; i < cols.size(); ++i) colmap[static_cast<size_t>(cols[i])] = static_cast<int>(i);
    std::vector<Triplet> trips;
    for (int k = 0; k < M.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(M, k); it; ++it) {
            const int r = rowmap[static_cast<size_t>(it.row())];
            const int c = colmap[static_cast<size_t>(it.col())];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
        }
    }
    SparseMat sub(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    sub.setFromTriplets(trips.begin(), trips.end());
    return sub;
}

namespace {

// Splits one matrix X into (MX, NX) with X = MX - NX: same-side columns are
// scaled by the inverse folded relaxation weight, cross couplings go to the
// implicit side exactly when the consuming side read current-iteration data.
void split_matrix(const SparseMat& X, const std::vector<char>& in_v, const std::vector<double>& col_scale,
                  bool v_fresh, bool w_fresh, SparseMat& MX, SparseMat& NX) {
    std::vector<Triplet> mt, nt;
    for (int k = 0; k < X.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(X, k); it; ++it) {
            const auto r = static_cast<size_t>(it.row()), c = static_cast<size_t>(it.col());
            if (in_v[r] == in_v[c]) {
                const double s = col_scale[c];
                mt.emplace_back(it.row(), it.col(), it.value() * s);
                if (s != 1.0) nt.emplace_back(it.row(), it.col(), it.value() * (s - 1.0));
            } else {
                const bool fresh = in_v[r] ? v_fresh : w_fresh;
                if (fresh)
                    mt.emplace_back(it.row(), it.col(), it.value());
                else
                    nt.emplace_back(it.row(), it.col(), -it.value());
            }
        }
    }
    MX.resize(X.rows(), X.cols());
    NX.resize(X.rows(), X.cols());
    MX.setFromTriplets(mt.begin(), mt.end());
    NX.setFromTriplets(nt.begin(), nt.end());
}

} // namespace

Splitting make_splitting_flags(const MonolithicSystem& sys, const CoupledPartition& part,
                               bool v_consumed_fresh, bool w_consumed_fresh,
                               double theta_v, double theta_w) {
    sys.validate();
    part.validate(sys.dim());
    if (theta_v <= 0.0 || theta_w <= 0.0)
        throw std::invalid_argument("make_splitting_flags: theta must be positive");

    std::vector<char> in_v(static_cast<size_t>(sys.dim()), 0);
    for (int i : part.v_indices) in_v[static_cast<size_t>(i)] = 1;
    std::vector<double> col_scale(static_cast<size_t>(sys.dim()), 1.0);
    for (int i : part.gamma_v) col_scale[static_cast<size_t>(i)] = 1.0 / theta_v;
    for (int i : part.gamma_w) col_scale[static_cast<size_t>(i)] = 1.0 / theta_w;

    Splitting s;
    s.theta_v = theta_v;
    s.theta_w = theta_w;
    split_matrix(sys.B, in_v, col_scale, v_consumed_fresh, w_consumed_fresh, s.MB, s.NB);
    split_matrix(sys.A, in_v, col_scale, v_consumed_fresh, w_consumed_fresh, s.MA, s.NA);
    return s;
}

Splitting make_splitting(const MonolithicSystem& sys, const CoupledPartition& part,
                         SplitKind kind, double theta_v, double theta_w) {
    if (theta_v > 1.0 || theta_w > 1.0)
        throw std::invalid_argument("make_splitting: theta must lie in (0, 1]");
    const bool v_fresh = kind == SplitKind::gs_nd; // v consumes fresh data when w ran first
    const bool w_fresh = kind == SplitKind::gs_dn;
    Splitting s = make_splitting_flags(sys, part, v_fresh, w_fresh, theta_v, theta_w);
    s.kind = kind;
    return s;
}

double benchmark_initial_temperature_1d(double x) {
    return 500.0 * std::sin(std::numbers::pi / 2.0 * (x + 1.0));
}

double benchmark_initial_temperature_2d(double x, double y) {
    return benchmark_initial_temperature_1d(x) * std::sin(std::numbers::pi * y);
}

namespace {

int cell_count(const HeatProblemConfig& config) {
    const double inv = 1.0 / config.dx;
    const int n = static_cast<int>(std::lround(inv));
    if (n < 2 || std::abs(inv - n) > 1e-9 * inv)
        throw std::invalid_argument("assemble_heat: 1/dx must be an integer >= 2");
    return n;
}

std::function<double(double, double)> temperature_profile(const HeatProblemConfig& config) {
    if (config.initial_temperature) return config.initial_temperature;
    if (config.dimension == 1) return [](double x, double) { return benchmark_initial_temperature_1d(x); };
    return [](double x, double y) { return benchmark_initial_temperature_2d(x, y); };
}

HeatProblem assemble_heat_1d(const HeatProblemConfig& config) {
    const int n = cell_count(config);
    const double dx = 1.0 / n;
    const auto [a1, l1] = std::pair{config.mat1.alpha, config.mat1.lambda};
    const auto [a2, l2] = std::pair{config.mat2.alpha, config.mat2.lambda};
    const int d = 2 * n;
    const int qrow = n - 1, urow = n;

    std::vector<Triplet> tb, ta;
    auto massB = [&](int r, int c, double val) { tb.emplace_back(r, c, val); };
    auto stiffA = [&](int r, int c, double val) { ta.emplace_back(r, c, val); };

    // Omega_1 interior nodes, global g = 0..n-2 at x = -1 + (g+1) dx; the
    // right neighbor of the last one is the interface temperature column.
    for (int g = 0; g <= n - 2; ++g) {
        massB(g, g, a1 * 2.0 * dx / 3.0);
        stiffA(g, g, l1 * 2.0 / dx);
        if (g > 0) {
            massB(g, g - 1, a1 * dx / 6.0);
            stiffA(g, g - 1, -l1 / dx);
        }
        const int right = (g == n - 2) ? urow : g + 1;
        massB(g, right, a1 * dx / 6.0);
        stiffA(g, right, -l1 / dx);
    }
    // Flux equation: Omega_1 weak form tested at the interface node, with the
    // flux unknown closing it; its B column stays structurally empty.
    massB(qrow, n - 2, a1 * dx / 6.0);
    massB(qrow, urow, a1 * dx / 3.0);
    stiffA(qrow, n - 2, -l1 / dx);
    stiffA(qrow, urow, l1 / dx);
    stiffA(qrow, qrow, -1.0);
    // Interface temperature equation: Omega_2 weak form at the same node,
    // Neumann-coupled through +q.
    massB(urow, urow, a2 * dx / 3.0);
    massB(urow, n + 1, a2 * dx / 6.0);
    stiffA(urow, urow, l2 / dx);
    stiffA(urow, n + 1, -l2 / dx);
    stiffA(urow, qrow, 1.0);
    // Omega_2 interior nodes, global g = n+1..2n-1 at x = (g-n) dx.
    for (int g = n + 1; g <= 2 * n - 1; ++g) {
        massB(g, g, a2 * 2.0 * dx / 3.0);
        stiffA(g, g, l2 * 2.0 / dx);
        massB(g, g - 1, a2 * dx / 6.0);
        stiffA(g, g - 1, -l2 / dx);
        if (g < 2 * n - 1) {
            massB(g, g + 1, a2 * dx / 6.0);
            stiffA(g, g + 1, -l2 / dx);
        }
    }

    HeatProblem p;
    p.cells = n;
    p.dimension = 1;
    p.interface_norm_weight = 1.0;
    p.system.B.resize(d, d);
    p.system.A.resize(d, d);
    p.system.B.setFromTriplets(tb.begin(), tb.end());
    p.system.A.setFromTriplets(ta.begin(), ta.end());
    p.system.Tf = config.Tf;

    const auto T0 = temperature_profile(config);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(d);
    for (int g = 0; g <= n - 2; ++g) u0(g) = T0(-1.0 + (g + 1) * dx, 0.0);
    u0(urow) = T0(0.0, 0.0);
    for (int g = n + 1; g <= 2 * n - 1; ++g) u0(g) = T0((g - n) * dx, 0.0);
    u0(qrow) = initial_flux(config)(0);
    p.system.u0 = u0;

    for (int i = 0; i < n; ++i) p.partition.v_indices.push_back(i);
    for (int i = n; i < d; ++i) p.partition.w_indices.push_back(i);
    p.partition.gamma_v = {qrow};
    p.partition.gamma_w = {urow};
    return p;
}

struct Grid2D {
    int n;                  // cells per unit length
    int interior1, per_col; // (n-1)^2 and n-1

    explicit Grid2D(int cells) : n(cells), interior1((cells - 1) * (cells - 1)), per_col(cells - 1) {}

    // Node (i, j) with x = -1 + i dx (i = 0..2n), y = j dx (j = 0..n).
    bool boundary(int i, int j) const { return i == 0 || i == 2 * n || j == 0 || j == n; }
    int q_index(int j) const { return interior1 + (j - 1); }
    int ug_index(int j) const { return interior1 + per_col + (j - 1); }
    int column(int i, int j) const {
        if (boundary(i, j)) return -1;
        if (i < n) return (i - 1) * per_col + (j - 1);
        if (i == n) return ug_index(j);
        return interior1 + 2 * per_col + (i - n - 1) * per_col + (j - 1);
    }
    // Interface test functions route to the flux equation for Omega_1
    // elements and to the interface-temperature equation for Omega_2 ones.
    int row(int i, int j, int domain) const {
        if (boundary(i, j)) return -1;
        if (i == n) return domain == 1 ? q_index(j) : ug_index(j);
        return column(i, j);
    }
    int dim() const { return 2 * interior1 + 2 * per_col; }
};

HeatProblem assemble_heat_2d(const HeatProblemConfig& config) {
    const int n = cell_count(config);
    const double dx = 1.0 / n;
    const Grid2D grid(n);
    const int d = grid.dim();

    std::vector<Triplet> tb, ta;
    const auto add_triangle = [&](const std::array<std::pair<int, int>, 3>& nodes, int domain) {
        const MaterialParams& mat = domain == 1 ? config.mat1 : config.mat2;
        double x[3], y[3];
        for (int r = 0; r < 3; ++r) {
            x[r] = -1.0 + nodes[r].first * dx;
            y[r] = nodes[r].second * dx;
        }
        const double det = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
        const double area = std::abs(det) / 2.0;
        double bcoef[3], ccoef[3];
        for (int r = 0; r < 3; ++r) {
            const int s = (r + 1) % 3, t = (r + 2) % 3;
            bcoef[r] = y[s] - y[t];
            ccoef[r] = x[t] - x[s];
        }
        for (int r = 0; r < 3; ++r) {
            const int R = grid.row(nodes[r].first, nodes[r].second, domain);
            if (R < 0) continue;
            for (int c = 0; c < 3; ++c) {
                const int C = grid.column(nodes[c].first, nodes[c].second);
                if (C < 0) continue;
                tb.emplace_back(R, C, mat.alpha * area / 12.0 * (r == c ? 2.0 : 1.0));
                ta.emplace_back(R, C, mat.lambda * (bcoef[r] * bcoef[c] + ccoef[r] * ccoef[c]) / (4.0 * area));
            }
        }
    };

    for (int ci = 0; ci < 2 * n; ++ci) {
        for (int cj = 0; cj < n; ++cj) {
            const int domain = ci < n ? 1 : 2;
            const std::pair<int, int> ll{ci, cj}, lr{ci + 1, cj}, ur{ci + 1, cj + 1}, ul{ci, cj + 1};
            add_triangle({ll, lr, ur}, domain);
            add_triangle({ll, ur, ul}, domain);
        }
    }
    for (int j = 1; j <= n - 1; ++j) {
        ta.emplace_back(grid.q_index(j), grid.q_index(j), -1.0);
        ta.emplace_back(grid.ug_index(j), grid.q_index(j), 1.0);
    }

    HeatProblem p;
    p.cells = n;
    p.dimension = 2;
    p.interface_norm_weight = std::sqrt(dx);
    p.system.B.resize(d, d);
    p.system.A.resize(d, d);
    p.system.B.setFromTriplets(tb.begin(), tb.end());
    p.system.A.setFromTriplets(ta.begin(), ta.end());
    p.system.Tf = config.Tf;

    const auto T0 = temperature_profile(config);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(d);
    for (int i = 1; i <= 2 * n - 1; ++i) {
        for (int j = 1; j <= n - 1; ++j) {
            if (i == n) continue;
            u0(grid.column(i, j)) = T0(-1.0 + i * dx, j * dx);
        }
    }
    const Eigen::VectorXd q0 = initial_flux(config);
    for (int j = 1; j <= n - 1; ++j) {
        u0(grid.ug_index(j)) = T0(0.0, j * dx);
        u0(grid.q_index(j)) = q0(j - 1);
    }
    p.system.u0 = u0;

    for (int i = 0; i < grid.interior1 + grid.per_col; ++i) p.partition.v_indices.push_back(i);
    for (int i = grid.interior1 + grid.per_col; i < d; ++i) p.partition.w_indices.push_back(i);
    for (int j = 1; j <= n - 1; ++j) p.partition.gamma_v.push_back(grid.q_index(j));
    for (int j = 1; j <= n - 1; ++j) p.partition.gamma_w.push_back(grid.ug_index(j));
    return p;
}

} // namespace

HeatProblem assemble_heat(const HeatProblemConfig& config) {
    if (config.Nv < 1 || config.Nw < 1)
        throw std::invalid_argument("assemble_heat: Nv, Nw must be >= 1");
    if (config.dimension == 1) return assemble_heat_1d(config);
    if (config.dimension == 2) return assemble_heat_2d(config);
    throw std::invalid_argument("assemble_heat: dimension must be 1 or 2");
}

Eigen::VectorXd initial_flux(const HeatProblemConfig& config) {
    const int n = cell_count(config);
    const double dx = 1.0 / n;
    const auto T0 = temperature_profile(config);
    const double l1 = config.mat1.lambda;
    if (config.dimension == 1) {
        Eigen::VectorXd q(1);
        q(0) = l1 * (T0(0.0, 0.0) - T0(-dx, 0.0)) / dx;
        return q;
    }
    // The P1 gradient on the triangle adjacent to interface segment s is
    // constant in x, determined by the segment's lower edge pair; each
    // segment contributes dx/2 to both endpoint test functions.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n - 1);
    std::vector<double> g(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const double y = s * dx;
        g[static_cast<size_t>(s)] = (T0(0.0, y) - T0(-dx, y)) / dx;
    }
    for (int j = 1; j <= n - 1; ++j)
        q(j - 1) = l1 * (g[static_cast<size_t>(j - 1)] + g[static_cast<size_t>(j)]) * dx / 2.0;
    return q;
}

} // namespace awr
