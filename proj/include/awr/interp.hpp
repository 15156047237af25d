#ifndef AWR_INTERP_HPP
#define AWR_INTERP_HPP

#include <Eigen/Dense>
#include <vector>

#include "awr/timegrid.hpp"

namespace awr {

// Discrete waveform: one value vector per node, individually replaceable,
// evaluated in between by piecewise-linear interpolation.  Nodes may be
// non-uniform (union grids); evaluation at a node is an exact lookup, never
// interpolation.  Not thread-safe by itself; concurrent remote updates go
// through the rma layer, which hands the owner a stable snapshot.
class Waveform {
public:
    Waveform() = default;
    Waveform(const TimeGrid& grid, int dim);
    Waveform(const TimeGrid& grid, const Eigen::VectorXd& constant_value);
    Waveform(std::vector<double> times, const Eigen::VectorXd& constant_value);
    Waveform(std::vector<double> times, int dim);

    int dim() const { return dim_; }
    int points() const { return static_cast<int>(times_.size()); }
    double time(int n) const { return times_.at(static_cast<size_t>(n)); }
    double Tf() const { return times_.back(); }

    const Eigen::VectorXd& at(int n) const;
    void update_point(int n, const Eigen::VectorXd& value);

    Eigen::VectorXd eval(double t) const;

    // Node index whose time matches t to rounding accuracy, or -1.
    int node_index(double t) const;

    const std::vector<double>& times() const { return times_; }
    const std::vector<Eigen::VectorXd>& values() const { return values_; }

private:
    int dim_ = 0;
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> values_;
};

// Per-point update indicators for a peer's grid, cleared at the start of each
// iteration sweep and monotone false -> true within it.
struct UpdateFlags {
    std::vector<bool> flags;

    explicit UpdateFlags(int n_points = 0) : flags(static_cast<size_t>(n_points), false) {}
    void clear() { flags.assign(flags.size(), false); }
    void set(int n) { flags.at(static_cast<size_t>(n)) = true; }
    bool test(int n) const { return flags.at(static_cast<size_t>(n)); }
};

struct EnclosingInterval {
    double t_minus;
    double t_plus;
    int index_minus; // grid index of t_minus in the other grid
    int index_plus;  // grid index of t_plus; its update indicator decides "ahead"
};

// Smallest interval [t_minus, t_plus] with endpoints in other_grid bracketing
// the step [t(step_n), t(step_n+1)] of own_grid.  Pure index arithmetic,
// no floating-point comparisons.
EnclosingInterval enclosing_interval(const TimeGrid& own_grid, const TimeGrid& other_grid, int step_n);

// Union T = T_v u T_w of two uniform grids over the same horizon.  Points are
// identified by exact rational positions n/N; the union is addressed by
// sorted index, with maps back to the originating grids.
class UnionGrid {
public:
    UnionGrid(const TimeGrid& gv, const TimeGrid& gw);

    int points() const { return static_cast<int>(times_.size()); }
    double time(int j) const { return times_.at(static_cast<size_t>(j)); }
    const std::vector<double>& times() const { return times_; }

    // Index of grid-v point n within the union (and the w analogue).
    int from_v(int n) const { return v_to_union_.at(static_cast<size_t>(n)); }
    int from_w(int n) const { return w_to_union_.at(static_cast<size_t>(n)); }

    // Union point j as an index of grid v, or -1 if t_j is not a v-point.
    int to_v(int j) const { return union_to_v_.at(static_cast<size_t>(j)); }
    int to_w(int j) const { return union_to_w_.at(static_cast<size_t>(j)); }

private:
    std::vector<double> times_;
    std::vector<int> v_to_union_, w_to_union_;
    std::vector<int> union_to_v_, union_to_w_;
};

} // namespace awr

#endif
