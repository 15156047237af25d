#include "awr/interp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace awr {

namespace {

std::vector<double> grid_times(const TimeGrid& grid) {
    std::vector<double> t(static_cast<size_t>(grid.N + 1));
    for (int n = 0; n <= grid.N; ++n) t[static_cast<size_t>(n)] = grid.time(n);
    return t;
}

void check_times(const std::vector<double>& t) {
    if (t.size() < 2) throw std::invalid_argument("Waveform: need at least two nodes");
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end())
        throw std::invalid_argument("Waveform: node times must be strictly increasing");
}

} // namespace

Waveform::Waveform(const TimeGrid& grid, int dim) : Waveform(grid_times(grid), dim) {}

Waveform::Waveform(const TimeGrid& grid, const Eigen::VectorXd& constant_value)
    : Waveform(grid_times(grid), constant_value) {}

Waveform::Waveform(std::vector<double> times, const Eigen::VectorXd& constant_value)
    : dim_(static_cast<int>(constant_value.size())), times_(std::move(times)) {
    check_times(times_);
    if (dim_ <= 0) throw std::invalid_argument("Waveform: dim must be positive");
    values_.assign(times_.size(), constant_value);
}

Waveform::Waveform(std::vector<double> times, int dim) : dim_(dim), times_(std::move(times)) {
    check_times(times_);
    if (dim_ <= 0) throw std::invalid_argument("Waveform: dim must be positive");
    values_.assign(times_.size(), Eigen::VectorXd::Zero(dim_));
}

const Eigen::VectorXd& Waveform::at(int n) const {
    if (n < 0 || n >= points()) throw std::out_of_range("Waveform::at: index out of range");
    return values_[static_cast<size_t>(n)];
}

void Waveform::update_point(int n, const Eigen::VectorXd& value) {
    if (n < 0 || n >= points()) throw std::out_of_range("Waveform::update_point: index out of range");
    if (value.size() != dim_) throw std::invalid_argument("Waveform::update_point: dimension mismatch");
    values_[static_cast<size_t>(n)] = value;
}

int Waveform::node_index(double t) const {
    // Node times coming from different grid constructions (own grid, union
    // grid, rational merges) can disagree in the last few bits; snap within a
    // horizon-relative tolerance so node evaluation is always a lookup.
    const double tol = 1e-9 * std::max(1.0, std::abs(times_.back()));
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && std::abs(*it - t) <= tol)
        return static_cast<int>(it - times_.begin());
    if (it != times_.begin() && std::abs(*(it - 1) - t) <= tol)
        return static_cast<int>(it - times_.begin()) - 1;
    return -1;
}

Eigen::VectorXd Waveform::eval(double t) const {
    const int snap = node_index(t);
    if (snap >= 0) return values_[static_cast<size_t>(snap)];
    if (t < times_.front() || t > times_.back())
        throw std::out_of_range("Waveform::eval: t outside the node range");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const int n = static_cast<int>(it - times_.begin()) - 1;
    const double t0 = times_[static_cast<size_t>(n)], t1 = times_[static_cast<size_t>(n + 1)];
    const double theta = (t - t0) / (t1 - t0);
    return (1.0 - theta) * values_[static_cast<size_t>(n)] + theta * values_[static_cast<size_t>(n + 1)];
}

EnclosingInterval enclosing_interval(const TimeGrid& own_grid, const TimeGrid& other_grid, int step_n) {
    if (step_n < 0 || step_n >= own_grid.N)
        throw std::out_of_range("enclosing_interval: step index out of range");
    // Own point n sits at fraction n/N_own of the horizon; the bracketing
    // other-grid indices follow from integer arithmetic on n*N_other.
    const long long No = own_grid.N, Nt = other_grid.N;
    const long long lo = (static_cast<long long>(step_n) * Nt) / No;              // floor
    const long long hi = (static_cast<long long>(step_n + 1) * Nt + No - 1) / No; // ceil
    EnclosingInterval e;
    e.index_minus = static_cast<int>(lo);
    e.index_plus = static_cast<int>(hi);
    e.t_minus = other_grid.time(e.index_minus);
    e.t_plus = other_grid.time(e.index_plus);
    return e;
}

UnionGrid::UnionGrid(const TimeGrid& gv, const TimeGrid& gw) {
    if (gv.Tf != gw.Tf) throw std::invalid_argument("UnionGrid: grids must share the horizon");
    const long long Nv = gv.N, Nw = gw.N;
    const long long g = std::gcd(Nv, Nw);
    const long long sv = Nw / g; // v-point i sits at rational position i*sv / lcm
    const long long sw = Nv / g;
    v_to_union_.resize(static_cast<size_t>(Nv + 1));
    w_to_union_.resize(static_cast<size_t>(Nw + 1));
    long long iv = 0, iw = 0;
    while (iv <= Nv || iw <= Nw) {
        const long long pv = iv <= Nv ? iv * sv : -1;
        const long long pw = iw <= Nw ? iw * sw : -1;
        const bool take_v = pv >= 0 && (pw < 0 || pv <= pw);
        const bool take_w = pw >= 0 && (pv < 0 || pw <= pv);
        const int j = static_cast<int>(times_.size());
        // Prefer the v-grid's own floating-point time when the point lies on
        // both grids, so v-side lookups stay bitwise exact.
        times_.push_back(take_v ? gv.time(static_cast<int>(iv)) : gw.time(static_cast<int>(iw)));
        union_to_v_.push_back(take_v ? static_cast<int>(iv) : -1);
        union_to_w_.push_back(take_w ? static_cast<int>(iw) : -1);
        if (take_v) v_to_union_[static_cast<size_t>(iv++)] = j;
        if (take_w) w_to_union_[static_cast<size_t>(iw++)] = j;
    }
}

} // namespace awr
