#ifndef AWR_TIMEGRID_HPP
#define AWR_TIMEGRID_HPP

#include <stdexcept>

namespace awr {

// Uniform time grid t_n = n*Tf/N on [0, Tf].  Grid points are addressed by
// index; times are derived values.  Two grids over the same horizon are
// compared through index arithmetic (rationals n/N), never through
// floating-point equality of times.
struct TimeGrid {
    double Tf = 0.0;
    int N = 0;

    TimeGrid() = default;
    TimeGrid(double Tf_, int N_) : Tf(Tf_), N(N_) {
        if (Tf <= 0.0 || N < 1) throw std::invalid_argument("TimeGrid: need Tf > 0, N >= 1");
    }

    double dt() const { return Tf / N; }

    double time(int n) const {
        if (n < 0 || n > N) throw std::out_of_range("TimeGrid::time: index out of range");
        if (n == N) return Tf;
        return (static_cast<double>(n) * Tf) / static_cast<double>(N);
    }
};

} // namespace awr

#endif
