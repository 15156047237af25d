#include <doctest.h>

#include <cmath>
#include <vector>

#include "awr/interp.hpp"

using namespace awr;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

} // namespace

TEST_SUITE("interp") {

TEST_CASE("waveform stores nodes and interpolates linearly in between") {
    const TimeGrid grid{2.0, 4};
    Waveform w(grid, 2);
    CHECK(w.points() == 5);
    CHECK(w.dim() == 2);
    CHECK(w.Tf() == 2.0);
    CHECK(w.at(3).isZero());

    for (int n = 0; n <= 4; ++n) w.update_point(n, (Eigen::VectorXd(2) << n, n * n).finished());

    CHECK(w.eval(1.0)(0) == 2.0);
    CHECK(w.eval(1.0)(1) == 4.0);
    CHECK(w.eval(1.25)(0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(w.eval(1.25)(1) == doctest::Approx(0.5 * 4.0 + 0.5 * 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(w.eval(-0.1), std::out_of_range);
    CHECK_THROWS_AS(w.eval(2.1), std::out_of_range);
    CHECK_THROWS_AS(w.at(5), std::out_of_range);
    CHECK_THROWS_AS(w.update_point(0, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("node evaluation is a lookup, not interpolation") {
    // Store values no straight line through the neighbors could produce.
    const TimeGrid grid{1.0, 3};
    Waveform w(grid, 1);
    w.update_point(0, v1(0.0));
    w.update_point(1, v1(100.0));
    w.update_point(2, v1(-3.0));
    w.update_point(3, v1(7.0));
    CHECK(w.eval(grid.time(1))(0) == 100.0);
    CHECK(w.eval(grid.time(2))(0) == -3.0);
    CHECK(w.node_index(grid.time(2)) == 2);
    CHECK(w.node_index(grid.time(2) + 1e-12) == 2);
    CHECK(w.node_index(0.5) == -1);
}

TEST_CASE("constant waveform extrapolates the initial value") {
    const TimeGrid grid{5.0, 2};
    const Waveform w(grid, v1(42.0));
    CHECK(w.eval(0.0)(0) == 42.0);
    CHECK(w.eval(3.3)(0) == 42.0);
    CHECK(w.eval(5.0)(0) == 42.0);
}

TEST_CASE("waveforms accept explicit non-uniform nodes") {
    Waveform w(std::vector<double>{0.0, 0.1, 0.4, 1.0}, 1);
    w.update_point(1, v1(1.0));
    w.update_point(2, v1(4.0));
    CHECK(w.eval(0.25)(0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK_THROWS_AS(Waveform(std::vector<double>{0.0, 0.5, 0.5, 1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Waveform(std::vector<double>{0.0}, 1), std::invalid_argument);
}

TEST_CASE("update flags reset per sweep") {
    UpdateFlags f(3);
    CHECK_FALSE(f.test(0));
    f.set(2);
    CHECK(f.test(2));
    f.clear();
    CHECK_FALSE(f.test(2));
}

TEST_CASE("enclosing interval brackets an own step with other-grid nodes") {
    const TimeGrid own{1.0, 2}, other{1.0, 5};

    const EnclosingInterval e0 = enclosing_interval(own, other, 0);
    CHECK(e0.index_minus == 0);
    CHECK(e0.index_plus == 3);
    CHECK(e0.t_minus == 0.0);
    CHECK(e0.t_plus == other.time(3));

    const EnclosingInterval e1 = enclosing_interval(own, other, 1);
    CHECK(e1.index_minus == 2);
    CHECK(e1.index_plus == 5);
    CHECK(e1.t_minus <= own.time(1));
    CHECK(e1.t_plus == 1.0);

    // Matching grids bracket each step by its own endpoints.
    const EnclosingInterval same = enclosing_interval(own, TimeGrid{1.0, 2}, 1);
    CHECK(same.index_minus == 1);
    CHECK(same.index_plus == 2);

    // Coarser other grid: the whole horizon may be one interval.
    const EnclosingInterval c = enclosing_interval(other, own, 2);
    CHECK(c.index_minus == 0);
    CHECK(c.index_plus == 2);

    CHECK_THROWS_AS(enclosing_interval(own, other, 2), std::out_of_range);
}

TEST_CASE("union grid merges rational node positions exactly once") {
    const TimeGrid gv{1.0, 4}, gw{1.0, 6};
    const UnionGrid u(gv, gw);
    REQUIRE(u.points() == 9);

    const std::vector<double> expect{0.0, 1.0 / 6, 0.25, 1.0 / 3, 0.5, 2.0 / 3, 0.75, 5.0 / 6, 1.0};
    for (int j = 0; j < 9; ++j) CHECK(u.time(j) == doctest::Approx(expect[static_cast<size_t>(j)]).epsilon(1e-14));

    CHECK(u.from_v(0) == 0);
    CHECK(u.from_v(1) == 2);
    CHECK(u.from_v(2) == 4);
    CHECK(u.from_v(3) == 6);
    CHECK(u.from_v(4) == 8);
    CHECK(u.from_w(1) == 1);
    CHECK(u.from_w(3) == 4);
    CHECK(u.from_w(6) == 8);

    CHECK(u.to_v(2) == 1);
    CHECK(u.to_v(1) == -1);
    CHECK(u.to_w(1) == 1);
    CHECK(u.to_w(2) == -1);
    CHECK(u.to_v(4) == 2);
    CHECK(u.to_w(4) == 3);

    // Shared points carry the v-grid's floating-point time bit for bit.
    CHECK(u.time(4) == gv.time(2));
    CHECK(u.time(8) == gv.time(4));

    CHECK_THROWS_AS(UnionGrid(gv, TimeGrid{2.0, 6}), std::invalid_argument);
}

} // TEST_SUITE
