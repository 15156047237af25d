#include <doctest.h>

#include <cmath>

#include "awr/materials.hpp"
#include "awr/relaxopt.hpp"

using namespace awr;

TEST_SUITE("relaxopt") {

TEST_CASE("single-node interface operator equals the Schur complement up to dt/dx") {
    // dx = 1/2 leaves one interior node per unit side; the interface operator
    // then reduces to a 2x2 Schur complement of the implicit Euler step
    // matrix, hand-built here from the element integrals.
    const MaterialParams air = materials::air();
    const double dx = 0.5, dt = 5.0;
    const double mAA = air.alpha * (2.0 * dx / 3.0) / dt + air.lambda * (2.0 / dx);
    const double mAG = air.alpha * (dx / 6.0) / dt - air.lambda / dx;
    const double mGG = air.alpha * (dx / 3.0) / dt + air.lambda / dx;
    const double schur = mGG - mAG * mAG / mAA;

    const double S = s_operator(air, dt, dx, 1);
    CHECK(S == doctest::Approx(schur * dt / dx).epsilon(1e-12));
    CHECK(S == doctest::Approx(379.7997622339101).epsilon(1e-12));
    CHECK(schur == doctest::Approx(37.979976223391006).epsilon(1e-12));
}

TEST_CASE("interface operators at the benchmark resolution") {
    const double dx = 1.0 / 513.0, dt = 5.0;
    CHECK(s_operator(materials::air(), dt, dx, 512) == doctest::Approx(6456.868772678952).epsilon(1e-12));
    CHECK(s_operator(materials::water(), dt, dx, 512) == doctest::Approx(2159167.9080053363).epsilon(1e-12));
    CHECK(s_operator(materials::steel(), dt, dx, 512) == doctest::Approx(14978900.227691265).epsilon(1e-12));
    CHECK_THROWS_AS(s_operator(materials::air(), dt, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(s_operator(materials::air(), 0.0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("optimal parameters for the three material pairings") {
    const double dx = 1.0 / 513.0, dt = 5.0;

    const RelaxTable as = relax_table(materials::air(), materials::steel(), dx, dt);
    CHECK(as.S1 / as.S2 == doctest::Approx(0.00043106427538266377).epsilon(1e-12));
    CHECK(as.theta_jacobi == doctest::Approx(0.9995691214609626).epsilon(1e-12));
    CHECK(as.rho_jacobi == doctest::Approx(0.020757614001552675).epsilon(1e-12));

    const RelaxTable aw = relax_table(materials::air(), materials::water(), dx, dt);
    CHECK(aw.S1 / aw.S2 == doctest::Approx(0.002990443100205153).epsilon(1e-12));
    CHECK(aw.theta_jacobi == doctest::Approx(0.9970184729866798).epsilon(1e-12));
    CHECK(aw.rho_jacobi == doctest::Approx(0.05460336082440434).epsilon(1e-12));

    const RelaxTable ws = relax_table(materials::water(), materials::steel(), dx, dt);
    CHECK(ws.S1 / ws.S2 == doctest::Approx(0.14414729220331646).epsilon(1e-12));
    CHECK(ws.theta_jacobi == doctest::Approx(0.8740133432246053).epsilon(1e-12));
    CHECK(ws.rho_jacobi == doctest::Approx(0.35494599134994426).epsilon(1e-12));

    // With positive operators the one-parameter optima coincide numerically.
    CHECK(ws.theta_gs_dn == doctest::Approx(ws.theta_jacobi).epsilon(1e-14));
    CHECK(ws.theta_gs_nd == ws.theta_gs_dn);
}

TEST_CASE("optimal theta annihilates the sequential interface iteration") {
    const double S1 = 321.5, S2 = 1876.25;
    const RelaxTable t = optimal_thetas(S1, S2);

    CHECK(spectral_radius(dn_interface_matrix(S1, S2, t.theta_gs_dn)) <= 1e-12);
    CHECK(spectral_radius(nd_interface_matrix(S1, S2, t.theta_gs_nd)) <= 1e-12);

    // Away from the optimum the radius grows linearly in the offset.
    CHECK(spectral_radius(dn_interface_matrix(S1, S2, 1.05 * t.theta_gs_dn)) >= 1e-3);
    CHECK(spectral_radius(nd_interface_matrix(S1, S2, 0.95 * t.theta_gs_nd)) >= 1e-3);
}

TEST_CASE("jacobi relaxation reaches its predicted optimum") {
    const double S1 = 321.5, S2 = 1876.25;
    const RelaxTable t = optimal_thetas(S1, S2);
    const double r = S1 / S2;

    CHECK(spectral_radius(jacobi_interface_matrix(S1, S2, 1.0)) == doctest::Approx(std::sqrt(r)).epsilon(1e-12));
    const double at_opt = spectral_radius(jacobi_interface_matrix(S1, S2, t.theta_jacobi));
    CHECK(at_opt == doctest::Approx(t.rho_jacobi).epsilon(1e-12));
    for (double off : {0.9, 0.97, 1.03, 1.1})
        CHECK(spectral_radius(jacobi_interface_matrix(S1, S2, off * t.theta_jacobi)) >= at_opt);
}

TEST_CASE("equal operators give the symmetric half-weight optimum") {
    const RelaxTable t = optimal_thetas(7.0, 7.0);
    CHECK(t.theta_jacobi == 0.5);
    CHECK(t.theta_gs_dn == 0.5);
    CHECK(t.rho_jacobi == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(optimal_thetas(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("per-side weights realize the classical methods") {
    const RelaxTable t = optimal_thetas(300.0, 900.0);
    const auto [jv, jw] = thetas_for(SplitKind::jacobi, t);
    CHECK(jv == t.theta_jacobi);
    CHECK(jw == t.theta_jacobi);
    const auto [dv, dw] = thetas_for(SplitKind::gs_dn, t);
    CHECK(dv == 1.0);
    CHECK(dw == t.theta_gs_dn);
    const auto [nv, nw] = thetas_for(SplitKind::gs_nd, t);
    CHECK(nv == t.theta_gs_nd);
    CHECK(nw == 1.0);
}

} // TEST_SUITE
