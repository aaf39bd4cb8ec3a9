#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "glpin/special_solution.hpp"
#include "test_helpers.hpp"

using namespace glpin;
using namespace glpin::testing;

TEST_CASE("empty pinning: U is identically one") {
    GridPtr g = DomainSpec::disc(64).build();
    PinningConfig cfg = one_disc_config();
    cfg.centers.clear();
    const auto sol = solve_U(cfg, g);
    for (int id = 0; id < g->num_nodes(); ++id)
        if (g->carries_value(id)) CHECK(sol.U.v[id] == 1.0);
    CHECK(sol.el_residual == 0.0);
}

TEST_CASE("maximum principle bounds") {
    GridPtr g = DomainSpec::disc(128).build();
    PinningConfig cfg = one_disc_config(0.5, 0.3, 0.3 / 16);
    const auto sol = solve_U(cfg, g);
    double lo = 2.0, hi = -1.0;
    for (int id = 0; id < g->num_nodes(); ++id) {
        if (!g->carries_value(id)) continue;
        lo = std::min(lo, sol.U.v[id]);
        hi = std::max(hi, sol.U.v[id]);
    }
    CHECK(lo >= cfg.contrast - 1e-10);
    CHECK(hi <= 1.0 + 1e-10);
    CHECK(sol.el_residual < 1e-8);

    SUBCASE("bounds hold with the projection disabled") {
        SpecialSolveOptions opts;
        opts.project = false;
        const auto free_sol = solve_U(cfg, g, opts);
        double flo = 2.0, fhi = -1.0;
        for (int id = 0; id < g->num_nodes(); ++id) {
            if (!g->carries_value(id)) continue;
            flo = std::min(flo, free_sol.U.v[id]);
            fhi = std::max(fhi, free_sol.U.v[id]);
        }
        CHECK(flo >= cfg.contrast - 1e-10);
        CHECK(fhi <= 1.0 + 1e-10);
    }

    SUBCASE("initialization independence") {
        SpecialSolveOptions opts;
        opts.init_at_one = true;
        const auto other = solve_U(cfg, g, opts);
        double dev = 0.0;
        for (int id = 0; id < g->num_nodes(); ++id)
            if (g->carries_value(id))
                dev = std::max(dev, std::abs(other.U.v[id] - sol.U.v[id]));
        CHECK(dev < 1e-6);
    }
}

TEST_CASE("exponential closeness to the pinning coefficient") {
    GridPtr g = DomainSpec::disc(256).build();
    PinningConfig cfg = one_disc_config(0.5, 0.2, 0.2 / 16);
    const auto sol = solve_U(cfg, g);
    const auto rep = u_estimate_report(sol, cfg);

    // shell deviations decrease monotonically in R
    for (size_t k = 1; k < rep.max_dev.size(); ++k)
        CHECK(rep.max_dev[k] <= rep.max_dev[k - 1] + 1e-14);

    // log-linear fit has a genuinely negative slope
    CHECK(rep.fitted_c > 0.05);
    CHECK(rep.fitted_C > 0.0);

    // the gradient bound C e^{-cR/eps}/eps: shape check via the fit of eps*|grad U|
    CHECK(rep.grad_fitted_c > 0.05);
    for (size_t k = 0; k < rep.R.size(); ++k) {
        const double bound =
            3.0 * rep.grad_fitted_C * std::exp(-rep.grad_fitted_c * rep.R[k] / cfg.eps) / cfg.eps;
        CHECK(rep.max_grad[k] <= bound + 1e-12);
    }

    // the predicted rate sqrt(b(1+b))/4 is reported for comparison only
    CHECK(rep.predicted_c == doctest::Approx(std::sqrt(0.5 * 1.5) / 4.0));
}

TEST_CASE("estimate report on homogeneous coefficient is all zeros") {
    GridPtr g = DomainSpec::disc(64).build();
    PinningConfig cfg = one_disc_config();
    cfg.centers.clear();
    const auto sol = solve_U(cfg, g);
    const auto rep = u_estimate_report(sol, cfg);
    for (double d : rep.max_dev) CHECK(d == 0.0);
}

TEST_CASE("radial symmetry for a centered disc inclusion") {
    GridPtr g = DomainSpec::disc(128).build();
    PinningConfig cfg = one_disc_config(0.5, 0.3, 0.3 / 12);
    const auto sol = solve_U(cfg, g);
    // orbit of the grid symmetries: rotations by pi/2 and reflections
    double dev = 0.0;
    for (int j = 0; j <= g->ny; ++j)
        for (int i = 0; i <= g->nx; ++i) {
            const int id = g->node(i, j);
            if (!g->interior(id)) continue;
            const Vec2 p = g->pos(i, j);
            for (Vec2 q : {Vec2{-p.y, p.x}, Vec2{-p.x, -p.y}, Vec2{p.y, -p.x},
                           Vec2{p.x, -p.y}, Vec2{-p.x, p.y}}) {
                const int oid = g->nearest_node(q);
                if (!g->interior(oid)) continue;
                if (dist(g->pos(oid), q) > 1e-9) continue; // exact lattice images only
                dev = std::max(dev, std::abs(sol.U.v[id] - sol.U.v[oid]));
            }
        }
    CHECK(dev < 1e-6);
}

TEST_CASE("core resolution warning") {
    GridPtr g = DomainSpec::disc(64).build();
    PinningConfig cfg = one_disc_config(0.5, 0.4, 0.01); // eps < 2h = 0.0625
    const auto sol = solve_U(cfg, g);
    CHECK(sol.core_resolution_warning);
}
