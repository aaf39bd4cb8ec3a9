#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "glpin/energy.hpp"
#include "glpin/errors.hpp"
#include "glpin/field_io.hpp"
#include "glpin/pinning.hpp"
#include "glpin/rescale.hpp"
#include "glpin/vortex.hpp"
#include "test_helpers.hpp"

using namespace glpin;
using namespace glpin::testing;

TEST_CASE("grid masks and areas") {
    GridPtr rect = DomainSpec::rectangle(32, 1.0, 1.0).build();
    CHECK(rect->active_area == doctest::Approx(1.0).epsilon(1e-14));

    GridPtr disc = DomainSpec::disc(128).build();
    // staircase area converges to pi from inside/outside at O(h)
    CHECK(disc->active_area == doctest::Approx(kPi).epsilon(0.05));
    CHECK(!disc->boundary_loop.empty());
    // every boundary-kind corner of an active cell sits on the perimeter loop
    for (int id : disc->boundary_loop) CHECK(disc->carries_value(id));
}

TEST_CASE("pinning field sampling") {
    GridPtr g = DomainSpec::disc(128).build();

    SUBCASE("no inclusions: field is one") {
        PinningConfig cfg = one_disc_config();
        cfg.centers.clear();
        ScalarField a = build_pinning_field(cfg, g);
        for (int id = 0; id < g->num_nodes(); ++id)
            if (g->carries_value(id)) CHECK(a.v[id] == 1.0);
    }

    SUBCASE("node values follow the scaled-shape predicate") {
        PinningConfig cfg = one_disc_config(0.5, 0.25, 0.025);
        cfg.centers = {{0.3, -0.1}};
        ScalarField a = build_pinning_field(cfg, g);
        CHECK(a.v[g->nearest_node({0.3, -0.1})] == 0.5);
        // independent geometric oracle: distance to the center vs delta*radius
        int checked = 0;
        for (int id = 0; id < g->num_nodes(); ++id) {
            if (!g->carries_value(id)) continue;
            const double r = dist(g->pos(id), cfg.centers[0]);
            if (std::abs(r - cfg.delta * 0.5) < 2 * g->h) continue; // skip the interface band
            const double expected = r < cfg.delta * 0.5 ? 0.5 : 1.0;
            CHECK(a.v[id] == expected);
            ++checked;
        }
        CHECK(checked > 1000);
        // any node farther than delta from the center is outside
        CHECK(a.v[g->nearest_node({0.3 + 1.5 * cfg.delta, -0.1})] == 1.0);
    }

    SUBCASE("invalid configurations are rejected") {
        PinningConfig cfg = one_disc_config();
        cfg.centers = {{0.95, 0.0}}; // touches the boundary
        CHECK_THROWS_AS(build_pinning_field(cfg, g), ConfigError);

        cfg = one_disc_config();
        cfg.centers = {{0.0, 0.0}, {0.05, 0.0}}; // overlapping inclusions
        CHECK_THROWS_AS(build_pinning_field(cfg, g), ConfigError);

        cfg = one_disc_config();
        cfg.eps = 0.3; // xi >= 1
        CHECK_THROWS_AS(build_pinning_field(cfg, g), ConfigError);

        cfg = one_disc_config();
        cfg.contrast = 1.0;
        CHECK_THROWS_AS(build_pinning_field(cfg, g), ConfigError);

        cfg = one_disc_config(0.5, 0.02, 0.002); // < 8 cells across
        CHECK_THROWS_AS(build_pinning_field(cfg, g), ConfigError);
    }
}

TEST_CASE("scale diagnostics") {
    const auto d = ScaleDiagnostics::from(0.02, 0.2);
    CHECK(d.xi == doctest::Approx(0.1));
    const double expect = std::pow(std::abs(std::log(0.2)), 3) / std::abs(std::log(0.02));
    CHECK(d.hypothesis_ratio == doctest::Approx(expect));
    CHECK(d.separation_warning == (expect > 1.0));
    CHECK(ScaleDiagnostics::from(1e-4, 0.5).separation_warning == false);
}

TEST_CASE("energy_E basics") {
    GridPtr g = DomainSpec::rectangle(64, 1.0, 1.0).build();
    ScalarField ones = fill_scalar(g, [](Vec2) { return 1.0; });

    SUBCASE("constant minimizer has zero energy") {
        ComplexField u = fill_complex(g, [](Vec2) { return cplx{1.0, 0.0}; });
        const auto e = energy_E(u, ones, 0.1);
        CHECK(e.total == 0.0);
    }

    SUBCASE("zero field on the unit square: potential |Omega|/(4 eps^2)") {
        ComplexField u = fill_complex(g, [](Vec2) { return cplx{0.0, 0.0}; });
        const double eps = 0.3;
        const auto e = energy_E(u, ones, eps);
        CHECK(e.gradient == 0.0);
        CHECK(e.potential == doctest::Approx(1.0 / (4 * eps * eps)).epsilon(1e-12));
    }
}

TEST_CASE("unit vortex Dirichlet energy on the annulus: pi ln 2") {
    // region 0.5 <= |x| <= 1 inside the disc grid, u = x/|x|
    double prev_err = 1e300;
    for (int n : {96, 192, 384}) {
        GridPtr g = DomainSpec::disc(n).build();
        ScalarField ones = fill_scalar(g, [](Vec2) { return 1.0; });
        ComplexField u = fill_complex(g, [](Vec2 p) { return unit_vortex(p, {0, 0}); });
        CellRegion annulus;
        annulus.include.assign(g->num_cells(), 0);
        for (int cj = 0; cj < g->ny; ++cj)
            for (int ci = 0; ci < g->nx; ++ci) {
                const double r = g->cell_center(ci, cj).norm();
                if (r >= 0.5 && r <= 1.0) annulus.include[g->cell(ci, cj)] = 1;
            }
        const auto e = energy_E(u, ones, 1.0, &annulus);
        const double err = std::abs(e.gradient - kPi * std::log(2.0));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.02);
}

TEST_CASE("energy_F weights") {
    GridPtr g = DomainSpec::disc(128).build();
    ScalarField ones = fill_scalar(g, [](Vec2) { return 1.0; });
    ComplexField v = fill_complex(g, [](Vec2 p) { return unit_vortex(p, {0.013, 0.007}); });

    SUBCASE("v == 1 gives zero for any admissible weight") {
        ComplexField one = fill_complex(g, [](Vec2) { return cplx{1.0, 0.0}; });
        ScalarField U = fill_scalar(g, [](Vec2 p) { return 0.6 + 0.4 * p.norm2() / 2.0; });
        CHECK(energy_F(one, U, 0.05).total == 0.0);
    }

    SUBCASE("weight one collapses to energy_E bitwise") {
        const auto ef = energy_F(v, ones, 0.05);
        const auto ee = energy_E(v, ones, 0.05);
        CHECK(ef.total == ee.total);
        CHECK(ef.gradient == ee.gradient);
        CHECK(ef.potential == ee.potential);
    }

    SUBCASE("constant weight b scales the gradient part by b^2") {
        const double b = 0.5;
        ScalarField Ub = fill_scalar(g, [&](Vec2) { return b; });
        const auto ef = energy_F(v, Ub, 0.05);
        const auto ee = energy_E(v, ones, 0.05);
        CHECK(ef.gradient == doctest::Approx(b * b * ee.gradient).epsilon(1e-13));
    }

    SUBCASE("pi b^2 ln 2 on the annulus") {
        GridPtr gg = DomainSpec::disc(384).build();
        ScalarField Ub = fill_scalar(gg, [](Vec2) { return 0.5; });
        ComplexField vv = fill_complex(gg, [](Vec2 p) { return unit_vortex(p, {0, 0}); });
        CellRegion annulus;
        annulus.include.assign(gg->num_cells(), 0);
        for (int cj = 0; cj < gg->ny; ++cj)
            for (int ci = 0; ci < gg->nx; ++ci) {
                const double r = gg->cell_center(ci, cj).norm();
                if (r >= 0.5 && r <= 1.0) annulus.include[gg->cell(ci, cj)] = 1;
            }
        const auto e = energy_F(vv, Ub, 1.0, 0.5, &annulus);
        CHECK(e.gradient == doctest::Approx(0.25 * kPi * std::log(2.0)).epsilon(0.01));
    }

    SUBCASE("weight bound check") {
        ScalarField Ubad = fill_scalar(g, [](Vec2) { return 0.4; });
        CHECK_THROWS_AS(energy_F(v, Ubad, 0.05, 0.5), InvariantError);
        ScalarField Uhigh = fill_scalar(g, [](Vec2) { return 1.1; });
        CHECK_THROWS_AS(energy_F(v, Uhigh, 0.05, 0.5), InvariantError);
        // tolerance slack of 1e-10 is allowed
        ScalarField Uedge = fill_scalar(g, [](Vec2) { return 0.5 - 5e-11; });
        CHECK_NOTHROW(energy_F(v, Uedge, 0.05, 0.5));
    }

    SUBCASE("monotonicity in the weight") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.5, 1.0);
        ScalarField U(g, 0.0);
        for (int id = 0; id < g->num_nodes(); ++id)
            if (g->carries_value(id)) U.v[id] = uni(rng);
        ScalarField Ub = fill_scalar(g, [](Vec2) { return 0.5; });
        ComplexField w = fill_complex(g, [](Vec2 p) {
            return cplx{1.0 + 0.2 * std::sin(3 * p.x), 0.3 * std::cos(2 * p.y)};
        });
        const double fb = energy_F(w, Ub, 0.05).total;
        const double fU = energy_F(w, U, 0.05).total;
        const double f1 = energy_F(w, ones, 0.05).total;
        CHECK(fb <= fU);
        CHECK(fU <= f1);
    }
}

TEST_CASE("quadrature h^2 convergence for smooth fields") {
    auto smooth = [](Vec2 p) {
        return cplx{std::sin(2 * p.x + p.y), 0.5 * std::cos(p.x - 3 * p.y)};
    };
    const double eps = 0.7;
    double errors[3];
    int k = 0;
    // reference on a very fine grid
    GridPtr gref = DomainSpec::rectangle(1024, 1.0, 1.0).build();
    const double ref = energy_E(fill_complex(gref, smooth),
                                fill_scalar(gref, [](Vec2) { return 1.0; }), eps).total;
    for (int n : {32, 64, 128}) {
        GridPtr g = DomainSpec::rectangle(n, 1.0, 1.0).build();
        const double e = energy_E(fill_complex(g, smooth),
                                  fill_scalar(g, [](Vec2) { return 1.0; }), eps).total;
        errors[k++] = std::abs(e - ref);
    }
    CHECK(errors[0] / errors[1] > 3.0); // ~4 for h^2
    CHECK(errors[1] / errors[2] > 3.0);
}

TEST_CASE("rescale_hat") {
    GridPtr g = DomainSpec::disc(256).build();

    SUBCASE("delta = 1 resamples the identity") {
        ComplexField v = fill_complex(g, [](Vec2 p) {
            return cplx{std::cos(p.x), std::sin(p.y)};
        });
        ComplexField w = rescale_hat(v, {0, 0}, 0.5, 1.0, 128);
        for (int id = 0; id < w.grid->num_nodes(); ++id) {
            if (!w.grid->carries_value(id)) continue;
            const Vec2 p = w.grid->pos(id);
            if (p.norm() > 0.5 - 0.02) continue;
            CHECK(std::abs(w.v[id] - v.v[g->nearest_node(p)]) < 5e-3);
        }
    }

    SUBCASE("constant maps to constant") {
        ComplexField v = fill_complex(g, [](Vec2) { return cplx{0.3, -0.4}; });
        ComplexField w = rescale_hat(v, {0.2, 0.1}, 0.4, 0.2, 96);
        for (int id = 0; id < w.grid->num_nodes(); ++id)
            if (w.grid->carries_value(id))
                CHECK(std::abs(w.v[id] - cplx{0.3, -0.4}) < 1e-12);
    }

    SUBCASE("vortex location transforms as (x - a)/delta") {
        const Vec2 a{0.25, -0.15};
        const double delta = 0.2;
        const Vec2 phat{0.3, 0.2}; // reference position
        const Vec2 pphys = a + phat * delta;
        ComplexField v = fill_complex(g, [&](Vec2 p) { return unit_vortex(p, pphys); });
        ComplexField w = rescale_hat(v, a, 0.3, delta, 192);
        const auto rep = find_zeros(w);
        REQUIRE(rep.zeros.size() == 1);
        CHECK(dist(rep.zeros[0].pos, phat) < 2.0 * w.grid->h);
        CHECK(rep.zeros[0].winding == 1);
    }

    SUBCASE("energy identity under blow-up") {
        const Vec2 a{0.0, 0.0};
        const double delta = 0.25, rho = 0.5, eps = 0.05;
        ComplexField v = fill_complex(g, [&](Vec2 p) { return unit_vortex(p, {0.013, 0.027}); });
        ScalarField U = fill_scalar(g, [](Vec2 p) { return 0.75 + 0.1 * std::sin(p.x); });
        CellRegion ball = cells_in_ball(*g, a, rho);
        const double F_phys = energy_F(v, U, eps, {}, &ball).total;

        ComplexField vh = rescale_hat(v, a, rho, delta, 512);
        ScalarField Uh = rescale_hat(U, a, rho, delta, 512);
        CellRegion ballh = cells_in_ball(*vh.grid, {0, 0}, rho / delta);
        const double F_hat = energy_F(vh, Uh, eps / delta, {}, &ballh).total;
        CHECK(F_hat == doctest::Approx(F_phys).epsilon(0.03));
    }

    SUBCASE("plaquette windings of interior loops survive") {
        ComplexField v = fill_complex(g, [&](Vec2 p) {
            return cored_vortex(p, {0.11, 0.053}, 0.02) *
                   cored_vortex(p, {-0.072, -0.031}, 0.02);
        });
        ComplexField w = rescale_hat(v, {0, 0}, 0.4, 0.2, 256);
        CHECK(find_zeros(w).zeros.size() == 2);
        for (const auto& z : find_zeros(w).zeros) CHECK(z.winding == 1);
    }

    SUBCASE("target extent violation throws") {
        ComplexField v = fill_complex(g, [](Vec2) { return cplx{1, 0}; });
        CHECK_THROWS_AS(rescale_hat(v, {0.8, 0.8}, 0.5, 0.2, 64), ConfigError);
    }
}

TEST_CASE("field serialization") {
    GridPtr g = DomainSpec::disc(48).build();
    ComplexField v = fill_complex(g, [](Vec2 p) {
        return cplx{p.x * p.x - p.y, 0.25 * p.x * p.y};
    });
    const std::string path = "unit_core_field.bin";
    save_field(v, path);
    ComplexField w = load_complex_field(path);
    REQUIRE(w.grid->num_nodes() == g->num_nodes());
    for (int id = 0; id < g->num_nodes(); ++id) {
        CHECK(w.v[id].real() == v.v[id].real());
        CHECK(w.v[id].imag() == v.v[id].imag());
    }
    save_csv(v, "unit_core_field.csv");
    std::remove(path.c_str());
    std::remove("unit_core_field.csv");
}
