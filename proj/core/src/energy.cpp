#include "glpin/energy.hpp"

#include <cmath>
#include <string>

#include "glpin/errors.hpp"

namespace glpin {

CellRegion cells_in_ball(const Grid& g, Vec2 center, double radius) {
    CellRegion r;
    r.include.assign(g.num_cells(), 0);
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci)
            if (dist(g.cell_center(ci, cj), center) < radius)
                r.include[g.cell(ci, cj)] = 1;
    return r;
}

CellRegion cells_outside_balls(const Grid& g, std::span<const Vec2> centers, double radius) {
    CellRegion r;
    r.include.assign(g.num_cells(), 1);
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci)
            for (const Vec2& c : centers)
                if (dist(g.cell_center(ci, cj), c) < radius) {
                    r.include[g.cell(ci, cj)] = 0;
                    break;
                }
    return r;
}

namespace {

// Node quadrature weights restricted to a cell subset.
std::vector<double> region_node_area(const Grid& g, const CellRegion* region) {
    std::vector<double> area(g.num_nodes(), 0.0);
    const double q = 0.25 * g.h * g.h;
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci) {
            const int c = g.cell(ci, cj);
            if (!g.cell_on[c]) continue;
            if (region && !region->include[c]) continue;
            area[g.node(ci, cj)] += q;
            area[g.node(ci + 1, cj)] += q;
            area[g.node(ci, cj + 1)] += q;
            area[g.node(ci + 1, cj + 1)] += q;
        }
    return area;
}

enum class Weight { One, USquared };

// Shared cell/node sweep.  Row partial sums keep the reduction order fixed.
template <bool WithGrad>
EnergyBreakdown complex_energy(const ComplexField& u, const ScalarField& w,
                               double eps, Weight weight, bool pot_u4,
                               const CellRegion* region, std::vector<cplx>* grad) {
    const Grid& g = *u.grid;
    const double h = g.h;
    EnergyBreakdown e;

    if (WithGrad) {
        grad->assign(g.num_nodes(), cplx{});
    }

    for (int cj = 0; cj < g.ny; ++cj) {
        double row = 0.0;
        for (int ci = 0; ci < g.nx; ++ci) {
            const int c = g.cell(ci, cj);
            if (!g.cell_on[c]) continue;
            if (region && !region->include[c]) continue;
            const int p00 = g.node(ci, cj), p10 = g.node(ci + 1, cj);
            const int p01 = g.node(ci, cj + 1), p11 = g.node(ci + 1, cj + 1);
            const cplx ux = (u.v[p10] + u.v[p11] - u.v[p00] - u.v[p01]) / (2 * h);
            const cplx uy = (u.v[p01] + u.v[p11] - u.v[p00] - u.v[p10]) / (2 * h);
            double wc = 1.0;
            if (weight == Weight::USquared) {
                const double um = 0.25 * (w.v[p00] + w.v[p10] + w.v[p01] + w.v[p11]);
                wc = um * um;
            }
            row += 0.5 * h * h * wc * (std::norm(ux) + std::norm(uy));
            if (WithGrad) {
                const double s = 0.5 * h * wc;
                (*grad)[p00] += s * (-ux - uy);
                (*grad)[p10] += s * (ux - uy);
                (*grad)[p01] += s * (-ux + uy);
                (*grad)[p11] += s * (ux + uy);
            }
        }
        e.gradient += row;
    }

    const std::vector<double>* area = &g.node_area;
    std::vector<double> scratch;
    if (region) {
        scratch = region_node_area(g, region);
        area = &scratch;
    }
    const double inv4e2 = 1.0 / (4.0 * eps * eps);
    for (int j = 0; j <= g.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i <= g.nx; ++i) {
            const int id = g.node(i, j);
            const double A = (*area)[id];
            if (A == 0.0) continue;
            const double wn = w.v[id];
            const double target = pot_u4 ? 1.0 : wn * wn; // |u|^2 is compared to a^2 or to 1
            const double coef = pot_u4 ? wn * wn * wn * wn : 1.0;
            const double dev = target - std::norm(u.v[id]);
            row += A * inv4e2 * coef * dev * dev;
            if (WithGrad)
                (*grad)[id] += -A * coef * dev / (eps * eps) * u.v[id];
        }
        e.potential += row;
    }

    if (WithGrad) {
        for (int id = 0; id < g.num_nodes(); ++id)
            if (!g.interior(id)) (*grad)[id] = cplx{};
    }

    e.total = e.gradient + e.potential;
    return e;
}

void check_weight_bounds(const ScalarField& U, double contrast) {
    const Grid& g = *U.grid;
    for (int id = 0; id < g.num_nodes(); ++id) {
        if (!g.carries_value(id)) continue;
        if (U.v[id] < contrast - kWeightTol || U.v[id] > 1.0 + kWeightTol)
            throw InvariantError("weight out of [b,1] at node " + std::to_string(id) +
                                 ": " + std::to_string(U.v[id]));
    }
}

} // namespace

EnergyBreakdown energy_E(const ComplexField& u, const ScalarField& a, double eps,
                         const CellRegion* region) {
    return complex_energy<false>(u, a, eps, Weight::One, /*pot_u4=*/false, region, nullptr);
}

EnergyBreakdown energy_F(const ComplexField& v, const ScalarField& U, double eps,
                         std::optional<double> contrast, const CellRegion* region) {
    if (contrast) check_weight_bounds(U, *contrast);
    return complex_energy<false>(v, U, eps, Weight::USquared, /*pot_u4=*/true, region, nullptr);
}

EnergyBreakdown energy_E_with_grad(const ComplexField& u, const ScalarField& a,
                                   double eps, std::vector<cplx>& grad) {
    return complex_energy<true>(u, a, eps, Weight::One, false, nullptr, &grad);
}

EnergyBreakdown energy_F_with_grad(const ComplexField& v, const ScalarField& U,
                                   double eps, std::vector<cplx>& grad) {
    return complex_energy<true>(v, U, eps, Weight::USquared, true, nullptr, &grad);
}

EnergyBreakdown energy_U(const ScalarField& U, const ScalarField& a, double eps) {
    const Grid& g = *U.grid;
    const double h = g.h;
    EnergyBreakdown e;
    for (int cj = 0; cj < g.ny; ++cj) {
        double row = 0.0;
        for (int ci = 0; ci < g.nx; ++ci) {
            if (!g.cell_on[g.cell(ci, cj)]) continue;
            const int p00 = g.node(ci, cj), p10 = g.node(ci + 1, cj);
            const int p01 = g.node(ci, cj + 1), p11 = g.node(ci + 1, cj + 1);
            const double ux = (U.v[p10] + U.v[p11] - U.v[p00] - U.v[p01]) / (2 * h);
            const double uy = (U.v[p01] + U.v[p11] - U.v[p00] - U.v[p10]) / (2 * h);
            row += 0.5 * h * h * (ux * ux + uy * uy);
        }
        e.gradient += row;
    }
    const double inv4e2 = 1.0 / (4.0 * eps * eps);
    for (int j = 0; j <= g.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i <= g.nx; ++i) {
            const int id = g.node(i, j);
            const double A = g.node_area[id];
            if (A == 0.0) continue;
            const double dev = a.v[id] * a.v[id] - U.v[id] * U.v[id];
            row += A * inv4e2 * dev * dev;
        }
        e.potential += row;
    }
    e.total = e.gradient + e.potential;
    return e;
}

EnergyBreakdown energy_U_with_grad(const ScalarField& U, const ScalarField& a,
                                   double eps, std::vector<double>& grad) {
    const Grid& g = *U.grid;
    const double h = g.h;
    EnergyBreakdown e;
    grad.assign(g.num_nodes(), 0.0);
    for (int cj = 0; cj < g.ny; ++cj) {
        double row = 0.0;
        for (int ci = 0; ci < g.nx; ++ci) {
            if (!g.cell_on[g.cell(ci, cj)]) continue;
            const int p00 = g.node(ci, cj), p10 = g.node(ci + 1, cj);
            const int p01 = g.node(ci, cj + 1), p11 = g.node(ci + 1, cj + 1);
            const double ux = (U.v[p10] + U.v[p11] - U.v[p00] - U.v[p01]) / (2 * h);
            const double uy = (U.v[p01] + U.v[p11] - U.v[p00] - U.v[p10]) / (2 * h);
            row += 0.5 * h * h * (ux * ux + uy * uy);
            const double s = 0.5 * h;
            grad[p00] += s * (-ux - uy);
            grad[p10] += s * (ux - uy);
            grad[p01] += s * (-ux + uy);
            grad[p11] += s * (ux + uy);
        }
        e.gradient += row;
    }
    const double inv4e2 = 1.0 / (4.0 * eps * eps);
    for (int j = 0; j <= g.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i <= g.nx; ++i) {
            const int id = g.node(i, j);
            const double A = g.node_area[id];
            if (A == 0.0) continue;
            const double dev = a.v[id] * a.v[id] - U.v[id] * U.v[id];
            row += A * inv4e2 * dev * dev;
            grad[id] += -A * dev * U.v[id] / (eps * eps);
        }
        e.potential += row;
    }
    for (int id = 0; id < g.num_nodes(); ++id)
        if (!g.interior(id)) grad[id] = 0.0;
    e.total = e.gradient + e.potential;
    return e;
}

} // namespace glpin
