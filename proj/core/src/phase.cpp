#include "glpin/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "glpin/errors.hpp"

namespace glpin {

namespace {
constexpr double kPi = std::numbers::pi;

double principal(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}
} // namespace

int PhaseProblem::total_degree() const {
    int d = 0;
    for (int k : degrees) d += k;
    return d;
}

void PhaseProblem::check(double h) const {
    if (vortices.size() != degrees.size())
        throw ConfigError("phase problem: one degree per vortex point required");
    int dsum = 0;
    for (int d : degrees) dsum += std::abs(d);
    const Grid& g = *grid;
    for (size_t k = 0; k < vortices.size(); ++k) {
        const Vec2 p = vortices[k];
        // off grid nodes
        const int id = g.nearest_node(p);
        if (dist(g.pos(id), p) < 1e-9 * std::max(1.0, g.h))
            throw ConfigError("vortex point coincides with a grid node; perturb input");
        for (size_t l = k + 1; l < vortices.size(); ++l)
            if (dist(p, vortices[l]) < 1e-12)
                throw ConfigError("vortex points must be distinct");
        // keep the boundary unwrap well conditioned
        double margin;
        if (g.spec.kind == DomainSpec::Kind::UnitDisc)
            margin = g.spec.radius() - p.norm();
        else
            margin = std::min(std::min(p.x, g.spec.lx - p.x), std::min(p.y, g.spec.ly - p.y));
        if (margin < std::max(2.0 * h, 2.0 * h * dsum))
            throw ConfigError("vortex point too close to the domain boundary");
    }
}

Vec2 singular_gradient(std::span<const Vec2> vortices, std::span<const int> degrees, Vec2 x) {
    Vec2 grad{0.0, 0.0};
    for (size_t k = 0; k < vortices.size(); ++k) {
        const Vec2 r = x - vortices[k];
        const double r2 = r.norm2();
        grad.x += degrees[k] * (-r.y) / r2;
        grad.y += degrees[k] * (r.x) / r2;
    }
    return grad;
}

std::vector<double> unwrap_on_loop(const Grid& g, const std::vector<double>& principal_vals,
                                   int expected_winding) {
    const size_t m = g.boundary_loop.size();
    if (principal_vals.size() != m)
        throw ConfigError("unwrap_on_loop: one value per perimeter node required");
    std::vector<double> cont(m);
    cont[0] = principal_vals[0];
    for (size_t k = 1; k < m; ++k)
        cont[k] = cont[k - 1] + principal(principal_vals[k] - principal_vals[k - 1]);
    const double total =
        (cont[m - 1] + principal(principal_vals[0] - principal_vals[m - 1])) - cont[0];
    if (std::abs(total - 2 * kPi * expected_winding) > 1e-6)
        throw ConfigError("winding of sampled loop data does not match the expected degree");
    return cont;
}

namespace {

// Continuous theta (sum of vortex arguments) along the perimeter.
std::vector<double> theta_on_loop(const Grid& g, const PhaseProblem& p) {
    const auto& loop = g.boundary_loop;
    std::vector<double> princ(loop.size());
    for (size_t k = 0; k < loop.size(); ++k) {
        const Vec2 x = g.pos(loop[k]);
        double th = 0.0;
        for (size_t v = 0; v < p.vortices.size(); ++v)
            th += p.degrees[v] * std::atan2(x.y - p.vortices[v].y, x.x - p.vortices[v].x);
        princ[k] = principal(th);
    }
    return unwrap_on_loop(g, princ, p.total_degree());
}

// Dirichlet psi values on the perimeter from the trace or the explicit vector.
std::vector<double> dirichlet_psi(const PhaseProblem& p) {
    const Grid& g = *p.grid;
    std::vector<double> psi_b(g.num_nodes(), 0.0);
    if (!p.psi_boundary.empty()) {
        if (p.psi_boundary.size() != static_cast<size_t>(g.num_nodes()))
            throw ConfigError("psi_boundary must be a full node vector");
        return p.psi_boundary;
    }
    const auto& loop = g.boundary_loop;
    std::vector<double> theta_cont;
    if (!p.vortices.empty()) theta_cont = theta_on_loop(g, p);

    if (p.trace) {
        // unwrapped polar angle around the trace center
        std::vector<double> t_princ(loop.size());
        for (size_t k = 0; k < loop.size(); ++k) {
            const Vec2 x = g.pos(loop[k]) - p.trace_center;
            t_princ[k] = std::atan2(x.y, x.x);
        }
        const std::vector<double> t_cont = unwrap_on_loop(g, t_princ, 1);
        if (p.trace->degree != p.total_degree())
            throw ConfigError("trace degree does not match the total vortex degree");
        for (size_t k = 0; k < loop.size(); ++k) {
            double val = p.trace->degree * t_cont[k] + p.trace->phase_perturbation(t_princ[k]);
            if (!theta_cont.empty()) val -= theta_cont[k];
            psi_b[loop[k]] = val;
        }
    }
    // without a trace the condition is homogeneous: psi = 0 on the perimeter

    // Copy the value onto boundary-kind nodes that are stencil corners but sit
    // off the traced loop (cannot happen for convex masks; cheap fallback).
    std::unordered_map<int, double> on_loop;
    for (size_t k = 0; k < loop.size(); ++k) on_loop[loop[k]] = psi_b[loop[k]];
    for (int id = 0; id < g.num_nodes(); ++id) {
        if (g.kinds[id] != NodeKind::Boundary) continue;
        if (on_loop.count(id)) continue;
        int best = -1;
        double bd = 1e300;
        for (size_t k = 0; k < loop.size(); ++k) {
            const double dd = dist(g.pos(loop[k]), g.pos(id));
            if (dd < bd) {
                bd = dd;
                best = static_cast<int>(k);
            }
        }
        psi_b[id] = psi_b[loop[best]];
    }
    return psi_b;
}

struct CellGeom {
    int p00, p10, p01, p11;
    double w;      // cell weight (4-corner mean of the squared weight field)
    double gx, gy; // grad theta at the cell center
};

std::vector<CellGeom> assemble_cells(const PhaseProblem& p) {
    const Grid& g = *p.grid;
    std::vector<CellGeom> cells;
    cells.reserve(g.num_cells());
    const bool unit_w = p.weight.v.empty();
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci) {
            if (!g.cell_on[g.cell(ci, cj)]) continue;
            CellGeom c;
            c.p00 = g.node(ci, cj);
            c.p10 = g.node(ci + 1, cj);
            c.p01 = g.node(ci, cj + 1);
            c.p11 = g.node(ci + 1, cj + 1);
            c.w = unit_w ? 1.0
                         : 0.25 * (p.weight.v[c.p00] + p.weight.v[c.p10] +
                                   p.weight.v[c.p01] + p.weight.v[c.p11]);
            const Vec2 grad = p.vortices.empty()
                                  ? Vec2{0.0, 0.0}
                                  : singular_gradient(p.vortices, p.degrees,
                                                      g.cell_center(ci, cj));
            c.gx = grad.x;
            c.gy = grad.y;
            cells.push_back(c);
        }
    return cells;
}

// residual r_p = dE/dpsi_p of E = 1/2 sum_c h^2 w_c |D psi + G|^2
void apply_residual(const Grid& g, const std::vector<CellGeom>& cells,
                    const std::vector<double>& psi, bool with_G,
                    std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double h = g.h;
    for (const CellGeom& c : cells) {
        const double dx = (psi[c.p10] + psi[c.p11] - psi[c.p00] - psi[c.p01]) / (2 * h) +
                          (with_G ? c.gx : 0.0);
        const double dy = (psi[c.p01] + psi[c.p11] - psi[c.p00] - psi[c.p10]) / (2 * h) +
                          (with_G ? c.gy : 0.0);
        const double s = 0.5 * h * c.w;
        out[c.p00] += s * (-dx - dy);
        out[c.p10] += s * (dx - dy);
        out[c.p01] += s * (-dx + dy);
        out[c.p11] += s * (dx + dy);
    }
}

} // namespace

PhaseSolution solve_phase(const PhaseProblem& p, double tol, long max_iter) {
    const Grid& g = *p.grid;
    p.check(g.h);
    if (!p.weight.v.empty())
        for (int id = 0; id < g.num_nodes(); ++id)
            if (g.carries_value(id) && !(p.weight.v[id] > 0))
                throw ConfigError("phase weight must be positive on the domain");

    const auto cells = assemble_cells(p);
    std::vector<double> psi = dirichlet_psi(p);

    // CG on the interior unknowns, matrix-free, Jacobi preconditioned.
    const auto& interior = g.interior_nodes;
    const int N = g.num_nodes();
    std::vector<double> r(N, 0.0), z(N, 0.0), d(N, 0.0), Ad(N, 0.0), diag(N, 0.0);
    for (const CellGeom& c : cells) {
        const double s = 0.5 * c.w; // (0.5 h w) * (1/(2h)) * 2 terms
        diag[c.p00] += s;
        diag[c.p10] += s;
        diag[c.p01] += s;
        diag[c.p11] += s;
    }

    apply_residual(g, cells, psi, /*with_G=*/true, r); // r = A psi - b at current psi
    double bscale = 0.0;
    for (int id : interior) bscale = std::max(bscale, std::abs(r[id]));
    bscale = std::max(1.0, bscale);

    auto sup_residual = [&]() {
        double m = 0.0;
        for (int id : interior) m = std::max(m, std::abs(r[id]));
        return m / bscale;
    };

    if (max_iter <= 0) max_iter = 40L * (g.nx + g.ny) + 2000;
    PhaseSolution sol;
    double rz = 0.0;
    for (int id : interior) {
        z[id] = r[id] / diag[id];
        d[id] = -z[id];
        rz += r[id] * z[id];
    }
    long it = 0;
    while (sup_residual() > tol) {
        if (++it > max_iter) {
            std::ostringstream msg;
            msg << "phase solve stalled: residual=" << sup_residual() << " after " << it - 1
                << " iterations";
            throw SolverError(msg.str());
        }
        apply_residual(g, cells, d, /*with_G=*/false, Ad);
        double dAd = 0.0;
        for (int id : interior) dAd += d[id] * Ad[id];
        if (dAd <= 0) throw SolverError("phase operator lost positivity");
        const double alpha = rz / dAd;
        for (int id : interior) {
            psi[id] += alpha * d[id];
            r[id] += alpha * Ad[id];
        }
        double rz_new = 0.0;
        for (int id : interior) {
            z[id] = r[id] / diag[id];
            rz_new += r[id] * z[id];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int id : interior) d[id] = -z[id] + beta * d[id];
    }

    sol.psi = ScalarField(p.grid, 0.0);
    sol.psi.v = std::move(psi);
    sol.residual = sup_residual();
    sol.iterations = it;
    return sol;
}

double phase_flux(const PhaseProblem& p, const ScalarField& psi, Vec2 center, double radius) {
    const Grid& g = *p.grid;
    const auto cells = assemble_cells(p);
    auto inside = [&](int id) { return dist(g.pos(id), center) < radius; };
    // Sum dE/dpsi_p over nodes inside; complete cells cancel, so this is the
    // discrete flux across the lattice circle.
    const double h = g.h;
    double flux = 0.0;
    for (const CellGeom& c : cells) {
        const bool i00 = inside(c.p00), i10 = inside(c.p10), i01 = inside(c.p01),
                   i11 = inside(c.p11);
        if (!(i00 || i10 || i01 || i11)) continue;
        if (i00 && i10 && i01 && i11) continue;
        const double dx =
            (psi.v[c.p10] + psi.v[c.p11] - psi.v[c.p00] - psi.v[c.p01]) / (2 * h) + c.gx;
        const double dy =
            (psi.v[c.p01] + psi.v[c.p11] - psi.v[c.p00] - psi.v[c.p10]) / (2 * h) + c.gy;
        const double s = 0.5 * h * c.w;
        if (i00) flux += s * (-dx - dy);
        if (i10) flux += s * (dx - dy);
        if (i01) flux += s * (-dx + dy);
        if (i11) flux += s * (dx + dy);
    }
    return flux;
}

double perforated_energy(const PhaseProblem& p, const ScalarField& psi, double r) {
    const Grid& g = *p.grid;
    const auto cells = assemble_cells(p);
    const double h = g.h;
    const double band = 2.0 * h;
    const int sub = 6;

    double total = 0.0;
    size_t ci = 0;
    for (int cj = 0; cj < g.ny; ++cj) {
        double row = 0.0;
        for (int cx = 0; cx < g.nx; ++cx) {
            if (!g.cell_on[g.cell(cx, cj)]) continue;
            const CellGeom& c = cells[ci++];
            const Vec2 cc = g.cell_center(cx, cj);
            double dmin = 1e300;
            for (const Vec2& b : p.vortices) dmin = std::min(dmin, dist(cc, b));
            if (dmin < r - band) continue;
            const double dpx =
                (psi.v[c.p10] + psi.v[c.p11] - psi.v[c.p00] - psi.v[c.p01]) / (2 * h);
            const double dpy =
                (psi.v[c.p01] + psi.v[c.p11] - psi.v[c.p00] - psi.v[c.p10]) / (2 * h);
            if (dmin > r + band) {
                const double gx = dpx + c.gx, gy = dpy + c.gy;
                row += 0.5 * h * h * c.w * (gx * gx + gy * gy);
                continue;
            }
            // ring cell: subsample; grad psi constant, grad theta pointwise
            double acc = 0.0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) {
                    const Vec2 q{cc.x + ((sx + 0.5) / sub - 0.5) * h,
                                 cc.y + ((sy + 0.5) / sub - 0.5) * h};
                    double qmin = 1e300;
                    for (const Vec2& b : p.vortices) qmin = std::min(qmin, dist(q, b));
                    if (qmin < r) continue;
                    const Vec2 gt = singular_gradient(p.vortices, p.degrees, q);
                    const double gx = dpx + gt.x, gy = dpy + gt.y;
                    acc += gx * gx + gy * gy;
                }
            row += 0.5 * h * h * c.w * acc / (sub * sub);
        }
        total += row;
    }
    return total;
}

double perforated_energy_K(double r, const BoundaryData& g0, std::span<const Vec2> betas,
                           const ScalarField& weight) {
    const Grid& g = *weight.grid;
    const double R = g.spec.radius();
    if (g.spec.kind != DomainSpec::Kind::UnitDisc)
        throw ConfigError("perforated_energy_K expects a disc domain");
    for (size_t i = 0; i < betas.size(); ++i) {
        if (betas[i].norm() + r >= R)
            throw ConfigError("excluded ball touches the outer circle");
        for (size_t j = i + 1; j < betas.size(); ++j)
            if (dist(betas[i], betas[j]) <= 2 * r)
                throw ConfigError("excluded balls overlap");
    }
    PhaseProblem p;
    p.grid = weight.grid;
    p.weight = weight;
    p.vortices.assign(betas.begin(), betas.end());
    p.degrees.assign(betas.size(), 1);
    p.trace = g0;
    PhaseSolution sol = solve_phase(p);
    return perforated_energy(p, sol.psi, r);
}

} // namespace glpin
