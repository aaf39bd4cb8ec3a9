#include "glpin/gl_solver.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "glpin/errors.hpp"
#include "glpin/phase.hpp"

namespace glpin {

namespace {

constexpr double kPi = std::numbers::pi;

double principal(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}

// Core-regularized modulus profile of a single vortex factor.
double core_modulus(double r, double eps, CoreProfile profile) {
    if (profile == CoreProfile::Linear) return std::min(1.0, r / eps);
    return r / std::sqrt(r * r + 2.0 * eps * eps);
}

cplx product_value(Vec2 x, std::span<const Vec2> pts, double eps, CoreProfile profile) {
    cplx w{1.0, 0.0};
    for (const Vec2& p : pts) {
        const Vec2 d = x - p;
        const double r = d.norm();
        if (r < 1e-300) return cplx{0.0, 0.0};
        w *= cplx{d.x / r, d.y / r} * core_modulus(r, eps, profile);
    }
    return w;
}

} // namespace

ComplexField vortex_product_seed(const GridPtr& grid, const BoundaryData& g,
                                 std::span<const Vec2> vortices, double eps,
                                 Vec2 trace_center, CoreProfile profile) {
    const Grid& gr = *grid;
    ComplexField v(grid);
    for (int id = 0; id < gr.num_nodes(); ++id) {
        if (!gr.carries_value(id)) continue;
        v.v[id] = product_value(gr.pos(id), vortices, eps, profile);
    }

    // Harmonic phase correction so the trace matches g on the perimeter.
    const auto& loop = gr.boundary_loop;
    std::vector<double> tp(loop.size()), mismatch(loop.size());
    for (size_t k = 0; k < loop.size(); ++k) {
        const Vec2 p = gr.pos(loop[k]) - trace_center;
        tp[k] = std::atan2(p.y, p.x);
    }
    const std::vector<double> t_cont = unwrap_on_loop(gr, tp, 1);
    for (size_t k = 0; k < loop.size(); ++k) {
        const cplx w = v.v[loop[k]];
        const double want = g.degree * t_cont[k] + g.phase_perturbation(tp[k]);
        mismatch[k] = principal(want - std::arg(w));
    }
    // unwrap the mismatch (winding zero when the vortex count equals the degree)
    std::vector<double> mm_cont =
        unwrap_on_loop(gr, mismatch, g.degree - static_cast<int>(vortices.size()));

    PhaseProblem p;
    p.grid = grid;
    p.psi_boundary.assign(gr.num_nodes(), 0.0);
    for (size_t k = 0; k < loop.size(); ++k) p.psi_boundary[loop[k]] = mm_cont[k];
    PhaseSolution sol = solve_phase(p, 1e-8);

    for (int id = 0; id < gr.num_nodes(); ++id) {
        if (!gr.carries_value(id)) continue;
        const double c = sol.psi.v[id];
        v.v[id] *= cplx{std::cos(c), std::sin(c)};
    }
    apply_boundary(v, g, trace_center); // exact trace at boundary nodes
    return v;
}

namespace {

struct Objective {
    const ScalarField* weight; // U for F-form, a for E-form
    double eps;
    bool weighted; // true: F functional, false: E functional

    EnergyBreakdown eval(const ComplexField& v) const {
        return weighted ? energy_F(v, *weight, eps) : energy_E(v, *weight, eps);
    }
    EnergyBreakdown eval_grad(const ComplexField& v, std::vector<cplx>& grad) const {
        return weighted ? energy_F_with_grad(v, *weight, eps, grad)
                        : energy_E_with_grad(v, *weight, eps, grad);
    }
};

double sup_residual(const Grid& g, const std::vector<cplx>& grad) {
    double m = 0.0;
    for (int id : g.interior_nodes)
        m = std::max(m, std::abs(grad[id]) / g.node_area[id]);
    return m;
}

SolveResult descend(const Objective& obj, ComplexField v, const SolverOptions& opts,
                    const std::string& seed_name) {
    const Grid& g = *v.grid;
    const auto t_start = std::chrono::steady_clock::now();

    std::vector<cplx> grad, grad_new;
    EnergyBreakdown e = obj.eval_grad(v, grad);
    const double grad_tol = opts.tol_grad / (obj.eps * obj.eps);

    std::vector<cplx> dir(g.num_nodes(), cplx{});
    for (int id : g.interior_nodes) dir[id] = -grad[id];
    double g2 = 0.0;
    for (int id : g.interior_nodes) g2 += std::norm(grad[id]);

    ComplexField trial = v;
    double step = 0.25 / (8.0 / (g.h * g.h) + 2.0 / (obj.eps * obj.eps));
    double rel_dec = 1.0;
    double residual = sup_residual(g, grad);
    long it = 0;
    int since_restart = 0;

    // Phase 1: nonlinear conjugate gradient (Polak-Ribiere) with Armijo
    // backtracking, while energy decreases are resolvable in doubles.  Slow
    // per-step progress hands over to the accelerated polish.
    bool floor_hit = false;
    int slow_steps = 0;
    while (!(rel_dec < opts.tol_rel_energy && residual < grad_tol)) {
        if (floor_hit || slow_steps >= 5) break;
        if (g2 == 0.0) { rel_dec = 0.0; residual = 0.0; break; }
        if (++it > opts.max_iter) {
            std::ostringstream msg;
            msg << "minimizer did not converge (seed " << seed_name << "): iter=" << it - 1
                << " residual=" << residual << " target=" << grad_tol
                << " rel_decrease=" << rel_dec;
            throw SolverError(msg.str());
        }

        double gd = 0.0;
        for (int id : g.interior_nodes)
            gd += grad[id].real() * dir[id].real() + grad[id].imag() * dir[id].imag();
        if (gd >= 0.0) { // not a descent direction: steepest restart
            for (int id : g.interior_nodes) dir[id] = -grad[id];
            gd = -g2;
            since_restart = 0;
        }

        double t = step;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int id : g.interior_nodes) trial.v[id] = v.v[id] + t * dir[id];
            const EnergyBreakdown et = obj.eval(trial);
            if (et.total <= e.total + 1e-4 * t * gd) {
                rel_dec = (e.total - et.total) / std::max(1.0, std::abs(e.total));
                std::swap(v.v, trial.v);
                e = obj.eval_grad(v, grad_new);
                accepted = true;
                step = 2.0 * t;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            bool was_steepest = true;
            for (int id : g.interior_nodes)
                if (dir[id] != -grad[id]) { was_steepest = false; break; }
            if (was_steepest) {
                floor_hit = true; // decreases below float resolution
            } else {
                for (int id : g.interior_nodes) dir[id] = -grad[id];
                since_restart = 0;
            }
            continue;
        }

        double gng = 0.0, gn2 = 0.0;
        for (int id : g.interior_nodes) {
            const cplx diff = grad_new[id] - grad[id];
            gng += grad_new[id].real() * diff.real() + grad_new[id].imag() * diff.imag();
            gn2 += std::norm(grad_new[id]);
        }
        double beta = g2 > 0 ? std::max(0.0, gng / g2) : 0.0;
        if (++since_restart >= opts.ncg_restart) {
            beta = 0.0;
            since_restart = 0;
        }
        for (int id : g.interior_nodes) dir[id] = -grad_new[id] + beta * dir[id];
        std::swap(grad, grad_new);
        g2 = gn2;
        residual = sup_residual(g, grad);
        slow_steps = rel_dec < 1e-9 ? slow_steps + 1 : 0;
    }

    // Phase 2: fixed-step momentum flow with gradient-based adaptive restart;
    // finishes the residual once line searches stall at the rounding floor.
    if (residual >= grad_tol) {
        const double L = 8.0 / (g.h * g.h) + 4.0 / (obj.eps * obj.eps);
        const double t = 0.9 / L;
        std::vector<cplx> x = v.v, y = v.v, gy;
        std::vector<cplx> x_new(v.v.size());
        ComplexField work = v;
        double theta = 1.0;
        double last_check = residual;
        long plateau_guard = 0;
        while (residual >= grad_tol) {
            if (++it > opts.max_iter) {
                std::ostringstream msg;
                msg << "minimizer polish stalled (seed " << seed_name
                    << "): iter=" << it - 1 << " residual=" << residual
                    << " target=" << grad_tol;
                throw SolverError(msg.str());
            }
            work.v = y;
            obj.eval_grad(work, gy);
            x_new = y;
            double g_dx = 0.0;
            for (int id : g.interior_nodes) {
                x_new[id] = y[id] - t * gy[id];
                const cplx dxi = x_new[id] - x[id];
                g_dx += gy[id].real() * dxi.real() + gy[id].imag() * dxi.imag();
            }
            if (g_dx > 0.0) { // overshoot: drop the momentum, step from x
                theta = 1.0;
                work.v = x;
                obj.eval_grad(work, gy);
                for (int id : g.interior_nodes) x_new[id] = x[id] - t * gy[id];
            }
            const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            const double mom = (theta - 1.0) / theta_new;
            for (int id : g.interior_nodes)
                y[id] = x_new[id] + mom * (x_new[id] - x[id]);
            theta = theta_new;
            std::swap(x, x_new);

            if (it % 25 == 0) {
                work.v = x;
                e = obj.eval_grad(work, grad);
                residual = sup_residual(g, grad);
            }
            if (++plateau_guard >= 8000) {
                if (residual > 0.98 * last_check) {
                    std::ostringstream msg;
                    msg << "minimizer residual plateau (seed " << seed_name << ") at "
                        << residual << " (target " << grad_tol << ")";
                    throw SolverError(msg.str());
                }
                last_check = residual;
                plateau_guard = 0;
            }
        }
        v.v = x;
        e = obj.eval_grad(v, grad);
        residual = sup_residual(g, grad);
        rel_dec = 0.0;
    }

    SolveResult res;
    res.v = std::move(v);
    res.energy = e;
    res.iterations = it;
    res.final_grad_residual = residual;
    res.final_rel_decrease = rel_dec;
    res.seed_name = seed_name;
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

ComplexField random_phase_twist(ComplexField v, std::uint64_t seed) {
    const Grid& g = *v.grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double amp[3][3];
    for (auto& row : amp)
        for (double& a : row) a = uni(rng);

    const double R = g.spec.radius();
    for (int id : g.interior_nodes) {
        const Vec2 p = g.pos(id);
        double taper, xs, ys;
        if (g.spec.kind == DomainSpec::Kind::UnitDisc) {
            taper = std::max(0.0, 1.0 - p.norm2() / (R * R));
            xs = 0.5 * (p.x / R + 1.0);
            ys = 0.5 * (p.y / R + 1.0);
        } else {
            xs = p.x / g.spec.lx;
            ys = p.y / g.spec.ly;
            taper = 16.0 * xs * (1 - xs) * ys * (1 - ys);
        }
        double eta = 0.0;
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                eta += amp[a - 1][b - 1] * std::sin(a * kPi * xs) * std::sin(b * kPi * ys);
        eta *= 1.5 * taper;
        v.v[id] *= cplx{std::cos(eta), std::sin(eta)};
    }
    return v;
}

std::vector<Vec2> center_cluster(const Grid& g, int d) {
    // d vortices on a small irrational-angle circle around the domain center,
    // kept off grid nodes
    Vec2 c{0.0, 0.0};
    if (g.spec.kind == DomainSpec::Kind::Rectangle)
        c = {0.5 * g.spec.lx, 0.5 * g.spec.ly};
    std::vector<Vec2> pts;
    for (int j = 0; j < d; ++j) {
        const double ang = 2 * kPi * j / std::max(1, d) + 0.39996;
        const double rad = g.h * (1.4 + 0.23 * j);
        pts.push_back({c.x + rad * std::cos(ang), c.y + rad * std::sin(ang)});
    }
    return pts;
}

SolveResult multistart_minimize(const Objective& obj, const BoundaryData& g,
                                const SeedPlan& plan, const SolverOptions& opts) {
    const GridPtr grid = obj.weight->grid;
    Vec2 center{0.0, 0.0};
    if (grid->spec.kind == DomainSpec::Kind::Rectangle)
        center = {0.5 * grid->spec.lx, 0.5 * grid->spec.ly};

    struct Start {
        std::string name;
        ComplexField field;
    };
    std::vector<Start> starts;
    {
        std::vector<Vec2> pts = plan.vortices;
        if (static_cast<int>(pts.size()) != g.degree) pts = center_cluster(*grid, g.degree);
        starts.push_back({"predicted", vortex_product_seed(grid, g, pts, obj.eps, center)});
    }
    if (opts.multistart >= 2)
        starts.push_back({"random", random_phase_twist(starts[0].field, opts.rng_seed)});
    if (opts.multistart >= 3)
        starts.push_back({"harmonic",
                          vortex_product_seed(grid, g, center_cluster(*grid, g.degree),
                                              obj.eps, center)});

    SolveResult best;
    bool have = false;
    std::string failures;
    for (size_t s = 0; s < starts.size(); ++s) {
        try {
            SolveResult r = descend(obj, std::move(starts[s].field), opts, starts[s].name);
            r.winning_seed = static_cast<int>(s);
            if (!have || r.energy.total < best.energy.total) {
                best = std::move(r);
                have = true;
            }
        } catch (const SolverError& err) {
            failures += std::string(failures.empty() ? "" : "; ") + err.what();
        }
    }
    if (!have) throw SolverError("all multistart seeds failed: " + failures);
    return best;
}

} // namespace

SolveResult minimize_F(const ScalarField& U, const BoundaryData& g, double eps,
                       const SeedPlan& plan, const SolverOptions& opts,
                       std::optional<double> contrast) {
    if (contrast) energy_F(ComplexField(U.grid, cplx{1, 0}), U, eps, contrast); // bounds check
    Objective obj{&U, eps, true};
    return multistart_minimize(obj, g, plan, opts);
}

SolveResult minimize_E(const ScalarField& a, const BoundaryData& g, double eps,
                       const SeedPlan& plan, const SolverOptions& opts) {
    Objective obj{&a, eps, false};
    return multistart_minimize(obj, g, plan, opts);
}

SolveResult minimize_F_from(const ScalarField& U, const BoundaryData& g, double eps,
                            ComplexField init, const SolverOptions& opts) {
    apply_boundary(init, g,
                   U.grid->spec.kind == DomainSpec::Kind::Rectangle
                       ? Vec2{0.5 * U.grid->spec.lx, 0.5 * U.grid->spec.ly}
                       : Vec2{0, 0});
    Objective obj{&U, eps, true};
    return descend(obj, std::move(init), opts, "explicit");
}

SolveResult minimize_E_from(const ScalarField& a, const BoundaryData& g, double eps,
                            ComplexField init, const SolverOptions& opts) {
    apply_boundary(init, g,
                   a.grid->spec.kind == DomainSpec::Kind::Rectangle
                       ? Vec2{0.5 * a.grid->spec.lx, 0.5 * a.grid->spec.ly}
                       : Vec2{0, 0});
    Objective obj{&a, eps, false};
    return descend(obj, std::move(init), opts, "explicit");
}

double substitution_residual(const ScalarField& U, const ComplexField& v,
                             const ScalarField& a, double eps) {
    ComplexField uv(v.grid);
    for (int id = 0; id < v.grid->num_nodes(); ++id) uv.v[id] = U.v[id] * v.v[id];
    const double e_uv = energy_E(uv, a, eps).total;
    const double e_u = energy_U(U, a, eps).total;
    const double f_v = energy_F(v, U, eps).total;
    return std::abs(e_uv - e_u - f_v) / std::max(1.0, e_uv);
}

} // namespace glpin
