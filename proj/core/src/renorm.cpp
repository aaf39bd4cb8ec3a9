#include "glpin/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"
#include "glpin/gl_solver.hpp"
#include "glpin/phase.hpp"

namespace glpin {

namespace {
constexpr double kPi = std::numbers::pi;

// least squares of y = c0 + c1 * basis(x)
void fit_two_param(const std::vector<double>& bas, const std::vector<double>& y,
                   double& c0, double& c1) {
    const size_t m = bas.size();
    double s1 = static_cast<double>(m), sb = 0, sbb = 0, sy = 0, sby = 0;
    for (size_t k = 0; k < m; ++k) {
        sb += bas[k];
        sbb += bas[k] * bas[k];
        sy += y[k];
        sby += bas[k] * y[k];
    }
    const double det = s1 * sbb - sb * sb;
    if (std::abs(det) < 1e-300) {
        c0 = sy / s1;
        c1 = 0.0;
        return;
    }
    c0 = (sbb * sy - sb * sby) / det;
    c1 = (s1 * sby - sb * sy) / det;
}

} // namespace

WgResult extract_Wg(const DomainSpec& dom, const BoundaryData& g,
                    std::span<const Vec2> points, std::span<const int> degrees,
                    const WgOptions& opts) {
    if (points.size() != degrees.size())
        throw ConfigError("extract_Wg: one degree per point required");
    if (opts.rho_ladder.size() < 2)
        throw ConfigError("extract_Wg: need at least two rho rungs");
    const double rho_max = *std::max_element(opts.rho_ladder.begin(), opts.rho_ladder.end());
    for (size_t i = 0; i < points.size(); ++i) {
        for (size_t j = i + 1; j < points.size(); ++j)
            if (dist(points[i], points[j]) < 4.0 * rho_max)
                throw ConfigError("extract_Wg: points closer than 4 rho_max");
        double margin;
        if (dom.kind == DomainSpec::Kind::UnitDisc)
            margin = dom.radius() - points[i].norm();
        else
            margin = std::min(std::min(points[i].x, dom.lx - points[i].x),
                              std::min(points[i].y, dom.ly - points[i].y));
        if (margin <= rho_max)
            throw ConfigError("extract_Wg: perforation ball leaves the domain");
    }

    DomainSpec d = dom;
    d.n = opts.grid_n;
    PhaseProblem p;
    p.grid = d.build();
    p.vortices.assign(points.begin(), points.end());
    p.degrees.assign(degrees.begin(), degrees.end());
    p.trace = g;
    if (dom.kind == DomainSpec::Kind::Rectangle)
        p.trace_center = {0.5 * dom.lx, 0.5 * dom.ly};
    const PhaseSolution sol = solve_phase(p);

    int sum_sq = 0;
    for (int dd : degrees) sum_sq += dd * dd;

    WgResult out;
    std::vector<double> basis;
    for (double rho : opts.rho_ladder) {
        const double I = perforated_energy(p, sol.psi, rho);
        out.rho.push_back(rho);
        out.I_rho.push_back(I);
        out.remainder.push_back(I - kPi * sum_sq * std::abs(std::log(rho)));
        basis.push_back(rho * std::abs(std::log(rho)));
    }
    fit_two_param(basis, out.remainder, out.value, out.slope);
    return out;
}

namespace {
void subsets_rec(int M, int d, int from, std::vector<int>& cur,
                 std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == d) {
        out.push_back(cur);
        return;
    }
    for (int i = from; i < M; ++i) {
        cur.push_back(i);
        subsets_rec(M, d, i + 1, cur, out);
        cur.pop_back();
    }
}
} // namespace

SelectionResult select_inclusions(const DomainSpec& dom, const BoundaryData& g,
                                  const PinningConfig& cfg, int d,
                                  const WgOptions& opts, double tie_tol) {
    const int M = cfg.count();
    if (M < 1 || d < 1) throw ConfigError("select_inclusions requires M >= 1, d >= 1");

    SelectionResult res;
    if (M >= d) {
        std::vector<std::vector<int>> subsets;
        std::vector<int> cur;
        subsets_rec(M, d, 0, cur, subsets);
        for (const auto& sub : subsets) {
            std::vector<Vec2> pts;
            for (int i : sub) pts.push_back(cfg.centers[i]);
            std::vector<int> ones(sub.size(), 1);
            Selection s;
            s.indices = sub;
            s.degrees = ones;
            s.Wg = extract_Wg(dom, g, pts, ones, opts).value;
            res.all.push_back(std::move(s));
        }
    } else {
        const int m0 = d / M;
        const int extra = d - M * m0;
        std::vector<std::vector<int>> who;
        std::vector<int> cur;
        subsets_rec(M, extra, 0, cur, who);
        for (const auto& plus : who) {
            std::vector<int> degs(M, m0);
            for (int i : plus) degs[i] = m0 + 1;
            std::vector<int> idx(M);
            for (int i = 0; i < M; ++i) idx[i] = i;
            Selection s;
            s.indices = idx;
            s.degrees = degs;
            s.Wg = extract_Wg(dom, g, cfg.centers, degs, opts).value;
            res.all.push_back(std::move(s));
        }
    }

    double best = res.all.front().Wg;
    for (const auto& s : res.all) best = std::min(best, s.Wg);
    for (const auto& s : res.all)
        if (s.Wg <= best + tie_tol) res.optima.push_back(s);
    return res;
}

TildeW2Result extract_tildeW2(std::span<const Vec2> betas, const BoundaryData& g0,
                              double b, const InclusionShape& omega,
                              const TildeW2Options& opts) {
    omega.validate();
    if (!(b > 0.0 && b <= 1.0)) throw ConfigError("extract_tildeW2 requires b in (0,1]");
    if (opts.r_ladder.size() < 2) throw ConfigError("extract_tildeW2: need >= 2 r rungs");
    double eta0 = 1e300;
    for (size_t i = 0; i < betas.size(); ++i) {
        if (!omega.contains(betas[i]))
            throw ConfigError("extract_tildeW2: beta outside omega");
        eta0 = std::min(eta0, 0.25 * omega.boundary_distance(betas[i]));
        for (size_t j = i + 1; j < betas.size(); ++j)
            eta0 = std::min(eta0, 0.25 * dist(betas[i], betas[j]));
    }
    for (double r : opts.r_ladder)
        if (!(r < eta0))
            throw ConfigError("extract_tildeW2: r ladder exceeds eta0");

    GridPtr grid = DomainSpec::disc(opts.grid_n).build();
    ScalarField weight(grid, 1.0);
    for (int id = 0; id < grid->num_nodes(); ++id) {
        if (!grid->carries_value(id)) continue;
        weight.v[id] = omega.contains(grid->pos(id)) ? b * b : 1.0;
    }

    PhaseProblem p;
    p.grid = grid;
    p.weight = weight;
    p.vortices.assign(betas.begin(), betas.end());
    p.degrees.assign(betas.size(), 1);
    p.trace = g0;
    const PhaseSolution sol = solve_phase(p);

    const int d0 = static_cast<int>(betas.size());
    TildeW2Result out;
    std::vector<double> basis;
    for (double r : opts.r_ladder) {
        const double K = perforated_energy(p, sol.psi, r);
        out.r.push_back(r);
        out.remainder.push_back(K - kPi * d0 * b * b * std::abs(std::log(r)));
        basis.push_back(r * r);
    }
    double c1 = 0.0;
    fit_two_param(basis, out.remainder, out.value, c1);
    return out;
}

TildeWResult extract_tildeW(std::span<const Vec2> betas, double b,
                            const InclusionShape& omega, int d0,
                            const TildeWOptions& opts) {
    if (d0 != static_cast<int>(betas.size()))
        throw ConfigError("extract_tildeW: d0 must equal the number of betas");

    // W1 of a trace e^{i(d0 t + sum c_n cos + s_n sin)} in closed form
    auto w1_of = [](const std::vector<double>& x) {
        double w = 0.0;
        for (size_t k = 0; k < x.size() / 2; ++k) {
            const double cn = x[2 * k], sn = x[2 * k + 1];
            w += (static_cast<double>(k) + 1.0) * (cn * cn + sn * sn) / 2.0;
        }
        return w;
    };
    auto trace_of = [&](const std::vector<double>& x) {
        BoundaryData g = BoundaryData::pure(d0);
        for (size_t k = 0; k < x.size() / 2; ++k)
            if (x[2 * k] != 0.0 || x[2 * k + 1] != 0.0)
                g.phase_modes.push_back(
                    {static_cast<int>(k) + 1, x[2 * k], x[2 * k + 1]});
        return g;
    };

    TildeWOptions coarse = opts;
    TildeW2Options w2_coarse;
    w2_coarse.grid_n = opts.grid_n;
    w2_coarse.r_ladder = {0.05, 0.035};

    TildeWResult out;
    auto objective = [&](const std::vector<double>& x) {
        ++out.evaluations;
        return w1_of(x) + extract_tildeW2(betas, trace_of(x), b, omega, w2_coarse).value;
    };

    std::vector<double> x(2 * opts.n_modes, 0.0);
    double fx = objective(x);
    double step = opts.initial_step;
    int rounds = 0;
    while (step >= opts.min_step) {
        if (++rounds > opts.max_poll_rounds) {
            out.stagnated = true;
            break;
        }
        bool improved = false;
        for (size_t k = 0; k < x.size() && !improved; ++k) {
            for (double sgn : {+1.0, -1.0}) {
                std::vector<double> xt = x;
                xt[k] += sgn * step;
                const double ft = objective(xt);
                if (ft < fx - 1e-12) {
                    x = std::move(xt);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    // final evaluation of the found minimizer on the fine grid and full ladder
    TildeW2Options w2_fine;
    w2_fine.grid_n = opts.final_grid_n;
    out.minimizing_trace = trace_of(x);
    out.W1 = w1_of(x);
    out.W2 = extract_tildeW2(betas, out.minimizing_trace, b, omega, w2_fine).value;
    out.value = out.W1 + out.W2;
    (void)coarse;
    return out;
}

GammaResult compute_gamma(double eps_eff, double r, const GammaOptions& opts) {
    if (!(eps_eff > 0) || !(r > 0)) throw ConfigError("compute_gamma: positive eps and r");
    const double h = 2.0 * r / opts.grid_n;
    if (r / h < 32) throw ConfigError("compute_gamma: core under-resolved (r/h < 32)");
    if (!(eps_eff < 0.25 * r)) throw ConfigError("compute_gamma requires eps_eff << r");

    auto run = [&](double eps, int n) {
        GridPtr grid = DomainSpec::disc(n, r).build();
        ScalarField ones(grid, 1.0);
        SolverOptions so;
        so.multistart = 1;
        so.max_iter = opts.max_iter;
        SeedPlan plan;
        plan.vortices = {{0.31 * grid->h, 0.17 * grid->h}};
        const SolveResult res = minimize_E(ones, BoundaryData::pure(1), eps, plan, so);
        return res.energy.total - kPi * std::log(r / eps);
    };

    GammaResult out;
    out.estimate_coarse = run(eps_eff, opts.grid_n);
    // refine eps and the grid together so the core stays equally resolved
    const double f = opts.ladder_factor;
    out.estimate_fine =
        run(eps_eff / f, static_cast<int>(std::lround(opts.grid_n * f)));
    out.value = out.estimate_fine;
    return out;
}

} // namespace glpin
