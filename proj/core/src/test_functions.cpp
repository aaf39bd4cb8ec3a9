#include "glpin/test_functions.hpp"

#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"
#include "glpin/gl_solver.hpp"

namespace glpin {

namespace {
constexpr double kPi = std::numbers::pi;

double principal(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}

// nudge a site off grid nodes so phases stay evaluable everywhere
Vec2 off_node(Vec2 p, double h) { return {p.x + 0.31 * h, p.y + 0.17 * h}; }
} // namespace

double smoothstep5(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

std::vector<Vec2> reference_sites(const InclusionShape& omega, int degree,
                                  double radius_frac) {
    std::vector<Vec2> sites;
    if (degree <= 0) return sites;
    const double inr = omega.inradius_from_origin();
    if (degree == 1) {
        sites.push_back({0.0, 0.0});
        return sites;
    }
    const double r = radius_frac * inr;
    for (int j = 0; j < degree; ++j) {
        const double ang = 2 * kPi * j / degree + 0.39996;
        sites.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    return sites;
}

ComplexField build_caseI(const PinningConfig& cfg, const GridPtr& grid,
                         const BoundaryData& g, double eps, std::vector<int> chosen,
                         const TestFunctionOptions& opts) {
    const int d = g.degree;
    if (cfg.count() < d)
        throw ConfigError("build_caseI requires at least d inclusions");
    if (chosen.empty())
        for (int i = 0; i < d; ++i) chosen.push_back(i);
    if (static_cast<int>(chosen.size()) != d)
        throw ConfigError("build_caseI: need exactly d chosen inclusions");

    // annulus radii must keep the vortex discs disjoint and inside the domain
    double rho0 = opts.rho0;
    if (rho0 <= 0.0) {
        rho0 = 1e300;
        for (int i : chosen) {
            const Vec2 a = cfg.centers[i];
            double margin;
            if (grid->spec.kind == DomainSpec::Kind::UnitDisc)
                margin = grid->spec.radius() - a.norm();
            else
                margin = std::min(std::min(a.x, grid->spec.lx - a.x),
                                  std::min(a.y, grid->spec.ly - a.y));
            rho0 = std::min(rho0, 0.5 * margin);
            for (int j = 0; j < cfg.count(); ++j)
                if (j != i) rho0 = std::min(rho0, 0.45 * dist(a, cfg.centers[j]));
        }
    }
    if (rho0 <= eps)
        throw ConfigError("build_caseI: vortex discs overlap (rho0 <= eps)");

    std::vector<Vec2> pts;
    for (int i : chosen) pts.push_back(off_node(cfg.centers[i], grid->h));
    return vortex_product_seed(grid, g, pts, eps, {0, 0}, CoreProfile::Linear);
}

ComplexField build_caseII(const PinningConfig& cfg, const GridPtr& grid,
                          const BoundaryData& g, double eps,
                          const std::vector<int>& degrees,
                          const TestFunctionOptions& opts) {
    if (static_cast<int>(degrees.size()) != cfg.count())
        throw ConfigError("build_caseII: one degree per inclusion required");
    int dsum = 0;
    for (int di : degrees) {
        if (di < 0) throw ConfigError("build_caseII: degrees must be nonnegative");
        dsum += di;
    }
    if (dsum != g.degree)
        throw ConfigError("build_caseII: degrees must sum to the boundary degree");

    std::vector<Vec2> pts;
    for (int i = 0; i < cfg.count(); ++i) {
        const auto sites = reference_sites(cfg.shape, degrees[i], opts.placement_radius_frac);
        // separation of the physical cores
        for (size_t a = 0; a < sites.size(); ++a)
            for (size_t b = a + 1; b < sites.size(); ++b)
                if (cfg.delta * dist(sites[a], sites[b]) < 4.0 * eps)
                    throw ConfigError("build_caseII: vortex sites closer than 4 eps");
        for (const Vec2& s : sites)
            pts.push_back(off_node(cfg.centers[i] + s * cfg.delta, grid->h));
    }
    return vortex_product_seed(grid, g, pts, eps, {0, 0}, CoreProfile::Linear);
}

ComplexField annulus_extension(const CircleSamples& f_eps, int d0, double rho, int n) {
    if (f_eps.winding() != d0)
        throw ConfigError("annulus_extension: trace winding does not match d0");
    const int m = static_cast<int>(f_eps.values.size());

    // modulus samples and unwrapped phase remainder of the trace
    std::vector<double> mod(m), rem(m);
    double acc = std::arg(f_eps.values[0]);
    for (int k = 0; k < m; ++k) {
        mod[k] = std::abs(f_eps.values[k]);
        if (k > 0) acc += principal(std::arg(f_eps.values[k]) - std::arg(f_eps.values[k - 1]));
        rem[k] = acc - d0 * (2 * kPi * k / m);
    }

    // The remainder table closes on itself (winding removed), so plain
    // periodic interpolation is seam-safe.
    auto periodic = [&](const std::vector<double>& tab, double t) {
        double u = t / (2 * kPi) * m;
        u -= std::floor(u / m) * m;
        const int k0 = static_cast<int>(std::floor(u)) % m;
        const int k1 = (k0 + 1) % m;
        const double s = u - std::floor(u);
        return tab[k0] * (1 - s) + tab[k1] * s;
    };

    GridPtr grid = DomainSpec::disc(n, 3.0 * rho).build();
    ComplexField out(grid);
    for (int id = 0; id < grid->num_nodes(); ++id) {
        if (!grid->carries_value(id)) continue;
        const Vec2 p = grid->pos(id);
        const double s = p.norm();
        const double t = std::atan2(p.y, p.x);
        const double z = smoothstep5((s - rho) / rho);
        const double modulus = z + (1.0 - z) * periodic(mod, t);
        const double phase = d0 * t + (1.0 - z) * periodic(rem, t);
        out.v[id] = cplx{modulus * std::cos(phase), modulus * std::sin(phase)};
    }
    return out;
}

} // namespace glpin
