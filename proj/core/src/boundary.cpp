#include "glpin/boundary.hpp"

#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

namespace {
double eval_modes(const std::vector<BoundaryMode>& modes, double t) {
    double s = 0.0;
    for (const auto& m : modes)
        s += m.amp_cos * std::cos(m.n * t) + m.amp_sin * std::sin(m.n * t);
    return s;
}
} // namespace

double BoundaryData::phase_perturbation(double t) const { return eval_modes(phase_modes, t); }
double BoundaryData::modulus_perturbation(double t) const { return eval_modes(modulus_modes, t); }

cplx BoundaryData::trace(double t) const {
    const double ph = continuous_phase(t);
    const double mod = 1.0 - modulus_perturbation(t);
    return cplx{mod * std::cos(ph), mod * std::sin(ph)};
}

void BoundaryData::validate(double eps) const {
    if (modulus_modes.empty()) return;
    const int samples = 720;
    for (int k = 0; k < samples; ++k) {
        const double t = 2.0 * std::numbers::pi * k / samples;
        const double mu = modulus_perturbation(t);
        if (mu < -1e-12 || mu > eps + 1e-12)
            throw ConfigError("modulus perturbation must stay within [0, eps]");
    }
}

void apply_boundary(ComplexField& f, const BoundaryData& g, Vec2 center) {
    const Grid& grid = *f.grid;
    for (int id = 0; id < grid.num_nodes(); ++id) {
        if (grid.kinds[id] != NodeKind::Boundary) continue;
        const Vec2 p = grid.pos(id) - center;
        f.v[id] = g.trace(std::atan2(p.y, p.x));
    }
}

int sampled_trace_winding(const BoundaryData& g, const Grid& grid, Vec2 center) {
    double acc = 0.0;
    const auto& loop = grid.boundary_loop;
    const size_t m = loop.size();
    double prev = 0.0;
    for (size_t k = 0; k <= m; ++k) {
        const Vec2 p = grid.pos(loop[k % m]) - center;
        const cplx z = g.trace(std::atan2(p.y, p.x));
        const double ph = std::arg(z);
        if (k > 0) {
            double d = ph - prev;
            while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
            acc += d;
        }
        prev = ph;
    }
    return static_cast<int>(std::lround(acc / (2 * std::numbers::pi)));
}

} // namespace glpin
