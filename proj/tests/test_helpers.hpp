#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "glpin/field.hpp"
#include "glpin/pinning.hpp"

namespace glpin::testing {

inline constexpr double kPi = std::numbers::pi;

inline ComplexField fill_complex(const GridPtr& g, const std::function<cplx(Vec2)>& f) {
    ComplexField out(g);
    for (int id = 0; id < g->num_nodes(); ++id)
        if (g->carries_value(id)) out.v[id] = f(g->pos(id));
    return out;
}

inline ScalarField fill_scalar(const GridPtr& g, const std::function<double(Vec2)>& f) {
    ScalarField out(g);
    for (int id = 0; id < g->num_nodes(); ++id)
        if (g->carries_value(id)) out.v[id] = f(g->pos(id));
    return out;
}

/// Unit vortex of the given degree at p (modulus 1 away from p).
inline cplx unit_vortex(Vec2 x, Vec2 p, int degree = 1) {
    const Vec2 d = x - p;
    const double r = d.norm();
    if (r < 1e-300) return {0.0, 0.0};
    cplx z{d.x / r, d.y / r};
    cplx out{1.0, 0.0};
    for (int k = 0; k < std::abs(degree); ++k) out *= z;
    return degree >= 0 ? out : std::conj(out);
}

/// Vortex with a core modulus profile, the shape a converged minimizer has.
inline cplx cored_vortex(Vec2 x, Vec2 p, double core, int degree = 1) {
    const double r = dist(x, p);
    return unit_vortex(x, p, degree) * (r / std::sqrt(r * r + 2.0 * core * core));
}

inline PinningConfig one_disc_config(double b = 0.5, double delta = 0.2, double eps = 0.02) {
    PinningConfig cfg;
    cfg.centers = {{0.0, 0.0}};
    cfg.shape = InclusionShape::disc(0.5);
    cfg.contrast = b;
    cfg.delta = delta;
    cfg.eps = eps;
    return cfg;
}

} // namespace glpin::testing
