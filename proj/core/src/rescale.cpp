#include "glpin/rescale.hpp"

#include <cmath>

#include "glpin/errors.hpp"

namespace glpin {

namespace {

void check_source_box(const Grid& g, Vec2 center, double rho) {
    const double xmax = g.x0 + g.nx * g.h, ymax = g.y0 + g.ny * g.h;
    if (center.x - rho < g.x0 || center.x + rho > xmax || center.y - rho < g.y0 ||
        center.y + rho > ymax)
        throw ConfigError("rescale source ball exceeds the source grid box");
}

template <class Field>
Field resample(const Field& f, Vec2 center, double rho, double delta, int n_hat) {
    if (!(delta > 0)) throw ConfigError("rescale requires delta > 0");
    if (!(rho > 0)) throw ConfigError("rescale requires rho > 0");
    check_source_box(*f.grid, center, rho);

    const double R = rho / delta;
    GridPtr target = DomainSpec::disc(n_hat, R).build();
    Field out(target);
    for (int id = 0; id < target->num_nodes(); ++id) {
        if (!target->carries_value(id)) continue;
        Vec2 xh = target->pos(id);
        // Dirichlet layer nodes stick out by up to one spacing; clamp onto the ball.
        const double r = xh.norm();
        if (r > R) xh = xh * (R / r);
        out.v[id] = sample_bilinear(f, center + xh * delta);
    }
    return out;
}

} // namespace

ComplexField rescale_hat(const ComplexField& v, Vec2 center, double rho, double delta,
                         int n_hat) {
    return resample(v, center, rho, delta, n_hat);
}

ScalarField rescale_hat(const ScalarField& f, Vec2 center, double rho, double delta,
                        int n_hat) {
    return resample(f, center, rho, delta, n_hat);
}

} // namespace glpin
