#include "glpin/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "glpin/errors.hpp"

namespace glpin {

// ---------------------------------------------------------------- shapes

bool InclusionShape::contains(Vec2 p) const {
    if (kind == Kind::Disc) return p.norm2() < radius * radius;
    // even-odd crossing test
    bool inside = false;
    const size_t m = vertices.size();
    for (size_t i = 0, j = m - 1; i < m; j = i++) {
        const Vec2 a = vertices[j], b = vertices[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double t = (p.y - b.y) / (a.y - b.y);
            if (p.x < b.x + t * (a.x - b.x)) inside = !inside;
        }
    }
    return inside;
}

double InclusionShape::outer_radius() const {
    if (kind == Kind::Disc) return radius;
    double r = 0.0;
    for (const auto& v : vertices) r = std::max(r, v.norm());
    return r;
}

namespace {
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double L2 = ab.norm2();
    double t = L2 > 0 ? dot(p - a, ab) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + ab * t);
}
} // namespace

double InclusionShape::boundary_distance(Vec2 p) const {
    if (kind == Kind::Disc) return std::abs(p.norm() - radius);
    double d = std::numeric_limits<double>::infinity();
    const size_t m = vertices.size();
    for (size_t i = 0, j = m - 1; i < m; j = i++)
        d = std::min(d, point_segment_distance(p, vertices[j], vertices[i]));
    return d;
}

double InclusionShape::inradius_from_origin() const {
    return contains({0, 0}) ? boundary_distance({0, 0}) : 0.0;
}

void InclusionShape::validate() const {
    if (kind == Kind::Disc) {
        if (!(radius > 0.0 && radius < 1.0))
            throw ConfigError("inclusion disc radius must lie in (0,1)");
        return;
    }
    if (vertices.size() < 3) throw ConfigError("inclusion polygon needs >= 3 vertices");
    if (outer_radius() >= 1.0)
        throw ConfigError("inclusion shape must be contained in the unit ball");
    if (!contains({0, 0}))
        throw ConfigError("inclusion shape must contain the origin");
}

// ---------------------------------------------------------------- pinning

int PinningConfig::inclusion_of(Vec2 p) const {
    for (int i = 0; i < count(); ++i)
        if (in_inclusion(p, i)) return i;
    return -1;
}

double PinningConfig::dist_to_pinning_boundary(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count(); ++i)
        d = std::min(d, delta * shape.boundary_distance((p - centers[i]) / delta));
    return d;
}

void PinningConfig::validate(const Grid& grid) const {
    shape.validate();
    if (!(contrast > 0.0 && contrast < 1.0))
        throw ConfigError("contrast b must lie strictly in (0,1)");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (!(xi() > 0.0 && xi() < 1.0))
        throw ConfigError("xi = eps/delta must lie in (0,1)");

    const double r_out = delta * shape.outer_radius();
    for (int i = 0; i < count(); ++i) {
        // containment in the domain with room for the Dirichlet layer
        const Vec2 a = centers[i];
        double room;
        if (grid.spec.kind == DomainSpec::Kind::UnitDisc) {
            room = grid.spec.radius() - a.norm();
        } else {
            room = std::min(std::min(a.x, grid.spec.lx - a.x),
                            std::min(a.y, grid.spec.ly - a.y));
        }
        if (room <= r_out + 2 * grid.h)
            throw ConfigError("inclusion " + std::to_string(i) +
                              " overlaps or touches the domain boundary");
        for (int j = i + 1; j < count(); ++j)
            if (dist(a, centers[j]) <= 2 * r_out)
                throw ConfigError("inclusions " + std::to_string(i) + " and " +
                                  std::to_string(j) + " are not disjoint");
    }
    // sharp interface must be resolved: >= 8 cells across each inclusion
    if (count() > 0 && 2.0 * r_out < 8.0 * grid.h)
        throw ConfigError("grid does not resolve the inclusions (need >= 8 cells across)");
}

ScaleDiagnostics ScaleDiagnostics::from(double eps, double delta) {
    ScaleDiagnostics d;
    d.eps = eps;
    d.delta = delta;
    d.xi = eps / delta;
    const double ld = std::abs(std::log(delta));
    const double le = std::abs(std::log(eps));
    d.hypothesis_ratio = ld * ld * ld / le;
    d.separation_warning = d.hypothesis_ratio > 1.0;
    return d;
}

ScalarField build_pinning_field(const PinningConfig& cfg, const GridPtr& grid) {
    cfg.validate(*grid);
    ScalarField a(grid, 0.0);
    for (int j = 0; j <= grid->ny; ++j)
        for (int i = 0; i <= grid->nx; ++i) {
            const int id = grid->node(i, j);
            if (!grid->carries_value(id)) continue;
            a.v[id] = cfg.inclusion_of(grid->pos(i, j)) >= 0 ? cfg.contrast : 1.0;
        }
    return a;
}

} // namespace glpin
