#pragma once

#include <vector>

#include "glpin/field.hpp"
#include "glpin/geometry.hpp"
#include "glpin/grid.hpp"

namespace glpin {

/// Pinning configuration: M inclusion centers, the reference shape omega,
/// the contrast b on the inclusions, and the two small scales.
struct PinningConfig {
    std::vector<Vec2> centers; // a_i, inside the domain
    InclusionShape shape;      // omega; scaled copies a_i + delta*omega
    double contrast = 0.5;     // b in (0,1)
    double delta = 0.2;
    double eps = 0.02;

    double xi() const { return eps / delta; }
    int count() const { return static_cast<int>(centers.size()); }

    /// True when p lies in the scaled inclusion a_i + delta*omega.
    bool in_inclusion(Vec2 p, int i) const {
        return shape.contains((p - centers[i]) / delta);
    }
    /// Index of the inclusion containing p, or -1.
    int inclusion_of(Vec2 p) const;

    /// Unsigned distance from p to the union of scaled inclusion boundaries.
    double dist_to_pinning_boundary(Vec2 p) const;

    /// Validates shape, scales, pairwise disjointness and containment in the
    /// domain, and that the grid resolves each inclusion with >= 8 cells.
    void validate(const Grid& grid) const;

    PinningConfig with_scales(double new_eps, double new_delta) const {
        PinningConfig c = *this;
        c.eps = new_eps;
        c.delta = new_delta;
        return c;
    }
};

/// Scale separation diagnostics: xi and the ratio |ln delta|^3 / |ln eps|.
struct ScaleDiagnostics {
    double eps = 0.0;
    double delta = 0.0;
    double xi = 0.0;
    double hypothesis_ratio = 0.0;
    bool separation_warning = false; // set when the ratio exceeds 1

    static ScaleDiagnostics from(double eps, double delta);
};

/// Samples the piecewise-constant coefficient: contrast b on the scaled
/// inclusions, 1 elsewhere.  Sharp nodewise sampling, no smoothing.
ScalarField build_pinning_field(const PinningConfig& cfg, const GridPtr& grid);

} // namespace glpin
