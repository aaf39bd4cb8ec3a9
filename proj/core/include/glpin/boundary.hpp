#pragma once

#include <vector>

#include "glpin/field.hpp"
#include "glpin/grid.hpp"

namespace glpin {

/// One real Fourier mode of a boundary perturbation: amp_cos*cos(n t) + amp_sin*sin(n t).
struct BoundaryMode {
    int n = 1;
    double amp_cos = 0.0;
    double amp_sin = 0.0;
};

/// Dirichlet trace g(t) = (1 - mu(t)) * exp(i (d t + phi(t))) parameterized by
/// the angle t around the domain center.  phi is a finite Fourier sum; the
/// optional modulus perturbation mu is bounded by eps.
struct BoundaryData {
    int degree = 0;
    std::vector<BoundaryMode> phase_modes;
    std::vector<BoundaryMode> modulus_modes; // empty: |g| = 1

    static BoundaryData pure(int d) {
        BoundaryData g;
        g.degree = d;
        return g;
    }
    BoundaryData with_phase_mode(int n, double c, double s = 0.0) const {
        BoundaryData g = *this;
        g.phase_modes.push_back({n, c, s});
        return g;
    }

    double phase_perturbation(double t) const;
    double modulus_perturbation(double t) const;
    cplx trace(double t) const;

    /// Continuous phase d*t + phi(t) (no wrapping).
    double continuous_phase(double t) const { return degree * t + phase_perturbation(t); }

    /// Throws when the modulus perturbation exceeds the bound eps.
    void validate(double eps) const;
};

/// Writes the trace onto the boundary nodes of a field; interior untouched.
void apply_boundary(ComplexField& f, const BoundaryData& g, Vec2 center = {0, 0});

/// Winding number of the sampled trace along the grid's perimeter loop.
int sampled_trace_winding(const BoundaryData& g, const Grid& grid, Vec2 center = {0, 0});

} // namespace glpin
