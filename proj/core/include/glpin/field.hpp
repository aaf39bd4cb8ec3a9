#pragma once

#include <complex>
#include <vector>

#include "glpin/grid.hpp"

namespace glpin {

using cplx = std::complex<double>;

struct ScalarField {
    GridPtr grid;
    std::vector<double> v; // per node, exterior entries 0

    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), v(grid->num_nodes(), fill) {}

    double& operator[](int id) { return v[id]; }
    double operator[](int id) const { return v[id]; }
};

// Interleaved re/im per node (std::complex storage).
struct ComplexField {
    GridPtr grid;
    std::vector<cplx> v;

    ComplexField() = default;
    explicit ComplexField(GridPtr g, cplx fill = {0.0, 0.0})
        : grid(std::move(g)), v(grid->num_nodes(), fill) {}

    cplx& operator[](int id) { return v[id]; }
    cplx operator[](int id) const { return v[id]; }
};

/// Bilinear interpolation at an arbitrary point (p must be inside the node box).
double sample_bilinear(const ScalarField& f, Vec2 p);
cplx sample_bilinear(const ComplexField& f, Vec2 p);

} // namespace glpin
