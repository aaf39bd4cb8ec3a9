#pragma once

#include <optional>
#include <span>
#include <vector>

#include "glpin/boundary.hpp"
#include "glpin/field.hpp"

namespace glpin {

/// Weighted linear phase problem: find psi with
///     div( w * (grad theta + grad psi) ) = 0   at interior nodes,
/// where theta = sum_k d_k * arg(x - beta_k) and w is a squared weight field
/// (a^2 or U^2).  The Dirichlet condition for psi comes either from a trace g
/// via e^{i(theta+psi)} = g on the perimeter, or from explicit values.
struct PhaseProblem {
    GridPtr grid;
    ScalarField weight;              // nodal squared weight; empty means w == 1
    std::vector<Vec2> vortices;
    std::vector<int> degrees;        // same length as vortices
    std::optional<BoundaryData> trace;
    Vec2 trace_center{0.0, 0.0};
    std::vector<double> psi_boundary; // direct Dirichlet values (full node vector)

    int total_degree() const;
    void check(double h) const; // vortex placement preconditions
};

struct PhaseSolution {
    ScalarField psi;        // boundary nodes filled with the Dirichlet values
    double residual = 0.0;  // sup |A psi - b| / max(1, sup |b|)
    long iterations = 0;
};

PhaseSolution solve_phase(const PhaseProblem& p, double tol = 1e-8, long max_iter = 0);

/// grad theta at x for the prescribed vortex set.
Vec2 singular_gradient(std::span<const Vec2> vortices, std::span<const int> degrees, Vec2 x);

/// Discrete flux of w*(grad theta + grad psi) out of the node set
/// {|x - center| < radius}.  Exactly the sum of interior equation residuals
/// inside, so it vanishes at convergence (discrete divergence theorem).
double phase_flux(const PhaseProblem& p, const ScalarField& psi, Vec2 center, double radius);

/// 1/2 int_{Omega_r} w |grad theta + grad psi|^2 over the domain minus the
/// r-balls around the vortices.  Cells near the excluded rings are subsampled.
double perforated_energy(const PhaseProblem& p, const ScalarField& psi, double r);

/// Weighted renormalized-energy functional on the unit disc: solves the phase
/// problem for unit-degree vortices at the betas with trace g0 on the
/// perimeter and evaluates the perforated energy at radius r.
double perforated_energy_K(double r, const BoundaryData& g0, std::span<const Vec2> betas,
                           const ScalarField& weight);

/// Continuous (unwrapped) values of a circle-valued quantity along the grid
/// perimeter loop; used to set Dirichlet phases.  Returns one value per loop
/// node; the closing increment must match 2*pi*expected_winding.
std::vector<double> unwrap_on_loop(const Grid& g, const std::vector<double>& principal,
                                   int expected_winding);

} // namespace glpin
