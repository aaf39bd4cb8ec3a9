#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "glpin/boundary.hpp"
#include "glpin/energy.hpp"
#include "glpin/field.hpp"

namespace glpin {

struct SolverOptions {
    long max_iter = 100000;
    double tol_rel_energy = 1e-12; // relative energy decrease per accepted step
    double tol_grad = 1e-6;        // residual threshold is tol_grad / eps^2
    int multistart = 3;            // 1: predicted, 2: +random, 3: +harmonic
    std::uint64_t rng_seed = 0x2545f4914f6cdd1dULL;
    int ncg_restart = 200;
};

struct SolveResult {
    ComplexField v;
    EnergyBreakdown energy;
    long iterations = 0;
    double final_grad_residual = 0.0; // sup |dE/dv| / node area
    double final_rel_decrease = 0.0;
    double wall_seconds = 0.0;
    int winning_seed = -1; // index into the multistart list
    std::string seed_name;
};

/// Positions for the product-of-unit-vortices initializer.
struct SeedPlan {
    std::vector<Vec2> vortices;
};

enum class CoreProfile {
    Smooth, // r / sqrt(r^2 + 2 eps^2)
    Linear  // min(1, r / eps)
};

/// Product of unit vortices at the given points with eps-scale cores,
/// phase-corrected so that the trace matches g exactly at boundary nodes.
ComplexField vortex_product_seed(const GridPtr& grid, const BoundaryData& g,
                                 std::span<const Vec2> vortices, double eps,
                                 Vec2 trace_center = {0, 0},
                                 CoreProfile profile = CoreProfile::Smooth);

/// Local minimizer of the weighted energy F under the Dirichlet trace g.
/// Runs a multistart (predicted / random phase / harmonic extension) and
/// returns the lowest-energy converged result.
SolveResult minimize_F(const ScalarField& U, const BoundaryData& g, double eps,
                       const SeedPlan& plan, const SolverOptions& opts = {},
                       std::optional<double> contrast = {});

/// Same descent on the unweighted functional with coefficient field a.
SolveResult minimize_E(const ScalarField& a, const BoundaryData& g, double eps,
                       const SeedPlan& plan, const SolverOptions& opts = {});

/// Single descent from an explicit initial field (trace applied from g).
SolveResult minimize_F_from(const ScalarField& U, const BoundaryData& g, double eps,
                            ComplexField init, const SolverOptions& opts = {});
SolveResult minimize_E_from(const ScalarField& a, const BoundaryData& g, double eps,
                            ComplexField init, const SolverOptions& opts = {});

/// |E(Uv) - E(U) - F(v)| / max(1, E(Uv)) for the decomposition through the
/// special solution; vanishes for the continuum problem.
double substitution_residual(const ScalarField& U, const ComplexField& v,
                             const ScalarField& a, double eps);

} // namespace glpin
