#pragma once

#include <string>
#include <vector>

#include "glpin/energy.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

struct SpecialSolveOptions {
    long max_iter = 400000;
    double tol_rel_energy = 1e-12; // relative energy decrease per step
    // sup-norm residual of the dimensionless Euler-Lagrange equation
    // -eps^2 lap U = U (a^2 - U^2); both sides are O(1) in this scaling
    double tol_residual = 1e-8;
    bool project = true;  // clamp iterates to [b, 1]
    bool init_at_one = false; // start from U == 1 instead of U == a_delta
};

/// Real positive minimizer of E_eps with boundary value 1; the weight of F_eps.
struct SpecialSolution {
    ScalarField U;
    double el_residual = 0.0;
    long iterations = 0;
    EnergyBreakdown energy;
    bool core_resolution_warning = false; // eps resolved by < 2 cells
    std::vector<double> energy_trace;     // sampled iterate energies
};

SpecialSolution solve_U(const PinningConfig& cfg, const GridPtr& grid,
                        const SpecialSolveOptions& opts = {});

/// Exponential closeness of U to a_delta away from the inclusion interfaces:
/// max |a - U| and max |grad U| on the shells V_R = {dist(x, d(omega_delta)) >= R}
/// for a ladder of R, with fitted constants of the decay C exp(-c R / eps).
struct SpecialEstimateReport {
    std::vector<double> R;
    std::vector<double> max_dev;
    std::vector<double> max_grad;
    double fitted_C = 0.0, fitted_c = 0.0;           // fit of max_dev
    double grad_fitted_C = 0.0, grad_fitted_c = 0.0; // fit of eps * max_grad
    double predicted_c = 0.0;                        // sqrt(b(1+b))/4, for comparison only

    std::string to_json() const;
};

SpecialEstimateReport u_estimate_report(const SpecialSolution& sol, const PinningConfig& cfg,
                                        std::vector<double> R_ladder = {});

} // namespace glpin
