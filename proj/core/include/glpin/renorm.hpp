#pragma once

#include <optional>
#include <span>
#include <vector>

#include "glpin/boundary.hpp"
#include "glpin/field.hpp"
#include "glpin/fourier.hpp"
#include "glpin/geometry.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

struct WgOptions {
    std::vector<double> rho_ladder = {0.08, 0.04, 0.02};
    int grid_n = 320;
};

struct WgResult {
    double value = 0.0;    // extrapolated rho -> 0
    double slope = 0.0;    // fitted coefficient of rho |ln rho|
    std::vector<double> rho;
    std::vector<double> I_rho;      // perforated Dirichlet energies
    std::vector<double> remainder;  // I_rho - pi sum(d_i^2) |ln rho|
};

/// Renormalized interaction energy of prescribed vortices under the trace g:
/// the remainder of the perforated Dirichlet energy after removing the
/// pi * sum(d_i^2) * |ln rho| singular cost, extrapolated with the error
/// model c0 + c1 * rho |ln rho|.
WgResult extract_Wg(const DomainSpec& dom, const BoundaryData& g,
                    std::span<const Vec2> points, std::span<const int> degrees,
                    const WgOptions& opts = {});

/// A candidate placement of vortices on inclusions with its extracted value.
struct Selection {
    std::vector<int> indices;  // chosen inclusion indices (Case I) or all 0..M-1
    std::vector<int> degrees;  // per chosen index
    double Wg = 0.0;
};

struct SelectionResult {
    std::vector<Selection> optima; // all within tie tolerance
    std::vector<Selection> all;    // every candidate evaluated
};

/// Case I (M >= d): minimize W_g over d-subsets of the centers, unit degrees.
/// Case II (M < d): minimize over degree vectors in the balanced window.
SelectionResult select_inclusions(const DomainSpec& dom, const BoundaryData& g,
                                  const PinningConfig& cfg, int d,
                                  const WgOptions& opts = {}, double tie_tol = 1e-4);

struct TildeW2Options {
    std::vector<double> r_ladder = {0.05, 0.035, 0.025};
    int grid_n = 320;
};

struct TildeW2Result {
    double value = 0.0; // extrapolated r -> 0 with the r^2 error model
    std::vector<double> r;
    std::vector<double> remainder; // K(r) - pi d0 b^2 |ln r|
};

/// Local renormalized energy of vortex positions inside the unit-size
/// inclusion: K(r) minus pi d0 b^2 |ln r|, extrapolated in r^2.  The weight is
/// b^2 on omega and 1 outside, on the unit disc.
TildeW2Result extract_tildeW2(std::span<const Vec2> betas, const BoundaryData& g0,
                              double b, const InclusionShape& omega,
                              const TildeW2Options& opts = {});

struct TildeWOptions {
    int n_modes = 8;          // Fourier modes of the trace perturbation
    int grid_n = 192;         // grid used during the descent
    int final_grid_n = 320;   // re-evaluation of the minimizer
    int max_poll_rounds = 60;
    double initial_step = 0.25;
    double min_step = 1e-3;
};

struct TildeWResult {
    double value = 0.0;              // upper bound of the infimum
    BoundaryData minimizing_trace;   // e^{i(d0 t + phi(t))}
    double W1 = 0.0, W2 = 0.0;
    bool stagnated = false;
    long evaluations = 0;
};

/// inf over traces g of W1(g) + W2(betas, g), by compass search over the
/// Fourier coefficients of the phase perturbation.  The returned value is an
/// upper bound for the infimum (declared as such).
TildeWResult extract_tildeW(std::span<const Vec2> betas, double b,
                            const InclusionShape& omega, int d0,
                            const TildeWOptions& opts = {});

struct GammaOptions {
    int grid_n = 256;
    double ladder_factor = 2.0; // second run at eps_eff / factor
    long max_iter = 400000;
};

struct GammaResult {
    double value = 0.0;           // extrapolated
    double estimate_coarse = 0.0; // at eps_eff
    double estimate_fine = 0.0;   // at eps_eff / factor
};

/// Core energy constant of the classical unit vortex: minimizes the plain
/// Ginzburg-Landau energy on B(0,r) with trace x/r at effective parameter
/// eps_eff = xi/b and removes pi ln(r/eps_eff).
GammaResult compute_gamma(double eps_eff, double r, const GammaOptions& opts = {});

} // namespace glpin
