#pragma once

#include <vector>

#include "glpin/boundary.hpp"
#include "glpin/field.hpp"
#include "glpin/fourier.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

/// Placement parameters for the explicit competitor fields.  The vortex sites
/// inside an inclusion sit on a regular polygon in reference coordinates;
/// the radius fraction is relative to the inradius of omega seen from 0.
struct TestFunctionOptions {
    double placement_radius_frac = 0.5;
    double rho0 = 0.0; // Case I annulus radius; 0 picks it from the geometry
};

/// Case I (M >= d) competitor: product of unit vortices at the first d (or
/// chosen) inclusion centers with linear eps-cores, phase-corrected to match
/// g exactly on the boundary.  |v| = 1 outside the cores and |x-p|/eps inside.
ComplexField build_caseI(const PinningConfig& cfg, const GridPtr& grid,
                         const BoundaryData& g, double eps,
                         std::vector<int> chosen = {},
                         const TestFunctionOptions& opts = {});

/// Case II (M < d) competitor: d_i unit vortices per inclusion placed on a
/// polygon inside omega, cores of radius eps (= xi in blown-up coordinates).
ComplexField build_caseII(const PinningConfig& cfg, const GridPtr& grid,
                          const BoundaryData& g, double eps,
                          const std::vector<int>& degrees,
                          const TestFunctionOptions& opts = {});

/// Reference vortex sites for an inclusion of given degree, in reference
/// (omega) coordinates.
std::vector<Vec2> reference_sites(const InclusionShape& omega, int degree,
                                  double radius_frac = 0.5);

/// Extension of a near-unit-modulus trace from the circle of radius rho to
/// the annulus rho <= |x| <= 3 rho: cutoff interpolation to the pure d0-vortex
/// x^{d0}/|x|^{d0} beyond 2 rho.  Returned on a disc grid of radius 3 rho;
/// values inside the hole repeat the inner trace and are not meaningful.
ComplexField annulus_extension(const CircleSamples& f_eps, int d0, double rho, int n);

/// Quintic smoothstep, 0 on (-inf,0], 1 on [1,inf).
double smoothstep5(double u);

} // namespace glpin
