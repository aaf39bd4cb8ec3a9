#pragma once

#include <optional>
#include <span>
#include <vector>

#include "glpin/field.hpp"

namespace glpin {

struct EnergyBreakdown {
    double total = 0.0;
    double gradient = 0.0;
    double potential = 0.0;
};

/// Restriction of the energy integral to a subset of grid cells
/// (always intersected with the active cells of the mask).
struct CellRegion {
    std::vector<std::uint8_t> include; // size num_cells
};

CellRegion cells_in_ball(const Grid& g, Vec2 center, double radius);
CellRegion cells_outside_balls(const Grid& g, std::span<const Vec2> centers, double radius);

// Discretization: the gradient term is sampled at cell midpoints from forward
// differences of the four corners; the potential term uses nodal quadrature
// with cell-area weights.  Both are second order for smooth fields.

/// E(u) = 1/2 int |grad u|^2 + 1/(4 eps^2) int (a^2 - |u|^2)^2
EnergyBreakdown energy_E(const ComplexField& u, const ScalarField& a, double eps,
                         const CellRegion* region = nullptr);

/// F(v) = 1/2 int U^2 |grad v|^2 + 1/(4 eps^2) int U^4 (1 - |v|^2)^2.
/// When a contrast b is supplied the weight is required to satisfy
/// b - tol <= U <= 1 + tol nodewise (tol = 1e-10).
EnergyBreakdown energy_F(const ComplexField& v, const ScalarField& U, double eps,
                         std::optional<double> contrast = {},
                         const CellRegion* region = nullptr);

/// Scalar form of energy_E for real-valued fields (the special solution).
EnergyBreakdown energy_U(const ScalarField& U, const ScalarField& a, double eps);

// Fused energy + analytic gradient with respect to interior node values.
// Gradient entries at boundary/exterior nodes are zero.
EnergyBreakdown energy_E_with_grad(const ComplexField& u, const ScalarField& a,
                                   double eps, std::vector<cplx>& grad);
EnergyBreakdown energy_F_with_grad(const ComplexField& v, const ScalarField& U,
                                   double eps, std::vector<cplx>& grad);
EnergyBreakdown energy_U_with_grad(const ScalarField& U, const ScalarField& a,
                                   double eps, std::vector<double>& grad);

inline constexpr double kWeightTol = 1e-10;

} // namespace glpin
