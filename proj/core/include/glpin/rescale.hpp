#pragma once

#include "glpin/field.hpp"

namespace glpin {

/// Blow-up v_hat(x_hat) = v(center + delta * x_hat) resampled onto a disc grid
/// of radius rho/delta with n_hat cells across.  The weighted energies satisfy
/// F_eps(v, B(center,rho)) = F_xi(v_hat, B(0,rho/delta)) up to quadrature error.
ComplexField rescale_hat(const ComplexField& v, Vec2 center, double rho, double delta,
                         int n_hat);
ScalarField rescale_hat(const ScalarField& f, Vec2 center, double rho, double delta,
                        int n_hat);

} // namespace glpin
