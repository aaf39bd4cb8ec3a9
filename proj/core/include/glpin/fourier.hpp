#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "glpin/boundary.hpp"

namespace glpin {

/// Finite Fourier expansion c_n, |n| <= nmax, of a function on a circle.
/// Real-valued functions satisfy c_{-n} = conj(c_n).
struct FourierTrace {
    int nmax = 0;
    std::vector<cplx> c; // index n + nmax
    double radius = 1.0;

    FourierTrace() = default;
    explicit FourierTrace(int n, double r = 1.0) : nmax(n), c(2 * n + 1), radius(r) {}

    cplx coeff(int n) const { return c[n + nmax]; }
    cplx& coeff(int n) { return c[n + nmax]; }

    double eval_real(double t) const; // sum Re(c_n e^{int})
    bool is_real(double tol = 1e-9) const;
};

/// H^{1/2} seminorm squared: sum |n| |c_n|^2.
double hhalf_seminorm(const FourierTrace& t);

/// Dirichlet energy (divided by 2 pi) of the harmonic map on the annulus
/// 1 < |x| < R interpolating the inner trace (coefficients a_n) and the outer
/// trace (coefficients b_n):
///   |b0-a0|^2/ln R
///   + sum_{n != 0} |n|/(R^{2|n|}-1) [ (|a_n|^2+|b_n|^2)(R^{2|n|}+1)
///                                     - 2(conj(a_n) b_n + a_n conj(b_n)) R^{|n|} ].
double annulus_energy(const FourierTrace& inner, const FourierTrace& outer, double R);

/// Uniform samples of a circle-valued map, angles 2 pi k / size().
struct CircleSamples {
    std::vector<cplx> values;
    double radius = 1.0;

    int winding() const;
};

CircleSamples sample_circle(const std::function<cplx(double)>& f, int count, double radius = 1.0);
CircleSamples sample_boundary_data(const BoundaryData& g, int count, double radius = 1.0);

/// Continuous phase of the samples minus d0*theta, expanded in Fourier modes.
/// Throws when the sampled winding differs from d0.
FourierTrace phase_remainder(const CircleSamples& s, int d0, int nmax);

/// (W0, W1): H^{1/2} energies of the phase remainders of the outer trace f0
/// (on its circle) and the inner trace g0 (on the unit circle).
std::pair<double, double> tilde_W01(const CircleSamples& f0, const CircleSamples& g0,
                                    int d0, int nmax = 32);

} // namespace glpin
