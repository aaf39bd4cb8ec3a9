#include "glpin/fourier.hpp"

#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

namespace {
constexpr double kPi = std::numbers::pi;

double principal(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}
} // namespace

double FourierTrace::eval_real(double t) const {
    cplx s{0, 0};
    for (int n = -nmax; n <= nmax; ++n)
        s += coeff(n) * std::polar(1.0, n * t);
    return s.real();
}

bool FourierTrace::is_real(double tol) const {
    for (int n = 1; n <= nmax; ++n)
        if (std::abs(coeff(-n) - std::conj(coeff(n))) > tol) return false;
    return std::abs(coeff(0).imag()) <= tol;
}

double hhalf_seminorm(const FourierTrace& t) {
    double s = 0.0;
    for (int n = -t.nmax; n <= t.nmax; ++n)
        s += std::abs(n) * std::norm(t.coeff(n));
    return s;
}

double annulus_energy(const FourierTrace& inner, const FourierTrace& outer, double R) {
    if (!(R > 1.0)) throw ConfigError("annulus_energy requires R > 1");
    const int nmax = std::max(inner.nmax, outer.nmax);
    auto a = [&](int n) { return std::abs(n) <= inner.nmax ? inner.coeff(n) : cplx{}; };
    auto b = [&](int n) { return std::abs(n) <= outer.nmax ? outer.coeff(n) : cplx{}; };

    double e = std::norm(b(0) - a(0)) / std::log(R);
    for (int n = -nmax; n <= nmax; ++n) {
        if (n == 0) continue;
        const double an = std::abs(n);
        const double Rn = std::pow(R, an);       // R^{|n|}
        const double R2n = Rn * Rn;              // R^{2|n|}
        const cplx cross = std::conj(a(n)) * b(n) + a(n) * std::conj(b(n));
        e += an / (R2n - 1.0) *
             ((std::norm(a(n)) + std::norm(b(n))) * (R2n + 1.0) - 2.0 * cross.real() * Rn);
    }
    return e;
}

int CircleSamples::winding() const {
    const size_t m = values.size();
    double acc = 0.0;
    for (size_t k = 0; k < m; ++k) {
        const cplx z0 = values[k], z1 = values[(k + 1) % m];
        if (std::abs(z0) == 0.0 || std::abs(z1) == 0.0)
            throw InvariantError("zero sample in circle trace");
        acc += principal(std::arg(z1) - std::arg(z0));
    }
    return static_cast<int>(std::lround(acc / (2 * kPi)));
}

CircleSamples sample_circle(const std::function<cplx(double)>& f, int count, double radius) {
    CircleSamples s;
    s.radius = radius;
    s.values.resize(count);
    for (int k = 0; k < count; ++k) s.values[k] = f(2 * kPi * k / count);
    return s;
}

CircleSamples sample_boundary_data(const BoundaryData& g, int count, double radius) {
    return sample_circle([&](double t) { return g.trace(t); }, count, radius);
}

FourierTrace phase_remainder(const CircleSamples& s, int d0, int nmax) {
    const int m = static_cast<int>(s.values.size());
    if (m < 4 * (nmax + 1))
        throw ConfigError("phase_remainder: not enough samples for the requested modes");
    if (s.winding() != d0)
        throw ConfigError("phase_remainder: sampled winding does not match d0");

    // cumulative unwrapped phase minus d0*theta
    std::vector<double> rem(m);
    double acc = std::arg(s.values[0]);
    rem[0] = acc;
    for (int k = 1; k < m; ++k) {
        acc += principal(std::arg(s.values[k]) - std::arg(s.values[k - 1]));
        rem[k] = acc - d0 * (2 * kPi * k / m);
    }

    FourierTrace tr(nmax, s.radius);
    for (int n = -nmax; n <= nmax; ++n) {
        cplx c{0, 0};
        for (int k = 0; k < m; ++k)
            c += rem[k] * std::polar(1.0, -n * (2 * kPi * k / m));
        tr.coeff(n) = c / static_cast<double>(m);
    }
    return tr;
}

std::pair<double, double> tilde_W01(const CircleSamples& f0, const CircleSamples& g0,
                                    int d0, int nmax) {
    const FourierTrace zeta = phase_remainder(f0, d0, nmax);
    const FourierTrace phi = phase_remainder(g0, d0, nmax);
    return {hhalf_seminorm(zeta), hhalf_seminorm(phi)};
}

} // namespace glpin
