#include "glpin/expansion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "glpin/errors.hpp"

namespace glpin {

namespace {
constexpr double kPi = std::numbers::pi;

void require_finite(double v, const std::string& name) {
    if (!std::isfinite(v))
        throw ConfigError("expansion input missing or not finite: " + name);
}
} // namespace

double ExpansionLedger::coefficient(const std::string& basis) const {
    double c = 0.0;
    for (const auto& t : terms)
        if (t.basis == basis) c += t.coefficient;
    return c;
}

double ExpansionLedger::eval(double eps, double delta) const {
    const double le = std::abs(std::log(eps));
    const double ld = std::abs(std::log(delta));
    const double lx = std::abs(std::log(eps / delta));
    double total = 0.0;
    for (const auto& t : terms) {
        double basis = 1.0;
        if (t.basis == "abs_ln_eps") basis = le;
        else if (t.basis == "abs_ln_delta") basis = ld;
        else if (t.basis == "abs_ln_xi") basis = lx;
        else if (t.basis != "const")
            throw ConfigError("unknown expansion basis: " + t.basis);
        total += t.coefficient * basis;
    }
    return total;
}

std::string ExpansionLedger::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"terms\":[";
    for (size_t k = 0; k < terms.size(); ++k) {
        const auto& t = terms[k];
        os << (k ? "," : "") << "{\"name\":\"" << t.name << "\",\"basis\":\"" << t.basis
           << "\",\"coefficient\":" << t.coefficient << ",\"formula\":\"" << t.formula
           << "\"}";
    }
    os << "]}";
    return os.str();
}

ExpansionLedger assemble_case1(int d, double b, double Wg, double Wloc) {
    require_finite(Wg, "Wg");
    require_finite(Wloc, "Wloc");
    ExpansionLedger led;
    led.terms.push_back({"vortex_cores", "abs_ln_eps", kPi * d * b * b, "pi*d*b^2"});
    led.terms.push_back(
        {"pinning_scale", "abs_ln_delta", kPi * (1.0 - b * b) * d, "pi*(1-b^2)*d"});
    led.terms.push_back({"interaction", "const", Wg, "W_g(points, unit degrees)"});
    led.terms.push_back({"local", "const", Wloc, "W_loc(b, omega, d)"});
    return led;
}

ExpansionLedger assemble_case2(const DegreeConfiguration& degrees, double b, double Wg,
                               double Wloc) {
    require_finite(Wg, "Wg");
    require_finite(Wloc, "Wloc");
    const int d = degrees.sum();
    const int s2 = degrees.sum_squares();
    ExpansionLedger led;
    led.terms.push_back({"vortex_cores", "abs_ln_eps", kPi * d * b * b, "pi*d*b^2"});
    led.terms.push_back({"pinning_scale", "abs_ln_delta", kPi * (s2 - d * b * b),
                         "pi*(sum d_i^2 - d*b^2)"});
    led.terms.push_back({"interaction", "const", Wg, "W_g(points, degrees)"});
    led.terms.push_back({"local", "const", Wloc, "W_loc(b, omega, degrees)"});
    return led;
}

ExpansionLedger assemble_model(int d0, double b, double rho, double W0, double Wloc,
                               double gamma) {
    require_finite(W0, "W0");
    require_finite(Wloc, "Wloc");
    require_finite(gamma, "gamma");
    ExpansionLedger led;
    // pi d0 b^2 ln(b/xi) = pi d0 b^2 |ln xi| + pi d0 b^2 ln b
    led.terms.push_back({"hole", "abs_ln_xi", kPi * d0 * b * b, "pi*d0*b^2"});
    led.terms.push_back(
        {"hole_contrast", "const", kPi * d0 * b * b * std::log(b), "pi*d0*b^2*ln(b)"});
    // pi d0^2 ln(rho/delta) = pi d0^2 |ln delta| + pi d0^2 ln(rho)
    led.terms.push_back({"annulus", "abs_ln_delta", kPi * d0 * d0, "pi*d0^2"});
    led.terms.push_back(
        {"annulus_outer", "const", kPi * d0 * d0 * std::log(rho), "pi*d0^2*ln(rho)"});
    led.terms.push_back({"outer_trace", "const", W0, "hhalf(outer phase remainder)"});
    led.terms.push_back({"local", "const", Wloc, "W_loc(beta)"});
    led.terms.push_back({"core_constant", "const", d0 * b * b * gamma, "d0*b^2*gamma"});
    return led;
}

} // namespace glpin
