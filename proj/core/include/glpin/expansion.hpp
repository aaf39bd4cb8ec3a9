#pragma once

#include <string>
#include <vector>

#include "glpin/degree_alloc.hpp"

namespace glpin {

/// One term of an energy expansion: coefficient times a log basis function.
struct ExpansionTerm {
    std::string name;
    std::string basis;   // "abs_ln_eps" | "abs_ln_delta" | "abs_ln_xi" | "const"
    double coefficient = 0.0;
    std::string formula; // how the coefficient was formed
};

struct ExpansionLedger {
    std::vector<ExpansionTerm> terms;

    /// Coefficient sum per basis; missing basis contributes zero.
    double coefficient(const std::string& basis) const;

    /// Predicted total at the given scales: terms are summed in order so the
    /// ledger total and eval agree bitwise with a manual in-order sum.
    double eval(double eps, double delta) const;

    std::string to_json() const;
};

/// F = pi d b^2 |ln eps| + pi (1-b^2) d |ln delta| + W_g + W_loc  (more
/// inclusions than vortices; unit degrees).
ExpansionLedger assemble_case1(int d, double b, double Wg, double Wloc);

/// F = pi d b^2 |ln eps| + pi (sum d_i^2 - d b^2) |ln delta| + W_g + W_loc.
ExpansionLedger assemble_case2(const DegreeConfiguration& degrees, double b, double Wg,
                               double Wloc);

/// Model problem on B(0, rho/delta):
/// pi d0 b^2 ln(b/xi) + pi d0^2 ln(rho/delta) + W0 + W_loc + d0 b^2 gamma.
ExpansionLedger assemble_model(int d0, double b, double rho, double W0, double Wloc,
                               double gamma);

} // namespace glpin
