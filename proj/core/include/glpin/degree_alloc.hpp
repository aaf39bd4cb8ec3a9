#pragma once

#include <vector>

namespace glpin {

/// Integer degrees per inclusion, nonincreasing canonical order, sum d.
struct DegreeConfiguration {
    std::vector<int> degrees;

    int sum() const;
    int sum_squares() const;
    int sum_abs() const;
    bool operator==(const DegreeConfiguration&) const = default;
};

/// All minimizers of
///     pi * sum d_i^2 * |ln delta| + pi * b^2 * sum |d_i| * |ln xi|
/// over integer vectors with sum d_i = d and |d_i| <= d, up to permutation
/// (canonical nonincreasing representatives), by exact search.
std::vector<DegreeConfiguration> discrete_optimizer(int M, int d, double ln_delta,
                                                    double ln_xi, double b);

/// The constraint window of the balanced split: floor(d/M) <= d_i <= floor(d/M)+1
/// when M < d, and d_i in {0,1} when M >= d.
bool satisfies_constraint_window(const DegreeConfiguration& cfg, int M, int d);

} // namespace glpin
