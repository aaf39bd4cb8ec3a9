#include "glpin/degree_alloc.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

int DegreeConfiguration::sum() const {
    int s = 0;
    for (int d : degrees) s += d;
    return s;
}
int DegreeConfiguration::sum_squares() const {
    int s = 0;
    for (int d : degrees) s += d * d;
    return s;
}
int DegreeConfiguration::sum_abs() const {
    int s = 0;
    for (int d : degrees) s += std::abs(d);
    return s;
}

namespace {
void enumerate(int slots_left, int sum_left, int max_entry, int bound,
               std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& emit) {
    if (slots_left == 0) {
        if (sum_left == 0) emit(cur);
        return;
    }
    // nonincreasing entries in [-bound, min(max_entry, bound)]
    for (int v = std::min(max_entry, bound); v >= -bound; --v) {
        // feasibility: remaining entries are <= v and >= -bound
        const int rest = slots_left - 1;
        const int lo = sum_left - v - rest * v;        // need sum of rest >= ...
        const int hi = sum_left - v + rest * bound;    // need sum of rest <= ...
        if (lo > 0 || hi < 0) continue;
        cur.push_back(v);
        enumerate(rest, sum_left - v, v, bound, cur, emit);
        cur.pop_back();
    }
}
} // namespace

std::vector<DegreeConfiguration> discrete_optimizer(int M, int d, double ln_delta,
                                                    double ln_xi, double b) {
    if (M < 1 || d < 1) throw ConfigError("discrete_optimizer requires M >= 1, d >= 1");
    if (!(ln_delta < 0.0) || !(ln_xi < 0.0))
        throw ConfigError("discrete_optimizer requires ln delta < 0 and ln xi < 0");
    if (!(b > 0.0 && b < 1.0)) throw ConfigError("discrete_optimizer requires b in (0,1)");

    const double wd = std::numbers::pi * std::abs(ln_delta);
    const double wx = std::numbers::pi * b * b * std::abs(ln_xi);

    std::vector<DegreeConfiguration> best;
    double best_val = 0.0;
    std::vector<int> cur;
    enumerate(M, d, d, d, cur, [&](const std::vector<int>& v) {
        DegreeConfiguration cfg{v};
        const double val = wd * cfg.sum_squares() + wx * cfg.sum_abs();
        if (best.empty() || val < best_val - 1e-12 * std::max(1.0, std::abs(best_val))) {
            best.clear();
            best.push_back(cfg);
            best_val = val;
        } else if (std::abs(val - best_val) <= 1e-12 * std::max(1.0, std::abs(best_val))) {
            best.push_back(cfg);
        }
    });
    return best;
}

bool satisfies_constraint_window(const DegreeConfiguration& cfg, int M, int d) {
    const int m0 = d / M; // floor for positive d, M
    for (int di : cfg.degrees) {
        if (M >= d) {
            if (di != 0 && di != 1) return false;
        } else {
            if (di < m0 || di > m0 + 1) return false;
        }
    }
    return true;
}

} // namespace glpin
