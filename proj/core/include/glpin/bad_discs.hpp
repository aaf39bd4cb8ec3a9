#pragma once

#include <vector>

#include "glpin/energy.hpp"
#include "glpin/field.hpp"

namespace glpin {

struct BadDisc {
    Vec2 center;
    double radius = 0.0;
    double energy = 0.0;
    bool bad = false;
};

struct BadDiscOptions {
    enum class Mode { Mu, Chi };
    Mode mode = Mode::Mu;
    double C_mu = 0.25;  // mu-threshold coefficient on |ln eps|
    double chi = 0.0;    // 0: use |ln eps|^{-1/3}
    double C1 = 0.0;     // subtracted constant in chi mode
    int cap = 64;        // reported, never enforced by crashing
};

/// Lattice of eps^{1/4}-discs covering the domain with per-disc local energy,
/// the bad/good classification, and greedily separated representatives with
/// pairwise distance >= 8 lambda eps^{1/4}.
struct BadDiscSet {
    std::vector<BadDisc> discs;
    std::vector<BadDisc> separated;
    double radius = 0.0;    // eps^{1/4}
    double threshold = 0.0; // energy threshold actually used
    double lambda = 1.0;
    bool cap_exceeded = false;

    int bad_count() const;
};

BadDiscSet classify_bad_discs(const ComplexField& v, const ScalarField& U, double eps,
                              const BadDiscOptions& opts = {});

} // namespace glpin
