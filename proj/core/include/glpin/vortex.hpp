#pragma once

#include <string>
#include <vector>

#include "glpin/field.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

struct Zero {
    Vec2 pos;
    int winding = 0;
    int inclusion = -1; // containing scaled inclusion, or -1
    int cells = 0;      // cluster size
};

struct VortexReport {
    std::vector<Zero> zeros;
    int total_winding = 0;
    double min_modulus_outside = 1.0; // min |v| outside the inclusions
    std::vector<std::string> warnings;

    bool all_inside_pinning() const;
    bool all_windings_one() const;
    std::vector<int> zeros_per_inclusion(int M) const;
};

/// (1/2pi) sum of principal phase differences along a closed node loop.
/// Exact integer; throws on a zero-modulus node.
int plaquette_winding(const ComplexField& v, const std::vector<int>& loop_nodes);

/// Sum of cell windings over all active cells == winding along the perimeter.
int total_winding(const ComplexField& v);

/// Zero detection: cells whose minimum corner modulus is below the threshold
/// and whose plaquette winding is nonzero, clustered by adjacency.  Cluster
/// position is the inverse-modulus weighted corner centroid.
VortexReport find_zeros(const ComplexField& v, const PinningConfig* cfg = nullptr,
                        double zero_threshold = 0.3);

/// Minimum modulus outside balls of radius eta around the inclusion centers
/// (or around the detected zeros when around_zeros is set), and the scaled
/// quantity (1 - floor) * |ln eps|^(1/3).
struct ModulusFloor {
    double floor = 1.0;
    double scaled = 0.0;
};
ModulusFloor modulus_floor_report(const ComplexField& v, const PinningConfig& cfg,
                                  double eta, bool around_zeros = false);

} // namespace glpin
