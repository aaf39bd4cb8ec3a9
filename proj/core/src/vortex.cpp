#include "glpin/vortex.hpp"

#include <algorithm>
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

int winding_of_cycle(const ComplexField& v, const int* ids, int count) {
    double acc = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= count; ++k) {
        const cplx z = v.v[ids[k % count]];
        if (std::abs(z) == 0.0)
            throw InvariantError("zero-modulus node on a winding loop");
        const double ph = std::arg(z);
        if (k > 0) acc += principal(ph - prev);
        prev = ph;
    }
    return static_cast<int>(std::lround(acc / (2 * kPi)));
}

int cell_winding(const ComplexField& v, const Grid& g, int ci, int cj) {
    const int ids[4] = {g.node(ci, cj), g.node(ci + 1, cj), g.node(ci + 1, cj + 1),
                        g.node(ci, cj + 1)};
    return winding_of_cycle(v, ids, 4);
}

} // namespace

int plaquette_winding(const ComplexField& v, const std::vector<int>& loop_nodes) {
    return winding_of_cycle(v, loop_nodes.data(), static_cast<int>(loop_nodes.size()));
}

int total_winding(const ComplexField& v) {
    const Grid& g = *v.grid;
    int w = 0;
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci)
            if (g.cell_on[g.cell(ci, cj)]) w += cell_winding(v, g, ci, cj);
    return w;
}

VortexReport find_zeros(const ComplexField& v, const PinningConfig* cfg,
                        double zero_threshold) {
    const Grid& g = *v.grid;
    VortexReport rep;

    // candidate cells and their windings
    std::vector<int> cand;      // cell index
    std::vector<int> cand_wind; // same order
    std::vector<int> cell_slot(g.num_cells(), -1);
    for (int cj = 0; cj < g.ny; ++cj)
        for (int ci = 0; ci < g.nx; ++ci) {
            const int c = g.cell(ci, cj);
            if (!g.cell_on[c]) continue;
            const double m =
                std::min(std::min(std::abs(v.v[g.node(ci, cj)]), std::abs(v.v[g.node(ci + 1, cj)])),
                         std::min(std::abs(v.v[g.node(ci, cj + 1)]),
                                  std::abs(v.v[g.node(ci + 1, cj + 1)])));
            if (m >= zero_threshold) continue;
            const int w = cell_winding(v, g, ci, cj);
            if (w == 0) continue;
            cell_slot[c] = static_cast<int>(cand.size());
            cand.push_back(c);
            cand_wind.push_back(w);
        }

    // cluster by 8-connectivity
    std::vector<int> cluster(cand.size(), -1);
    int nclusters = 0;
    std::vector<int> stack;
    for (size_t s = 0; s < cand.size(); ++s) {
        if (cluster[s] >= 0) continue;
        const int cid = nclusters++;
        stack.assign(1, static_cast<int>(s));
        cluster[s] = cid;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            const int c = cand[cur];
            const int ci = c % g.nx, cj = c / g.nx;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ni = ci + di, nj = cj + dj;
                    if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
                    const int slot = cell_slot[g.cell(ni, nj)];
                    if (slot >= 0 && cluster[slot] < 0) {
                        cluster[slot] = cid;
                        stack.push_back(slot);
                    }
                }
        }
    }

    for (int cid = 0; cid < nclusters; ++cid) {
        Zero z;
        double wsum = 0.0;
        Vec2 acc{0, 0};
        for (size_t s = 0; s < cand.size(); ++s) {
            if (cluster[s] != cid) continue;
            z.winding += cand_wind[s];
            ++z.cells;
            const int c = cand[s];
            const int ci = c % g.nx, cj = c / g.nx;
            const int corners[4] = {g.node(ci, cj), g.node(ci + 1, cj), g.node(ci, cj + 1),
                                    g.node(ci + 1, cj + 1)};
            for (int id : corners) {
                const double w = 1.0 / std::max(std::abs(v.v[id]), 1e-300);
                acc = acc + g.pos(id) * w;
                wsum += w;
            }
        }
        z.pos = acc / wsum;
        if (z.cells > 4)
            rep.warnings.push_back("merged zero cluster of " + std::to_string(z.cells) +
                                   " cells near (" + std::to_string(z.pos.x) + "," +
                                   std::to_string(z.pos.y) + ")");
        if (cfg) z.inclusion = cfg->inclusion_of(z.pos);
        rep.zeros.push_back(z);
    }
    std::sort(rep.zeros.begin(), rep.zeros.end(), [](const Zero& a, const Zero& b) {
        return a.pos.x != b.pos.x ? a.pos.x < b.pos.x : a.pos.y < b.pos.y;
    });

    rep.total_winding = total_winding(v);
    if (cfg) {
        double floor = 1.0;
        for (int id = 0; id < g.num_nodes(); ++id) {
            if (!g.interior(id)) continue;
            if (cfg->inclusion_of(g.pos(id)) >= 0) continue;
            floor = std::min(floor, std::abs(v.v[id]));
        }
        rep.min_modulus_outside = floor;
    }
    return rep;
}

bool VortexReport::all_inside_pinning() const {
    for (const Zero& z : zeros)
        if (z.inclusion < 0) return false;
    return true;
}

bool VortexReport::all_windings_one() const {
    for (const Zero& z : zeros)
        if (z.winding != 1) return false;
    return true;
}

std::vector<int> VortexReport::zeros_per_inclusion(int M) const {
    std::vector<int> counts(M, 0);
    for (const Zero& z : zeros)
        if (z.inclusion >= 0 && z.inclusion < M) ++counts[z.inclusion];
    return counts;
}

ModulusFloor modulus_floor_report(const ComplexField& v, const PinningConfig& cfg,
                                  double eta, bool around_zeros) {
    const Grid& g = *v.grid;
    std::vector<Vec2> centers;
    if (around_zeros) {
        for (const Zero& z : find_zeros(v, &cfg).zeros) centers.push_back(z.pos);
    } else {
        centers = cfg.centers;
    }
    ModulusFloor out;
    for (int id = 0; id < g.num_nodes(); ++id) {
        if (!g.interior(id)) continue;
        const Vec2 p = g.pos(id);
        bool excluded = false;
        for (const Vec2& c : centers)
            if (dist(p, c) < eta) {
                excluded = true;
                break;
            }
        if (!excluded) out.floor = std::min(out.floor, std::abs(v.v[id]));
    }
    out.scaled = (1.0 - out.floor) * std::cbrt(std::abs(std::log(cfg.eps)));
    return out;
}

} // namespace glpin
