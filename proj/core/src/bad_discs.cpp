#include "glpin/bad_discs.hpp"

#include <algorithm>
#include <cmath>

namespace glpin {

int BadDiscSet::bad_count() const {
    int n = 0;
    for (const auto& d : discs)
        if (d.bad) ++n;
    return n;
}

BadDiscSet classify_bad_discs(const ComplexField& v, const ScalarField& U, double eps,
                              const BadDiscOptions& opts) {
    const Grid& g = *v.grid;
    BadDiscSet set;
    set.radius = std::pow(eps, 0.25);
    const double le = std::abs(std::log(eps));
    if (opts.mode == BadDiscOptions::Mode::Mu) {
        set.threshold = opts.C_mu * le;
    } else {
        const double chi = opts.chi > 0 ? opts.chi : std::pow(le, -1.0 / 3.0);
        set.threshold = std::max(chi * chi * le - opts.C1, 0.0);
    }

    // square lattice with spacing = radius: the discs cover the domain
    // (covering radius s/sqrt(2) < radius) while quarter-discs stay disjoint
    const double s = set.radius;
    const double xmin = g.x0, ymin = g.y0;
    const double xmax = g.x0 + g.nx * g.h, ymax = g.y0 + g.ny * g.h;
    for (double cy = ymin + 0.5 * s; cy < ymax; cy += s)
        for (double cx = xmin + 0.5 * s; cx < xmax; cx += s) {
            const Vec2 c{cx, cy};
            CellRegion region = cells_in_ball(g, c, set.radius);
            bool any = false;
            for (int k = 0; k < g.num_cells(); ++k)
                if (region.include[k] && g.cell_on[k]) {
                    any = true;
                    break;
                }
            if (!any) continue;
            BadDisc d;
            d.center = c;
            d.radius = set.radius;
            d.energy = energy_F(v, U, eps, {}, &region).total;
            d.bad = d.energy > set.threshold;
            set.discs.push_back(d);
        }

    if (set.bad_count() > opts.cap) set.cap_exceeded = true;

    // separated representatives: greedy by descending energy, doubling lambda
    // until the dropped bad discs are covered by the representatives
    std::vector<const BadDisc*> bad;
    for (const auto& d : set.discs)
        if (d.bad) bad.push_back(&d);
    std::sort(bad.begin(), bad.end(),
              [](const BadDisc* a, const BadDisc* b) { return a->energy > b->energy; });

    double lambda = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        std::vector<const BadDisc*> reps;
        for (const BadDisc* d : bad) {
            bool taken = false;
            for (const BadDisc* r : reps)
                if (dist(d->center, r->center) < 8.0 * lambda * set.radius) {
                    taken = true;
                    break;
                }
            if (!taken) reps.push_back(d);
        }
        bool covered = true;
        for (const BadDisc* d : bad) {
            bool ok = false;
            for (const BadDisc* r : reps)
                if (dist(d->center, r->center) + set.radius <= lambda * set.radius) {
                    ok = true;
                    break;
                }
            if (!ok) {
                covered = false;
                break;
            }
        }
        if (covered || bad.empty()) {
            set.lambda = lambda;
            for (const BadDisc* r : reps) {
                BadDisc rep = *r;
                rep.radius = lambda * set.radius;
                set.separated.push_back(rep);
            }
            break;
        }
        lambda *= 2.0;
    }
    return set;
}

} // namespace glpin
