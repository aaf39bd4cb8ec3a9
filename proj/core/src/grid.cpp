#include "glpin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "glpin/errors.hpp"
#include "glpin/field.hpp"

namespace glpin {

namespace {

// Outer perimeter of the active cell union as an ordered node loop.
// Each boundary edge is directed with its active cell on the left, so the
// chained loop runs counterclockwise.
std::vector<int> trace_perimeter(const Grid& g) {
    std::multimap<int, int> next; // start node -> end node
    int nedges = 0;
    auto cell_active = [&](int ci, int cj) {
        if (ci < 0 || cj < 0 || ci >= g.nx || cj >= g.ny) return false;
        return g.cell_on[g.cell(ci, cj)] != 0;
    };
    for (int cj = 0; cj < g.ny; ++cj) {
        for (int ci = 0; ci < g.nx; ++ci) {
            if (!cell_active(ci, cj)) continue;
            const int p00 = g.node(ci, cj), p10 = g.node(ci + 1, cj);
            const int p11 = g.node(ci + 1, cj + 1), p01 = g.node(ci, cj + 1);
            if (!cell_active(ci, cj - 1)) { next.insert({p00, p10}); ++nedges; }
            if (!cell_active(ci + 1, cj)) { next.insert({p10, p11}); ++nedges; }
            if (!cell_active(ci, cj + 1)) { next.insert({p11, p01}); ++nedges; }
            if (!cell_active(ci - 1, cj)) { next.insert({p01, p00}); ++nedges; }
        }
    }
    if (nedges == 0) throw ConfigError("grid has no active cells");

    std::vector<int> loop;
    loop.reserve(nedges);
    int start = next.begin()->first;
    int cur = start;
    for (int k = 0; k < nedges; ++k) {
        loop.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end())
            throw ConfigError("active region perimeter is not a single loop");
        cur = it->second;
        next.erase(it);
        if (cur == start) break;
    }
    if (cur != start || !next.empty())
        throw ConfigError("active region is not simply connected");
    return loop;
}

} // namespace

GridPtr DomainSpec::build() const {
    if (n < 4) throw ConfigError("grid resolution n must be at least 4");
    if (lx <= 0 || ly <= 0) throw ConfigError("domain extent must be positive");

    auto grid = std::make_shared<Grid>();
    grid->spec = *this;
    grid->h = lx / n;
    const double h = grid->h;

    if (kind == Kind::Rectangle) {
        const double nyf = ly / h;
        const int ny = static_cast<int>(std::lround(nyf));
        if (std::abs(nyf - ny) > 1e-9 || ny < 4)
            throw ConfigError("rectangle extent.y must be a multiple of the spacing");
        grid->nx = n;
        grid->ny = ny;
        grid->x0 = 0.0;
        grid->y0 = 0.0;
        grid->kinds.assign(grid->num_nodes(), NodeKind::Interior);
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= n; ++i)
                if (i == 0 || j == 0 || i == n || j == ny)
                    grid->kinds[grid->node(i, j)] = NodeKind::Boundary;
        grid->cell_on.assign(grid->num_cells(), 1);
    } else {
        // Disc of radius lx/2 centered at the origin; one ghost ring of nodes
        // outside the bounding square so that every interior node has its
        // Dirichlet neighbors present.
        const double R = 0.5 * lx;
        grid->nx = n + 2;
        grid->ny = n + 2;
        grid->x0 = -R - h;
        grid->y0 = -R - h;
        grid->kinds.assign(grid->num_nodes(), NodeKind::Exterior);
        for (int j = 0; j <= grid->ny; ++j)
            for (int i = 0; i <= grid->nx; ++i)
                if (grid->pos(i, j).norm() < R - 1e-12 * R)
                    grid->kinds[grid->node(i, j)] = NodeKind::Interior;
        auto interior_at = [&](int i, int j) {
            if (i < 0 || j < 0 || i > grid->nx || j > grid->ny) return false;
            return grid->kinds[grid->node(i, j)] == NodeKind::Interior;
        };
        for (int j = 0; j <= grid->ny; ++j)
            for (int i = 0; i <= grid->nx; ++i) {
                const int id = grid->node(i, j);
                if (grid->kinds[id] != NodeKind::Exterior) continue;
                if (interior_at(i - 1, j) || interior_at(i + 1, j) ||
                    interior_at(i, j - 1) || interior_at(i, j + 1))
                    grid->kinds[id] = NodeKind::Boundary;
            }
        grid->cell_on.assign(grid->num_cells(), 0);
        for (int cj = 0; cj < grid->ny; ++cj)
            for (int ci = 0; ci < grid->nx; ++ci) {
                const bool on = grid->carries_value(grid->node(ci, cj)) &&
                                grid->carries_value(grid->node(ci + 1, cj)) &&
                                grid->carries_value(grid->node(ci, cj + 1)) &&
                                grid->carries_value(grid->node(ci + 1, cj + 1));
                grid->cell_on[grid->cell(ci, cj)] = on ? 1 : 0;
            }
    }

    grid->node_area.assign(grid->num_nodes(), 0.0);
    for (int cj = 0; cj < grid->ny; ++cj)
        for (int ci = 0; ci < grid->nx; ++ci) {
            if (!grid->cell_on[grid->cell(ci, cj)]) continue;
            const double q = 0.25 * h * h;
            grid->node_area[grid->node(ci, cj)] += q;
            grid->node_area[grid->node(ci + 1, cj)] += q;
            grid->node_area[grid->node(ci, cj + 1)] += q;
            grid->node_area[grid->node(ci + 1, cj + 1)] += q;
        }
    double area = 0.0;
    for (double a : grid->node_area) area += a;
    grid->active_area = area;

    grid->interior_nodes.clear();
    for (int id = 0; id < grid->num_nodes(); ++id)
        if (grid->kinds[id] == NodeKind::Interior) grid->interior_nodes.push_back(id);
    if (grid->interior_nodes.empty())
        throw ConfigError("domain has no interior nodes at this resolution");

    grid->boundary_loop = trace_perimeter(*grid);
    return grid;
}

int Grid::nearest_node(Vec2 p) const {
    int i = static_cast<int>(std::lround((p.x - x0) / h));
    int j = static_cast<int>(std::lround((p.y - y0) / h));
    i = std::clamp(i, 0, nx);
    j = std::clamp(j, 0, ny);
    return node(i, j);
}

namespace {
template <class F, class T>
T bilinear(const F& f, Vec2 p, T zero) {
    const Grid& g = *f.grid;
    double fx = (p.x - g.x0) / g.h;
    double fy = (p.y - g.y0) / g.h;
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, g.nx - 1);
    j = std::clamp(j, 0, g.ny - 1);
    const double sx = std::clamp(fx - i, 0.0, 1.0);
    const double sy = std::clamp(fy - j, 0.0, 1.0);
    T v00 = f.v[g.node(i, j)], v10 = f.v[g.node(i + 1, j)];
    T v01 = f.v[g.node(i, j + 1)], v11 = f.v[g.node(i + 1, j + 1)];
    (void)zero;
    return v00 * ((1 - sx) * (1 - sy)) + v10 * (sx * (1 - sy)) +
           v01 * ((1 - sx) * sy) + v11 * (sx * sy);
}
} // namespace

double sample_bilinear(const ScalarField& f, Vec2 p) { return bilinear(f, p, 0.0); }
cplx sample_bilinear(const ComplexField& f, Vec2 p) { return bilinear(f, p, cplx{}); }

} // namespace glpin
