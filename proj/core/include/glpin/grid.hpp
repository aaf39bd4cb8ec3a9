#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "glpin/geometry.hpp"

namespace glpin {

enum class NodeKind : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

struct Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Simply connected computational domain sampled on a uniform square grid.
/// Disc domains are embedded in their bounding square; the nodes just outside
/// the circle that touch an interior node form the Dirichlet boundary layer.
struct DomainSpec {
    enum class Kind { UnitDisc, Rectangle };

    Kind kind = Kind::UnitDisc;
    double lx = 2.0;   // extent in x (unit disc: bounding box side 2)
    double ly = 2.0;   // extent in y
    int n = 128;       // cells across the x extent; h = lx / n

    /// Disc of radius r centered at the origin, n cells across the diameter.
    static DomainSpec disc(int n, double radius = 1.0) {
        DomainSpec d;
        d.kind = Kind::UnitDisc;
        d.lx = d.ly = 2.0 * radius;
        d.n = n;
        return d;
    }
    /// Axis-aligned rectangle [0,lx] x [0,ly]; ly must be a multiple of h.
    static DomainSpec rectangle(int n, double lx, double ly) {
        DomainSpec d;
        d.kind = Kind::Rectangle;
        d.lx = lx;
        d.ly = ly;
        d.n = n;
        return d;
    }

    double radius() const { return 0.5 * lx; } // disc domains only
    GridPtr build() const;
};

/// Node/cell layout shared by all fields on one domain.
struct Grid {
    DomainSpec spec;
    int nx = 0, ny = 0;      // cells
    double h = 0.0;          // spacing
    double x0 = 0.0, y0 = 0.0; // position of node (0,0)

    std::vector<NodeKind> kinds;     // (nx+1)*(ny+1)
    std::vector<std::uint8_t> cell_on; // nx*ny; 1 when all four corners carry values
    std::vector<double> node_area;   // quadrature weight: h^2 * (#active adjacent cells)/4
    std::vector<int> interior_nodes; // flattened ids, row-major order
    std::vector<int> boundary_loop;  // outer perimeter of the active region, closed ccw
    double active_area = 0.0;        // sum of node_area

    int node(int i, int j) const { return j * (nx + 1) + i; }
    int cell(int i, int j) const { return j * nx + i; }
    int num_nodes() const { return (nx + 1) * (ny + 1); }
    int num_cells() const { return nx * ny; }
    Vec2 pos(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    Vec2 pos(int id) const { return pos(id % (nx + 1), id / (nx + 1)); }
    Vec2 cell_center(int ci, int cj) const {
        return {x0 + (ci + 0.5) * h, y0 + (cj + 0.5) * h};
    }
    bool interior(int id) const { return kinds[id] == NodeKind::Interior; }
    bool carries_value(int id) const { return kinds[id] != NodeKind::Exterior; }

    /// Nearest node index to a point (clamped to the grid box).
    int nearest_node(Vec2 p) const;
};

} // namespace glpin
