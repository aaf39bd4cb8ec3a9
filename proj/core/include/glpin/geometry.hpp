#pragma once

#include <cmath>
#include <vector>

namespace glpin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Reference inclusion shape omega: an open set with 0 inside and closure
/// contained in the unit disc.  Instances are used after scaling by delta
/// and translation to an inclusion center.
struct InclusionShape {
    enum class Kind { Disc, Polygon };

    Kind kind = Kind::Disc;
    double radius = 0.5;        // disc radius as a fraction of the unit ball
    std::vector<Vec2> vertices; // polygon, counterclockwise

    static InclusionShape disc(double r = 0.5) {
        InclusionShape s;
        s.kind = Kind::Disc;
        s.radius = r;
        return s;
    }
    static InclusionShape polygon(std::vector<Vec2> vs) {
        InclusionShape s;
        s.kind = Kind::Polygon;
        s.vertices = std::move(vs);
        return s;
    }

    /// Point membership in reference coordinates.
    bool contains(Vec2 p) const;

    /// sup |x| over the shape (containment radius).
    double outer_radius() const;

    /// Distance from 0 to the shape boundary along the inside (>0 when valid).
    double inradius_from_origin() const;

    /// Unsigned distance from p to the shape boundary.
    double boundary_distance(Vec2 p) const;

    /// Throws ConfigError unless 0 in omega and closure(omega) in B(0,1).
    void validate() const;
};

} // namespace glpin
