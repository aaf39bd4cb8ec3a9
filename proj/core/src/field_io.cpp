#include "glpin/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "glpin/errors.hpp"

namespace glpin {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'F', '1'};

struct Header {
    char magic[4];
    std::int32_t nx, ny;
    std::int32_t domain_kind; // 0 disc, 1 rectangle
    std::int32_t components;  // 1 scalar, 2 complex
    double h, x0, y0;
    double lx, ly;
    std::int32_t spec_n;
    std::int32_t pad = 0;
};

Header make_header(const Grid& g, int components) {
    Header hd{};
    std::memcpy(hd.magic, kMagic, 4);
    hd.nx = g.nx;
    hd.ny = g.ny;
    hd.domain_kind = g.spec.kind == DomainSpec::Kind::UnitDisc ? 0 : 1;
    hd.components = components;
    hd.h = g.h;
    hd.x0 = g.x0;
    hd.y0 = g.y0;
    hd.lx = g.spec.lx;
    hd.ly = g.spec.ly;
    hd.spec_n = g.spec.n;
    return hd;
}

GridPtr rebuild_grid(const Header& hd) {
    DomainSpec spec;
    spec.kind = hd.domain_kind == 0 ? DomainSpec::Kind::UnitDisc : DomainSpec::Kind::Rectangle;
    spec.lx = hd.lx;
    spec.ly = hd.ly;
    spec.n = hd.spec_n;
    GridPtr g = spec.build();
    if (g->nx != hd.nx || g->ny != hd.ny)
        throw ConfigError("field file header inconsistent with rebuilt grid");
    return g;
}

template <class T>
void write_raw(std::ofstream& os, const T* p, size_t count) {
    os.write(reinterpret_cast<const char*>(p), count * sizeof(T));
}
template <class T>
void read_raw(std::ifstream& is, T* p, size_t count) {
    is.read(reinterpret_cast<char*>(p), count * sizeof(T));
    if (!is) throw ConfigError("truncated field file");
}

void save_impl(const Grid& g, const double* payload, int components,
               const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    Header hd = make_header(g, components);
    write_raw(os, &hd, 1);
    write_raw(os, reinterpret_cast<const std::uint8_t*>(g.kinds.data()), g.kinds.size());
    write_raw(os, payload, static_cast<size_t>(g.num_nodes()) * components);
    if (!os) throw ConfigError("write failure: " + path);
}

Header load_header(std::ifstream& is, const std::string& path) {
    Header hd{};
    read_raw(is, &hd, 1);
    if (std::memcmp(hd.magic, kMagic, 4) != 0)
        throw ConfigError("not a field file: " + path);
    return hd;
}

} // namespace

void save_field(const ComplexField& f, const std::string& path) {
    save_impl(*f.grid, reinterpret_cast<const double*>(f.v.data()), 2, path);
}

void save_field(const ScalarField& f, const std::string& path) {
    save_impl(*f.grid, f.v.data(), 1, path);
}

ComplexField load_complex_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    Header hd = load_header(is, path);
    if (hd.components != 2) throw ConfigError("expected a complex field: " + path);
    GridPtr g = rebuild_grid(hd);
    is.ignore(g->num_nodes()); // node kinds reproduced by the rebuild
    ComplexField f(g);
    read_raw(is, reinterpret_cast<double*>(f.v.data()), 2 * static_cast<size_t>(g->num_nodes()));
    return f;
}

ScalarField load_scalar_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    Header hd = load_header(is, path);
    if (hd.components != 1) throw ConfigError("expected a scalar field: " + path);
    GridPtr g = rebuild_grid(hd);
    is.ignore(g->num_nodes());
    ScalarField f(g);
    read_raw(is, f.v.data(), static_cast<size_t>(g->num_nodes()));
    return f;
}

namespace {
template <class Fn>
void csv_impl(const Grid& g, const std::string& path, Fn&& row) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os.precision(17);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const int id = g.node(i, j);
            if (!g.carries_value(id)) continue;
            const Vec2 p = g.pos(i, j);
            os << p.x << ',' << p.y << ',';
            row(os, id);
            os << '\n';
        }
}
} // namespace

void save_csv(const ComplexField& f, const std::string& path) {
    csv_impl(*f.grid, path, [&](std::ofstream& os, int id) {
        os << f.v[id].real() << ',' << f.v[id].imag();
    });
}

void save_csv(const ScalarField& f, const std::string& path) {
    csv_impl(*f.grid, path, [&](std::ofstream& os, int id) { os << f.v[id]; });
}

} // namespace glpin
