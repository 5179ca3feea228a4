#include "ldg/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ldg {

namespace {

constexpr const char* kTitleTag = "ldg-field v1";

template <class U>
U to_big_endian(U v) {
    if constexpr (std::endian::native == std::endian::little) {
        if constexpr (sizeof(U) == 8) return __builtin_bswap64(v);
        else return __builtin_bswap32(v);
    }
    return v;
}

void put_double(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u = to_big_endian(u);
    out.write(reinterpret_cast<const char*>(&u), 8);
}

void put_int(std::ostream& out, std::int32_t v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u = to_big_endian(u);
    out.write(reinterpret_cast<const char*>(&u), 4);
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::IoError, path + ": " + what);
}

struct VtkFile {
    std::string title;
    bool binary = true;
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin{}, spacing{};
    std::map<std::string, std::vector<double>> arrays;
};

std::string next_line(std::istream& in, const std::string& path) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return line;
    }
    fail(path, "unexpected end of file");
}

VtkFile parse(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    VtkFile f;
    if (next_line(in, path).rfind("# vtk DataFile", 0) != 0) fail(path, "not a legacy VTK file");
    std::getline(in, f.title);
    const std::string enc = next_line(in, path);
    if (enc == "BINARY") f.binary = true;
    else if (enc == "ASCII") f.binary = false;
    else fail(path, "unknown encoding " + enc);
    if (next_line(in, path) != "DATASET STRUCTURED_POINTS") fail(path, "expected STRUCTURED_POINTS");

    std::size_t points = 0;
    for (;;) {
        std::istringstream ls(next_line(in, path));
        std::string key;
        ls >> key;
        if (key == "DIMENSIONS") ls >> f.nx >> f.ny >> f.nz;
        else if (key == "ORIGIN") ls >> f.origin[0] >> f.origin[1] >> f.origin[2];
        else if (key == "SPACING" || key == "ASPECT_RATIO") ls >> f.spacing[0] >> f.spacing[1] >> f.spacing[2];
        else if (key == "POINT_DATA") {
            ls >> points;
            break;
        } else fail(path, "unexpected header keyword " + key);
        if (!ls) fail(path, "malformed " + key + " line");
    }
    if (points != static_cast<std::size_t>(f.nx) * f.ny * f.nz || points == 0) fail(path, "point count mismatch");

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key, name, type;
        int comps = 1;
        ls >> key >> name >> type;
        if (key != "SCALARS") fail(path, "expected SCALARS, got " + key);
        if (ls >> comps && comps != 1) fail(path, "only single-component scalars are supported");
        if (next_line(in, path).rfind("LOOKUP_TABLE", 0) != 0) fail(path, "missing LOOKUP_TABLE");
        std::vector<double> values(points);
        if (f.binary) {
            if (type == "double") {
                for (double& v : values) {
                    std::uint64_t u;
                    in.read(reinterpret_cast<char*>(&u), 8);
                    u = to_big_endian(u);
                    std::memcpy(&v, &u, 8);
                }
            } else if (type == "int") {
                for (double& v : values) {
                    std::uint32_t u;
                    in.read(reinterpret_cast<char*>(&u), 4);
                    u = to_big_endian(u);
                    std::int32_t s;
                    std::memcpy(&s, &u, 4);
                    v = s;
                }
            } else {
                fail(path, "unsupported scalar type " + type);
            }
        } else {
            for (double& v : values) in >> v;
        }
        if (!in) fail(path, "truncated array " + name);
        f.arrays[name] = std::move(values);
    }
    return f;
}

void check_geometry(const VtkFile& f, const Grid& g, const std::string& path) {
    if (f.nx != g.n || f.ny != g.n || f.nz != g.n) fail(path, "dimensions do not match the grid");
    for (int a = 0; a < 3; ++a) {
        const double tol = 1e-12 * std::max(1.0, std::abs(g.h) + std::abs(g.origin[a]));
        if (std::abs(f.origin[a] - g.origin[a]) > tol || std::abs(f.spacing[a] - g.h) > tol)
            fail(path, "origin or spacing does not match the grid");
    }
}

TensorField fill(const VtkFile& f, std::shared_ptr<const Grid> grid, const std::string& path) {
    check_geometry(f, *grid, path);
    TensorField out(grid);
    for (int c = 0; c < 5; ++c) {
        const auto it = f.arrays.find("q" + std::to_string(c));
        if (it == f.arrays.end()) fail(path, "missing array q" + std::to_string(c));
        for (std::size_t i = 0; i < grid->size(); ++i) out[i][c] = it->second[i];
    }
    return out;
}

}  // namespace

std::string encode_domain(const DomainSpec& spec) {
    std::string s = "R=" + fmt(spec.outer_radius) + ";holes=";
    for (std::size_t k = 0; k < spec.holes.size(); ++k) {
        const Hole& h = spec.holes[k];
        if (k) s += '|';
        s += fmt(h.center[0]) + ',' + fmt(h.center[1]) + ',' + fmt(h.center[2]) + ',' + fmt(h.radius);
    }
    return s;
}

DomainSpec decode_domain(const std::string& text) {
    const auto bad = [&]() { return Error(ErrorKind::IoError, "malformed domain record '" + text + "'"); };
    const auto semi = text.find(";holes=");
    if (text.rfind("R=", 0) != 0 || semi == std::string::npos) throw bad();
    DomainSpec spec;
    try {
        std::size_t used = 0;
        spec.outer_radius = std::stod(text.substr(2, semi - 2), &used);
        if (used != semi - 2) throw bad();
        std::string rest = text.substr(semi + 7);
        std::istringstream holes(rest);
        std::string item;
        while (std::getline(holes, item, '|')) {
            std::istringstream hs(item);
            Hole h;
            char c1 = 0, c2 = 0, c3 = 0;
            hs >> h.center[0] >> c1 >> h.center[1] >> c2 >> h.center[2] >> c3 >> h.radius;
            if (!hs || c1 != ',' || c2 != ',' || c3 != ',') throw bad();
            spec.holes.push_back(h);
        }
    } catch (const std::logic_error&) {
        throw bad();
    }
    return spec;
}

void write_field_vtk(const std::string& path, const TensorField& field,
                     const std::map<std::string, std::vector<double>>& extra, VtkEncoding encoding) {
    const Grid& g = *field.grid;
    for (const auto& [name, values] : extra) {
        if (values.size() != g.size()) fail(path, "array " + name + " has the wrong length");
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) fail(path, "bad array name");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const bool binary = encoding == VtkEncoding::Binary;
    out << "# vtk DataFile Version 3.0\n";
    out << kTitleTag << " domain=" << (g.spec ? encode_domain(*g.spec) : std::string("custom")) << '\n';
    out << (binary ? "BINARY" : "ASCII") << '\n';
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.n << ' ' << g.n << ' ' << g.n << '\n';
    out << "ORIGIN " << fmt(g.origin[0]) << ' ' << fmt(g.origin[1]) << ' ' << fmt(g.origin[2]) << '\n';
    out << "SPACING " << fmt(g.h) << ' ' << fmt(g.h) << ' ' << fmt(g.h) << '\n';
    out << "POINT_DATA " << g.size() << '\n';

    const auto doubles = [&](const std::string& name, auto value_at) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        if (binary) {
            for (std::size_t i = 0; i < g.size(); ++i) put_double(out, value_at(i));
        } else {
            out << std::setprecision(17);
            for (std::size_t i = 0; i < g.size(); ++i) out << value_at(i) << '\n';
        }
        out << '\n';
    };
    for (int c = 0; c < 5; ++c) doubles("q" + std::to_string(c), [&](std::size_t i) { return field[i][c]; });
    out << "SCALARS mask int 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = static_cast<std::int32_t>(g.kind[i]);
        if (binary) put_int(out, k);
        else out << k << '\n';
    }
    out << '\n';
    for (const auto& [name, values] : extra) doubles(name, [&](std::size_t i) { return values[i]; });
    if (!out) fail(path, "write failed");
}

TensorField read_field_vtk(const std::string& path) {
    const VtkFile f = parse(path);
    const std::string key = std::string(kTitleTag) + " domain=";
    if (f.title.rfind(key, 0) != 0) fail(path, "title does not record a domain");
    const std::string rec = f.title.substr(key.size());
    if (rec == "custom") fail(path, "custom domains need an explicit grid");
    if (f.nx != f.ny || f.ny != f.nz) fail(path, "grid is not cubic");
    return fill(f, build_grid(decode_domain(rec), f.nx), path);
}

TensorField read_field_vtk(const std::string& path, std::shared_ptr<const Grid> grid) {
    return fill(parse(path), std::move(grid), path);
}

std::vector<double> read_scalar_vtk(const std::string& path, const std::string& name) {
    VtkFile f = parse(path);
    const auto it = f.arrays.find(name);
    if (it == f.arrays.end()) fail(path, "missing array " + name);
    return std::move(it->second);
}

}  // namespace ldg
