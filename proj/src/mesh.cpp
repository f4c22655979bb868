#include "bifurc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

double edge_length(const MeshGeometry& mesh, int a, int b) {
    const double dx = mesh.vertices[b].x - mesh.vertices[a].x;
    const double dy = mesh.vertices[b].y - mesh.vertices[a].y;
    return std::hypot(dx, dy);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<char> MeshGeometry::boundary_mask() const {
    std::vector<char> mask(vertices.size(), 0);
    for (int v : boundary_vertices) mask[v] = 1;
    return mask;
}

std::string MeshGeometry::id() const {
    std::ostringstream os;
    switch (domain) {
        case DomainKind::Disk:
            os << "disk:r=" << disk_radius << ":l=" << refinement_level;
            break;
        case DomainKind::Rectangle:
            os << "rect:" << rect_width << "x" << rect_height;
            break;
        case DomainKind::External:
            os << "external";
            break;
    }
    os << ":nv=" << vertices.size();
    return os.str();
}

double triangle_area(const MeshGeometry& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Point& a = mesh.vertices[tri[0]];
    const Point& b = mesh.vertices[tri[1]];
    const Point& c = mesh.vertices[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double total_area(const MeshGeometry& mesh) {
    double sum = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) sum += triangle_area(mesh, t);
    return sum;
}

double boundary_length(const MeshGeometry& mesh) {
    double sum = 0.0;
    for (const auto& e : mesh.boundary_edges) sum += edge_length(mesh, e[0], e[1]);
    return sum;
}

double max_edge_length(const MeshGeometry& mesh) {
    double longest = 0.0;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            longest = std::max(longest, edge_length(mesh, tri[k], tri[(k + 1) % 3]));
    return longest;
}

void validate_mesh(const MeshGeometry& mesh) {
    const int nv = mesh.vertex_count();
    if (nv < 3) throw InvariantViolation("mesh has fewer than 3 vertices");
    if (mesh.triangles.empty()) throw InvariantViolation("mesh has no triangles");
    if (mesh.boundary_edges.empty()) throw InvariantViolation("mesh has no boundary edges");

    for (int v = 0; v < nv; ++v) {
        if (!std::isfinite(mesh.vertices[v].x) || !std::isfinite(mesh.vertices[v].y))
            throw InvariantViolation("vertex " + std::to_string(v) + " has non-finite coordinates");
    }

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv)
                throw InvariantViolation("triangle " + std::to_string(t) + " references vertex out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw InvariantViolation("triangle " + std::to_string(t) + " repeats a vertex");
        if (triangle_area(mesh, static_cast<int>(t)) <= 0.0)
            throw InvariantViolation("orientation: triangle " + std::to_string(t) +
                                     " has non-positive signed area (must be CCW)");
    }

    // Undirected incidence counts and the set of directed triangle edges.
    std::map<uint64_t, int> incidence;
    std::set<std::pair<int, int>> directed;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            ++incidence[edge_key(a, b)];
            if (!directed.insert({a, b}).second)
                throw InvariantViolation("directed edge " + std::to_string(a) + "->" + std::to_string(b) +
                                         " appears in two triangles (inconsistent orientation)");
        }
    }

    std::set<uint64_t> boundary_set;
    for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const int a = mesh.boundary_edges[e][0], b = mesh.boundary_edges[e][1];
        if (a < 0 || a >= nv || b < 0 || b >= nv)
            throw InvariantViolation("boundary edge " + std::to_string(e) + " references vertex out of range");
        if (a == b) throw InvariantViolation("boundary edge " + std::to_string(e) + " is degenerate");
        if (!boundary_set.insert(edge_key(a, b)).second)
            throw InvariantViolation("boundary edge " + std::to_string(e) + " is listed twice");
        auto it = incidence.find(edge_key(a, b));
        if (it == incidence.end())
            throw InvariantViolation("topology: boundary edge " + std::to_string(a) + "-" + std::to_string(b) +
                                     " is not an edge of any triangle");
        if (it->second != 1)
            throw InvariantViolation("topology: boundary edge " + std::to_string(a) + "-" + std::to_string(b) +
                                     " belongs to " + std::to_string(it->second) + " triangles, expected 1");
        if (!directed.count({a, b}))
            throw InvariantViolation("orientation: boundary edge " + std::to_string(a) + "->" + std::to_string(b) +
                                     " runs against its triangle (domain must lie on the left)");
    }

    for (const auto& [key, count] : incidence) {
        if (boundary_set.count(key)) continue;
        if (count != 2) {
            const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
            throw InvariantViolation("topology: interior edge " + std::to_string(a) + "-" + std::to_string(b) +
                                     " belongs to " + std::to_string(count) + " triangles, expected 2");
        }
    }

    // Boundary vertex set must match the edge endpoints, each of degree 2.
    std::map<int, int> degree;
    for (const auto& e : mesh.boundary_edges) {
        ++degree[e[0]];
        ++degree[e[1]];
    }
    std::vector<int> endpoints;
    endpoints.reserve(degree.size());
    for (const auto& [v, d] : degree) {
        if (d != 2)
            throw InvariantViolation("topology: boundary vertex " + std::to_string(v) + " has " +
                                     std::to_string(d) + " incident boundary edges, expected 2 (open cycle?)");
        endpoints.push_back(v);
    }
    std::vector<int> declared = mesh.boundary_vertices;
    std::sort(declared.begin(), declared.end());
    if (declared != endpoints)
        throw InvariantViolation("boundary_vertices does not equal the set of boundary edge endpoints");
}

MeshGeometry generate_disk_mesh(double radius, int refinement) {
    if (radius <= 0.0) throw PreconditionError("disk radius must be positive");
    if (refinement < 0) throw PreconditionError("refinement must be non-negative");
    if (refinement > 10)
        throw ResourceError("disk refinement " + std::to_string(refinement) + " exceeds the supported maximum 10");

    constexpr int kFan = 16;
    MeshGeometry mesh;
    mesh.domain = DomainKind::Disk;
    mesh.disk_radius = radius;
    mesh.refinement_level = refinement;

    mesh.vertices.push_back({0.0, 0.0});
    for (int j = 0; j < kFan; ++j) {
        const double theta = 2.0 * M_PI * j / kFan;
        mesh.vertices.push_back({radius * std::cos(theta), radius * std::sin(theta)});
    }
    for (int j = 0; j < kFan; ++j) {
        const int a = 1 + j, b = 1 + (j + 1) % kFan;
        mesh.triangles.push_back({0, a, b});
        mesh.boundary_edges.push_back({a, b});
    }

    for (int level = 0; level < refinement; ++level) {
        std::map<uint64_t, int> midpoint;
        std::set<uint64_t> on_boundary;
        for (const auto& e : mesh.boundary_edges) on_boundary.insert(edge_key(e[0], e[1]));

        auto midpoint_of = [&](int a, int b) {
            const uint64_t key = edge_key(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Point m{0.5 * (mesh.vertices[a].x + mesh.vertices[b].x),
                    0.5 * (mesh.vertices[a].y + mesh.vertices[b].y)};
            if (on_boundary.count(key)) {
                const double r = std::hypot(m.x, m.y);
                m.x *= radius / r;
                m.y *= radius / r;
            }
            const int idx = mesh.vertex_count();
            mesh.vertices.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };

        std::vector<std::array<int, 3>> tris;
        tris.reserve(4 * mesh.triangles.size());
        for (const auto& tri : mesh.triangles) {
            const int m01 = midpoint_of(tri[0], tri[1]);
            const int m12 = midpoint_of(tri[1], tri[2]);
            const int m20 = midpoint_of(tri[2], tri[0]);
            tris.push_back({tri[0], m01, m20});
            tris.push_back({tri[1], m12, m01});
            tris.push_back({tri[2], m20, m12});
            tris.push_back({m01, m12, m20});
        }
        mesh.triangles.swap(tris);

        std::vector<std::array<int, 2>> edges;
        edges.reserve(2 * mesh.boundary_edges.size());
        for (const auto& e : mesh.boundary_edges) {
            const int m = midpoint.at(edge_key(e[0], e[1]));
            edges.push_back({e[0], m});
            edges.push_back({m, e[1]});
        }
        mesh.boundary_edges.swap(edges);
    }

    std::set<int> bverts;
    for (const auto& e : mesh.boundary_edges) {
        bverts.insert(e[0]);
        bverts.insert(e[1]);
    }
    mesh.boundary_vertices.assign(bverts.begin(), bverts.end());

    validate_mesh(mesh);
    return mesh;
}

MeshGeometry generate_rectangle_mesh(double w, double h, int nx, int ny) {
    if (w <= 0.0 || h <= 0.0) throw PreconditionError("rectangle sides must be positive");
    if (nx < 1 || ny < 1) throw PreconditionError("rectangle subdivisions must be positive");

    MeshGeometry mesh;
    mesh.domain = DomainKind::Rectangle;
    mesh.rect_width = w;
    mesh.rect_height = h;

    const int npx = nx + 1;
    auto vid = [npx](int i, int j) { return j * npx + i; };

    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back({w * i / nx, h * j / ny});

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }

    // CCW boundary cycle: bottom, right, top, left.
    for (int i = 0; i < nx; ++i) mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0)});
    for (int j = 0; j < ny; ++j) mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1)});
    for (int i = nx; i > 0; --i) mesh.boundary_edges.push_back({vid(i, ny), vid(i - 1, ny)});
    for (int j = ny; j > 0; --j) mesh.boundary_edges.push_back({vid(0, j), vid(0, j - 1)});

    std::set<int> bverts;
    for (const auto& e : mesh.boundary_edges) {
        bverts.insert(e[0]);
        bverts.insert(e[1]);
    }
    mesh.boundary_vertices.assign(bverts.begin(), bverts.end());

    validate_mesh(mesh);
    return mesh;
}

MeshGeometry read_mesh(std::istream& in, const std::string& name) {
    MeshGeometry mesh;
    mesh.domain = DomainKind::External;

    long line_no = 0;
    long nv = -1, nt = -1, nb = -1;
    long seen_v = 0, seen_t = 0, seen_b = 0;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;  // blank or comment-only line

        if (nv < 0) {
            if (tag != "mesh2d") throw ParseError(name + ": expected 'mesh2d <nv> <nt> <nb>' header", line_no);
            if (!(ls >> nv >> nt >> nb) || nv < 0 || nt < 0 || nb < 0)
                throw ParseError(name + ": malformed mesh2d header", line_no);
            continue;
        }

        if (tag == "v") {
            if (seen_v >= nv) throw ParseError(name + ": more vertex lines than declared", line_no);
            if (seen_t > 0 || seen_b > 0) throw ParseError(name + ": vertex line after triangles/edges", line_no);
            Point p;
            if (!(ls >> p.x >> p.y)) throw ParseError(name + ": malformed vertex line", line_no);
            mesh.vertices.push_back(p);
            ++seen_v;
        } else if (tag == "t") {
            if (seen_v != nv) throw ParseError(name + ": triangle line before all vertices", line_no);
            if (seen_t >= nt) throw ParseError(name + ": more triangle lines than declared", line_no);
            if (seen_b > 0) throw ParseError(name + ": triangle line after boundary edges", line_no);
            std::array<int, 3> tri;
            if (!(ls >> tri[0] >> tri[1] >> tri[2])) throw ParseError(name + ": malformed triangle line", line_no);
            mesh.triangles.push_back(tri);
            ++seen_t;
        } else if (tag == "b") {
            if (seen_t != nt) throw ParseError(name + ": boundary line before all triangles", line_no);
            if (seen_b >= nb) throw ParseError(name + ": more boundary lines than declared", line_no);
            std::array<int, 2> e;
            if (!(ls >> e[0] >> e[1])) throw ParseError(name + ": malformed boundary edge line", line_no);
            mesh.boundary_edges.push_back(e);
            ++seen_b;
        } else {
            throw ParseError(name + ": unknown record '" + tag + "'", line_no);
        }

        std::string extra;
        if (ls >> extra) throw ParseError(name + ": trailing tokens on line", line_no);
    }

    if (nv < 0) throw ParseError(name + ": empty file, missing mesh2d header", line_no);
    if (seen_v != nv || seen_t != nt || seen_b != nb)
        throw ParseError(name + ": record counts do not match header (" + std::to_string(seen_v) + "/" +
                             std::to_string(nv) + " v, " + std::to_string(seen_t) + "/" + std::to_string(nt) +
                             " t, " + std::to_string(seen_b) + "/" + std::to_string(nb) + " b)",
                         line_no);

    std::set<int> bverts;
    for (const auto& e : mesh.boundary_edges) {
        bverts.insert(e[0]);
        bverts.insert(e[1]);
    }
    mesh.boundary_vertices.assign(bverts.begin(), bverts.end());

    validate_mesh(mesh);
    return mesh;
}

MeshGeometry load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file '" + path + "'");
    return read_mesh(in, path);
}

void write_mesh(const MeshGeometry& mesh, std::ostream& out) {
    out << "mesh2d " << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' '
        << mesh.boundary_edges.size() << '\n';
    for (const auto& p : mesh.vertices) out << "v " << fmt_double(p.x) << ' ' << fmt_double(p.y) << '\n';
    for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges) out << "b " << e[0] << ' ' << e[1] << '\n';
}

void save_mesh(const MeshGeometry& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_mesh(mesh, out);
    if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace bifurc
