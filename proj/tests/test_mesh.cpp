#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "bifurc/errors.hpp"
#include "bifurc/mesh.hpp"
#include "support.hpp"

using namespace bifurc;

TEST_CASE("disk base fan") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 0);
    CHECK(mesh.triangle_count() == 16);
    CHECK(mesh.boundary_edges.size() == 16);
    CHECK(mesh.vertex_count() == 17);
    CHECK(total_area(mesh) < M_PI);  // inscribed polygon
    CHECK(total_area(mesh) > 0.9 * M_PI);
}

TEST_CASE("disk boundary vertices sit on the circle") {
    const MeshGeometry mesh = generate_disk_mesh(2.0, 2);
    for (int v : mesh.boundary_vertices) {
        const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
        CHECK(std::abs(r - 2.0) <= 1e-12);
    }
}

TEST_CASE("disk refinement: area and perimeter converge at second order") {
    std::vector<double> area_err, perim_err, hmax;
    for (int level = 0; level <= 4; ++level) {
        const MeshGeometry mesh = generate_disk_mesh(1.0, level);
        validate_mesh(mesh);  // invariants preserved at every level
        area_err.push_back(M_PI - total_area(mesh));
        perim_err.push_back(2.0 * M_PI - boundary_length(mesh));
        hmax.push_back(max_edge_length(mesh));
        CHECK(mesh.triangle_count() == 16 * (1 << (2 * level)));
    }
    for (size_t k = 0; k + 1 < area_err.size(); ++k) {
        CHECK(area_err[k] > 0.0);
        CHECK(perim_err[k] > 0.0);
        CHECK(hmax[k + 1] < hmax[k]);  // strictly finer
        const double area_ratio = area_err[k] / area_err[k + 1];
        const double perim_ratio = perim_err[k] / perim_err[k + 1];
        CHECK(area_ratio > 3.5);
        CHECK(area_ratio < 4.5);
        CHECK(perim_ratio > 3.5);
        CHECK(perim_ratio < 4.5);
    }
}

TEST_CASE("disk refinement guard") {
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 11), ResourceError);
    CHECK_THROWS_AS(generate_disk_mesh(-1.0, 0), PreconditionError);
}

TEST_CASE("rectangle meshes") {
    const MeshGeometry single = generate_rectangle_mesh(1.0, 1.0, 1, 1);
    CHECK(single.triangle_count() == 2);
    CHECK(single.boundary_edges.size() == 4);
    CHECK(single.vertex_count() == 4);

    const MeshGeometry two = generate_rectangle_mesh(1.0, 1.0, 2, 2);
    CHECK(two.triangle_count() == 8);
    CHECK(two.boundary_edges.size() == 8);

    const MeshGeometry rect = generate_rectangle_mesh(3.0, 2.0, 3, 2);
    CHECK(total_area(rect) == 6.0);  // exact polygonal area
    CHECK(rect.boundary_edges.size() == 2 * (3 + 2));
}

TEST_CASE("save/load round-trips bit-exactly") {
    ts::TempDir tmp;
    const auto path = tmp.str("mesh.txt");

    std::vector<MeshGeometry> meshes;
    meshes.push_back(generate_rectangle_mesh(1.0, 1.0, 1, 1));
    meshes.push_back(generate_rectangle_mesh(0.7331, 1.25, 3, 5));
    meshes.push_back(generate_disk_mesh(1.0, 2));
    meshes.push_back(generate_disk_mesh(2.31, 1));

    for (const MeshGeometry& mesh : meshes) {
        save_mesh(mesh, path);
        const MeshGeometry back = load_mesh(path);
        REQUIRE(back.vertex_count() == mesh.vertex_count());
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            CHECK(back.vertices[v].x == mesh.vertices[v].x);  // bit-exact
            CHECK(back.vertices[v].y == mesh.vertices[v].y);
        }
        CHECK(back.triangles == mesh.triangles);
        CHECK(back.boundary_edges == mesh.boundary_edges);
        CHECK(back.boundary_vertices == mesh.boundary_vertices);
    }
}

namespace {
MeshGeometry load_from_string(const std::string& body) {
    std::istringstream in(body);
    return read_mesh(in, "inline");
}
}  // namespace

TEST_CASE("loader accepts the smallest rectangle mesh") {
    const MeshGeometry mesh = load_from_string(
        "# unit square\n"
        "mesh2d 4 2 4\n"
        "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
        "t 0 1 2\nt 0 2 3\n"
        "b 0 1\nb 1 2\nb 2 3\nb 3 0\n");
    CHECK(mesh.vertex_count() == 4);
    CHECK(mesh.triangle_count() == 2);
}

TEST_CASE("loader rejects a clockwise triangle") {
    try {
        load_from_string(
            "mesh2d 4 2 4\n"
            "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
            "t 0 2 1\nt 0 2 3\n"  // first triangle is CW
            "b 0 1\nb 1 2\nb 2 3\nb 3 0\n");
        FAIL("expected an orientation error");
    } catch (const InvariantViolation& e) {
        CHECK(std::string(e.what()).find("orientation") != std::string::npos);
    }
}

TEST_CASE("loader rejects a dangling boundary edge") {
    try {
        load_from_string(
            "mesh2d 5 2 4\n"
            "v 0 0\nv 1 0\nv 1 1\nv 0 1\nv 2 2\n"
            "t 0 1 2\nt 0 2 3\n"
            "b 0 1\nb 1 2\nb 2 3\nb 3 4\n");  // 3-4 is not a triangle edge
        FAIL("expected a topology error");
    } catch (const InvariantViolation& e) {
        CHECK(std::string(e.what()).find("topology") != std::string::npos);
    }
}

TEST_CASE("loader rejects a boundary edge against its triangle orientation") {
    try {
        load_from_string(
            "mesh2d 4 2 4\n"
            "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
            "t 0 1 2\nt 0 2 3\n"
            "b 1 0\nb 1 2\nb 2 3\nb 3 0\n");  // 1->0 has the domain on its right
        FAIL("expected an orientation error");
    } catch (const InvariantViolation& e) {
        CHECK(std::string(e.what()).find("orientation") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line numbers") {
    try {
        load_from_string("mesh2d 1 0 0\nv 0 zero\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    try {
        load_from_string("triangles 3 1 3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(load_from_string("mesh2d 4 2 4\nv 0 0\n"), ParseError);  // count mismatch
    CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.txt"), ParseError);
}

TEST_CASE("external meshes may be multiply connected") {
    // Square ring: outer cycle CCW, inner cycle CW (domain on the left of both).
    const MeshGeometry ring = load_from_string(
        "mesh2d 8 8 8\n"
        "v 0 0\nv 3 0\nv 3 3\nv 0 3\n"
        "v 1 1\nv 2 1\nv 2 2\nv 1 2\n"
        "t 0 1 5\nt 0 5 4\nt 1 2 6\nt 1 6 5\n"
        "t 2 3 7\nt 2 7 6\nt 3 0 4\nt 3 4 7\n"
        "b 0 1\nb 1 2\nb 2 3\nb 3 0\n"
        "b 5 4\nb 4 7\nb 7 6\nb 6 5\n");
    CHECK(ring.vertex_count() == 8);
    CHECK(total_area(ring) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(boundary_length(ring) == doctest::Approx(16.0).epsilon(1e-14));

    ts::TempDir tmp;
    save_mesh(ring, tmp.str("ring.txt"));
    const MeshGeometry back = load_mesh(tmp.str("ring.txt"));
    CHECK(back.triangles == ring.triangles);
    CHECK(back.boundary_edges == ring.boundary_edges);
}

TEST_CASE("interior edge shared by two triangles is enforced") {
    MeshGeometry mesh = generate_rectangle_mesh(1.0, 1.0, 2, 2);
    mesh.triangles.pop_back();  // leaves an interior edge with one triangle
    CHECK_THROWS_AS(validate_mesh(mesh), InvariantViolation);
}
