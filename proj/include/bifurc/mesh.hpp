#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace bifurc {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class DomainKind { Disk, Rectangle, External };

/// 2-D triangulation with explicit, oriented boundary data.
///
/// Triangles are counter-clockwise. Boundary edges are directed so that the
/// domain lies to the left of i -> j, i.e. they follow the CCW boundary cycle.
/// Instances are immutable after construction and safe to share across threads.
struct MeshGeometry {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> boundary_edges;
    std::vector<int> boundary_vertices;  ///< sorted endpoints of boundary_edges

    DomainKind domain = DomainKind::External;
    double disk_radius = 0.0;
    double rect_width = 0.0;
    double rect_height = 0.0;
    int refinement_level = 0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    /// Per-vertex boundary flag (1 on the boundary cycle, 0 inside).
    std::vector<char> boundary_mask() const;

    /// Short identifier for run metadata, e.g. "disk:r=1:l=4".
    std::string id() const;
};

double triangle_area(const MeshGeometry& mesh, int t);
double total_area(const MeshGeometry& mesh);
double boundary_length(const MeshGeometry& mesh);
double max_edge_length(const MeshGeometry& mesh);

/// Checks every structural invariant; throws InvariantViolation naming the
/// first failed check. All generators and the loader run this before returning.
void validate_mesh(const MeshGeometry& mesh);

/// Regular 16-triangle fan on the disk of the given radius, refined by edge
/// midpoint subdivision with new boundary vertices projected onto the circle.
/// Each refinement level quadruples the triangle count.
MeshGeometry generate_disk_mesh(double radius, int refinement);

/// Structured w x h grid split into 2*nx*ny triangles with 2(nx+ny) boundary edges.
MeshGeometry generate_rectangle_mesh(double w, double h, int nx, int ny);

/// Text format (line-oriented, '#' comments):
///   mesh2d <nv> <nt> <nb>
///   nv lines: v <x> <y>
///   nt lines: t <i> <j> <k>     (0-based, CCW)
///   nb lines: b <i> <j>         (domain lies left of i -> j)
MeshGeometry load_mesh(const std::string& path);
MeshGeometry read_mesh(std::istream& in, const std::string& name);
void save_mesh(const MeshGeometry& mesh, const std::string& path);
void write_mesh(const MeshGeometry& mesh, std::ostream& out);

}  // namespace bifurc
