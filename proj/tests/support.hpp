#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bifurc/assembly.hpp"
#include "bifurc/continuation.hpp"
#include "bifurc/mesh.hpp"
#include "bifurc/nonlinearity.hpp"
#include "bifurc/steklov.hpp"

namespace ts {

// Modified Bessel values frozen from independent series summation (80+ terms,
// 30-digit arithmetic) done before the build; the oracle must reproduce them.
inline constexpr double kI0_half = 1.0634833707413235;
inline constexpr double kI1_half = 0.25789430539089632;
inline constexpr double kI0_1 = 1.2660658777520084;
inline constexpr double kI1_1 = 0.5651591039924850;
inline constexpr double kMu1_1 = 0.4463899658965345;  // I1(1)/I0(1)
inline constexpr double kI0_2 = 2.2795853023360673;
inline constexpr double kI1_2 = 1.5906368546373291;
inline constexpr double kMu1_2 = 0.697774657964008;  // I1(2)/I0(2)
inline constexpr double kI0_30 = 781672297823.97749;
inline constexpr double kI1_30 = 768532038938.957;
inline constexpr double kDiskEnergyI0 = 4.4957991449416758;  // 2*pi*I0(1)*I1(1)

inline bifurc::NonlinearitySpec f_quadratic() { return bifurc::NonlinearitySpec::parse("1*s^1 + 1*s^2"); }
inline bifurc::NonlinearitySpec f_mixed_cubic() {
    return bifurc::NonlinearitySpec::parse("1*s^1 - 1*s^2 + 1*s^3");
}
inline bifurc::NonlinearitySpec f_cubic_gap() { return bifurc::NonlinearitySpec::parse("1*s^1 + 1*s^3"); }
inline bifurc::NonlinearitySpec f_steep() { return bifurc::NonlinearitySpec::parse("2*s^1 + 1*s^2"); }
inline bifurc::NonlinearitySpec f_pow2() { return bifurc::NonlinearitySpec::parse("1*s^2"); }
inline bifurc::NonlinearitySpec f_pow3() { return bifurc::NonlinearitySpec::parse("1*s^3"); }

inline std::vector<bifurc::NonlinearitySpec> corpus_with_kickoff() {
    return {f_quadratic(), f_mixed_cubic(), f_cubic_gap(), f_steep()};
}
inline std::vector<bifurc::NonlinearitySpec> corpus_all() {
    auto c = corpus_with_kickoff();
    c.push_back(f_pow2());
    c.push_back(f_pow3());
    return c;
}

/// Mesh plus assembled operators and the first Steklov pair.
struct DiskContext {
    bifurc::MeshGeometry mesh;
    bifurc::DiscreteOperator A;
    bifurc::DiscreteOperator B;
    bifurc::SteklovPair steklov;
};

inline DiskContext make_disk_context(int level, double radius = 1.0) {
    DiskContext ctx;
    ctx.mesh = bifurc::generate_disk_mesh(radius, level);
    ctx.A = bifurc::assemble_interior_form(ctx.mesh);
    ctx.B = bifurc::assemble_boundary_mass(ctx.mesh);
    ctx.steklov = bifurc::solve_steklov_first(ctx.A, ctx.B, 1e-10);
    return ctx;
}

/// Nodal interpolant of the radial profile with sup-norm t on a disk mesh.
inline bifurc::DofVector radial_interpolant(const bifurc::MeshGeometry& mesh, double t);

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("bifurc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str(const std::string& name = "") const {
        return name.empty() ? path.string() : (path / name).string();
    }
};

}  // namespace ts

#include "bifurc/oracle_radial.hpp"

inline bifurc::DofVector ts::radial_interpolant(const bifurc::MeshGeometry& mesh, double t) {
    bifurc::DofVector u(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
        u[v] = bifurc::oracle::radial_profile(t, std::min(r, mesh.disk_radius), mesh.disk_radius);
    }
    return u;
}
