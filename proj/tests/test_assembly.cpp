#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bifurc/assembly.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/oracle_radial.hpp"
#include "support.hpp"

using namespace bifurc;

namespace {

DofVector random_vector(int n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    DofVector v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

double exact_asymmetry(const SparseMat& m) {
    const SparseMat diff = SparseMat(m.transpose()) - m;
    return diff.norm();
}

// Independent route to the H1 energy of the radial mode: composite Simpson
// of 2 pi r (I0'(r)^2 + I0(r)^2) with I0' = I1.
double disk_energy_by_quadrature() {
    const int n = 400;  // even
    const double h = 1.0 / n;
    auto integrand = [](double r) {
        const double i0 = oracle::bessel_I(0, r);
        const double i1 = oracle::bessel_I(1, r);
        return 2.0 * M_PI * r * (i1 * i1 + i0 * i0);
    };
    double sum = integrand(0.0) + integrand(1.0);
    for (int i = 1; i < n; ++i) sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("interior form on the unit square: constants see only the mass") {
    const MeshGeometry mesh = generate_rectangle_mesh(1.0, 1.0, 1, 1);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DofVector ones = DofVector::Ones(mesh.vertex_count());
    CHECK(ones.dot(A.matrix * ones) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("interior form is coercive") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 2);
    const DiscreteOperator A = assemble_interior_form(mesh);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const DofVector v = random_vector(mesh.vertex_count(), rng, -1.0, 1.0);
        CHECK(v.dot(A.matrix * v) > 0.0);
    }
}

TEST_CASE("energy of the radial mode converges to the closed form") {
    // Two independent routes to the same number: the frozen constant
    // 2 pi I0(1) I1(1) and 1-D quadrature of the energy density.
    CHECK(disk_energy_by_quadrature() == doctest::Approx(ts::kDiskEnergyI0).epsilon(1e-9));

    std::vector<double> err;
    for (int level = 1; level <= 4; ++level) {
        const MeshGeometry mesh = generate_disk_mesh(1.0, level);
        const DiscreteOperator A = assemble_interior_form(mesh);
        // amplitude I0(1) makes the interpolated profile exactly I0(r)
        const DofVector u = ts::radial_interpolant(mesh, ts::kI0_1);
        err.push_back(std::abs(u.dot(A.matrix * u) - ts::kDiskEnergyI0));
    }
    for (size_t k = 0; k + 1 < err.size(); ++k) CHECK(err[k + 1] < err[k]);
    CHECK(err.back() < 2e-3 * ts::kDiskEnergyI0);
    const double last_ratio = err[err.size() - 2] / err.back();
    CHECK(last_ratio > 3.0);
    CHECK(last_ratio < 5.0);
}

TEST_CASE("boundary mass: partition of unity and interior rows") {
    const MeshGeometry mesh = generate_rectangle_mesh(1.0, 1.0, 1, 1);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    CHECK(B.matrix.sum() == doctest::Approx(4.0).epsilon(1e-14));  // perimeter

    // Row sums are half the total length of the incident boundary edges.
    const MeshGeometry fine = generate_rectangle_mesh(2.0, 1.0, 4, 3);
    const DiscreteOperator Bf = assemble_boundary_mass(fine);
    std::vector<double> incident(fine.vertex_count(), 0.0);
    for (const auto& e : fine.boundary_edges) {
        const double len = std::hypot(fine.vertices[e[1]].x - fine.vertices[e[0]].x,
                                      fine.vertices[e[1]].y - fine.vertices[e[0]].y);
        incident[e[0]] += 0.5 * len;
        incident[e[1]] += 0.5 * len;
    }
    const DofVector row_sums = Bf.matrix * DofVector::Ones(fine.vertex_count());
    for (int v = 0; v < fine.vertex_count(); ++v)
        CHECK(row_sums[v] == doctest::Approx(incident[v]).epsilon(1e-13));

    // Interior vertices have identically zero rows.
    const auto mask = fine.boundary_mask();
    for (int v = 0; v < fine.vertex_count(); ++v)
        if (!mask[v]) CHECK(row_sums[v] == 0.0);

    // Vectors supported in the interior lie in the kernel of B exactly.
    std::mt19937_64 rng(11);
    DofVector interior = random_vector(fine.vertex_count(), rng, -2.0, 2.0);
    for (int v = 0; v < fine.vertex_count(); ++v)
        if (mask[v]) interior[v] = 0.0;
    CHECK((Bf.matrix * interior).norm() == 0.0);
}

TEST_CASE("boundary mass total equals the polygonal perimeter on disks") {
    for (int level : {1, 2, 3}) {
        const MeshGeometry mesh = generate_disk_mesh(1.0, level);
        const DiscreteOperator B = assemble_boundary_mass(mesh);
        CHECK(B.matrix.sum() == doctest::Approx(boundary_length(mesh)).epsilon(1e-13));
    }
}

TEST_CASE("boundary load: quadrature identities") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 2);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const int n = mesh.vertex_count();
    std::mt19937_64 rng(17);
    const DofVector u = random_vector(n, rng, -1.5, 2.0);

    const DofVector load_one = boundary_load(mesh, [](double) { return 1.0; }, u);
    const DofVector b_ones = B.matrix * DofVector::Ones(n);
    for (int v = 0; v < n; ++v) CHECK(load_one[v] == doctest::Approx(b_ones[v]).epsilon(1e-14));

    // g(s) = s reproduces B u exactly (2-point Gauss is exact for cubics).
    const DofVector load_lin = boundary_load(mesh, [](double s) { return s; }, u);
    const DofVector bu = B.matrix * u;
    for (int v = 0; v < n; ++v)
        CHECK(load_lin[v] == doctest::Approx(bu[v]).epsilon(1e-14).scale(1.0));

    // g(s) = s^2 on a constant trace is a constant rescaling.
    const double c = 1.7;
    const DofVector load_sq = boundary_load(mesh, [](double s) { return s * s; },
                                            DofVector::Constant(n, c));
    for (int v = 0; v < n; ++v)
        CHECK(load_sq[v] == doctest::Approx(c * c * load_one[v]).epsilon(1e-13).scale(1e-12));
}

TEST_CASE("boundary load integrates at quadrature points, not nodally") {
    // u rises 0 -> 1 along the bottom edge of the unit square; with g(s) = s^2
    // the exact contribution to vertex 0 is int_0^1 xi^2 (1 - xi) dxi = 1/12.
    // Nodal evaluation would give 1/6.
    const MeshGeometry mesh = generate_rectangle_mesh(1.0, 1.0, 1, 1);
    DofVector u = DofVector::Zero(4);
    u[1] = 1.0;
    const DofVector load = boundary_load(mesh, [](double s) { return s * s; }, u);
    CHECK(load[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("boundary load reports evaluation failures with the offending value") {
    const MeshGeometry mesh = generate_rectangle_mesh(1.0, 1.0, 1, 1);
    const DofVector u = DofVector::Constant(mesh.vertex_count(), -2.0);
    try {
        boundary_load(mesh, [](double s) { return std::sqrt(s); }, u);  // sqrt of a negative trace
        FAIL("expected an evaluation error");
    } catch (const EvaluationError& e) {
        CHECK(e.value == doctest::Approx(-2.0));
    }
}

TEST_CASE("boundary load ignores interior values exactly") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 2);
    std::mt19937_64 rng(23);
    const DofVector u = random_vector(mesh.vertex_count(), rng, 0.1, 2.0);
    DofVector u2 = u;
    const auto mask = mesh.boundary_mask();
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (!mask[v]) u2[v] += 17.0 * (1 + v % 3);

    auto g = [](double s) { return 1.0 + s * s * s; };
    const DofVector a = boundary_load(mesh, g, u);
    const DofVector b = boundary_load(mesh, g, u2);
    for (int v = 0; v < mesh.vertex_count(); ++v) CHECK(a[v] == b[v]);  // bitwise
}

TEST_CASE("residual: trivial solution and decoupled lambda") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 1);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const NonlinearitySpec f = ts::f_quadratic();
    const int n = mesh.vertex_count();

    CHECK(residual(A, mesh, DofVector::Zero(n), 0.7, f).norm() == 0.0);

    std::mt19937_64 rng(3);
    const DofVector u = random_vector(n, rng, -1.0, 1.0);
    CHECK((residual(A, mesh, u, 0.0, f) - A.matrix * u).norm() == 0.0);
}

TEST_CASE("residual of the interpolated radial solution vanishes at second order") {
    const struct {
        NonlinearitySpec f;
        double t;
    } cases[] = {{ts::f_quadratic(), 0.5},
                 {ts::f_mixed_cubic(), 0.7},
                 {ts::f_pow2(), 1.0},
                 {ts::f_cubic_gap(), 0.4},
                 {ts::f_steep(), 0.8}};
    for (const auto& c : cases) {
        const double lambda = ts::kMu1_1 * c.t / c.f.eval(c.t);
        std::vector<double> err;
        for (int level = 2; level <= 4; ++level) {
            const MeshGeometry mesh = generate_disk_mesh(1.0, level);
            const DiscreteOperator A = assemble_interior_form(mesh);
            const DofVector u = ts::radial_interpolant(mesh, c.t);
            err.push_back(residual(A, mesh, u, lambda, c.f).cwiseAbs().maxCoeff());
        }
        for (size_t k = 0; k + 1 < err.size(); ++k) {
            CHECK(err[k + 1] < err[k]);
            const double order = std::log2(err[k] / err[k + 1]);
            CHECK(order >= 1.7);
        }
    }
}

TEST_CASE("residual homogeneity for pure powers") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 2);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const NonlinearitySpec f = NonlinearitySpec::parse("2*s^3");
    const double p = 3.0, lambda = 0.31;
    std::mt19937_64 rng(29);
    const DofVector u = random_vector(mesh.vertex_count(), rng, 0.2, 1.5);
    const DofVector base = residual(A, mesh, u, lambda, f);
    for (double c : {2.0, 0.3, 10.0}) {
        const DofVector scaled =
            residual(A, mesh, DofVector(c * u), lambda * std::pow(c, 1.0 - p), f);
        const double scale = base.cwiseAbs().maxCoeff();
        for (int v = 0; v < mesh.vertex_count(); ++v)
            CHECK(scaled[v] == doctest::Approx(c * base[v]).epsilon(1e-12).scale(c * scale));
    }
}

TEST_CASE("jacobian at the trivial solution is the eigen pencil") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 2);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const NonlinearitySpec f = ts::f_steep();  // f'(0) = 2
    const double lambda = 0.4;

    const DiscreteOperator J = jacobian(A, mesh, DofVector::Zero(mesh.vertex_count()), lambda, f);
    const SparseMat expected = A.matrix - (lambda * f.slope_at_zero()) * B.matrix;
    CHECK((J.matrix - expected).norm() <= 1e-13 * expected.norm());

    const DiscreteOperator J0 = jacobian(A, mesh, DofVector::Zero(mesh.vertex_count()), 0.0, f);
    CHECK((J0.matrix - A.matrix).norm() == 0.0);
}

TEST_CASE("jacobian agrees with finite differences across the corpus") {
    const MeshGeometry disk = generate_disk_mesh(1.0, 2);
    const MeshGeometry rect = generate_rectangle_mesh(1.3, 0.8, 3, 3);
    std::mt19937_64 rng(31);
    for (const MeshGeometry* mesh : {&disk, &rect}) {
        const DiscreteOperator A = assemble_interior_form(*mesh);
        const int n = mesh->vertex_count();
        for (const NonlinearitySpec& f : ts::corpus_all()) {
            for (int k = 0; k < 20; ++k) {
                const double lambda = 0.05 + 0.5 * (k % 7) / 7.0;
                // states bounded away from the even-extension kink at 0
                DofVector u = random_vector(n, rng, 0.1, 2.0);
                if (k % 4 == 3) u = -u;
                const DofVector v = random_vector(n, rng, -1.0, 1.0);
                const double eps = 1e-6;

                const DiscreteOperator J = jacobian(A, *mesh, u, lambda, f);
                const DofVector jv = J.matrix * v;
                const DofVector fd = (residual(A, *mesh, DofVector(u + eps * v), lambda, f) -
                                      residual(A, *mesh, u, lambda, f)) /
                                     eps;
                CHECK((fd - jv).norm() <= 1e-5 * jv.norm());
            }
        }
    }
}

TEST_CASE("assembled operators are exactly symmetric") {
    const MeshGeometry disk = generate_disk_mesh(1.0, 3);
    const MeshGeometry rect = generate_rectangle_mesh(2.0, 1.0, 5, 3);
    std::mt19937_64 rng(37);
    for (const MeshGeometry* mesh : {&disk, &rect}) {
        const DiscreteOperator A = assemble_interior_form(*mesh);
        const DiscreteOperator B = assemble_boundary_mass(*mesh);
        CHECK(exact_asymmetry(A.matrix) == 0.0);
        CHECK(exact_asymmetry(B.matrix) == 0.0);
        const DofVector u = random_vector(mesh->vertex_count(), rng, 0.2, 1.0);
        const NonlinearitySpec f = ts::f_mixed_cubic();
        const DiscreteOperator W =
            assemble_boundary_weighted(*mesh, [&f](double s) { return f.eval_prime(s); }, u);
        CHECK(exact_asymmetry(W.matrix) == 0.0);
    }
}

TEST_CASE("degenerate triangles are an assembly error") {
    MeshGeometry mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {1 + 1e-18, 1}};
    mesh.triangles = {{0, 1, 2}, {1, 3, 2}};
    mesh.boundary_edges = {{0, 1}, {1, 3}, {3, 2}, {2, 0}};
    mesh.boundary_vertices = {0, 1, 2, 3};
    CHECK_THROWS_AS(assemble_interior_form(mesh), AssemblyError);
}

TEST_CASE("direct solvers meet the backward-error contract") {
    std::mt19937_64 rng(41);
    for (int level : {3, 5}) {  // up to ~8e3 dofs here; the contract covers 1e5
        const MeshGeometry mesh = generate_disk_mesh(1.0, level);
        const DiscreteOperator A = assemble_interior_form(mesh);
        const DofVector b = random_vector(mesh.vertex_count(), rng, -1.0, 1.0);

        const DofVector x_lu = DirectSolver(A.matrix).solve(b);
        CHECK((A.matrix * x_lu - b).norm() <= 1e-12 * b.norm());
        const DofVector x_ldlt = SpdSolver(A.matrix).solve(b);
        CHECK((A.matrix * x_ldlt - b).norm() <= 1e-12 * b.norm());
    }
}

TEST_CASE("SPD solver rejects indefinite and semidefinite operators") {
    const MeshGeometry mesh = generate_disk_mesh(1.0, 1);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const SparseMat negA = -A.matrix;
    CHECK_THROWS_AS(SpdSolver{negA}, PreconditionError);
    CHECK_THROWS_AS(SpdSolver{B.matrix}, PreconditionError);
}
