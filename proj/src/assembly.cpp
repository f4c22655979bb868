#include "bifurc/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

// 2-point Gauss on [0,1]: exact for cubics, so the P1 x P1 edge products
// below are integrated exactly.
constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2*sqrt(3))
const double kGaussXi[2] = {0.5 - kGaussOffset, 0.5 + kGaussOffset};
const double kGaussW[2] = {0.5, 0.5};

void check_dof_size(const MeshGeometry& mesh, const DofVector& u, const char* what) {
    if (u.size() != mesh.vertex_count())
        throw PreconditionError(std::string(what) + ": vector length " + std::to_string(u.size()) +
                                " does not match vertex count " + std::to_string(mesh.vertex_count()));
}

double edge_len(const MeshGeometry& mesh, int a, int b) {
    return std::hypot(mesh.vertices[b].x - mesh.vertices[a].x, mesh.vertices[b].y - mesh.vertices[a].y);
}

/// Emit a symmetric pair (or a diagonal entry once) so the triplet list is
/// symmetric as a multiset and setFromTriplets produces exact symmetry.
void push_sym(std::vector<Eigen::Triplet<double>>& trip, int i, int j, double v) {
    trip.emplace_back(i, j, v);
    if (i != j) trip.emplace_back(j, i, v);
}

DiscreteOperator assemble_edge_weighted(const MeshGeometry& mesh,
                                        const std::function<double(double)>& weight,
                                        const DofVector* u, OperatorKind kind) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(8 * mesh.boundary_edges.size());

    for (const auto& e : mesh.boundary_edges) {
        const int a = e[0], b = e[1];
        const double len = edge_len(mesh, a, b);
        double m_aa = 0.0, m_ab = 0.0, m_bb = 0.0;
        for (int q = 0; q < 2; ++q) {
            const double xi = kGaussXi[q];
            const double pa = 1.0 - xi, pb = xi;
            double w = 1.0;
            if (weight) {
                const double uq = (*u)[a] * pa + (*u)[b] * pb;
                w = weight(uq);
                if (!std::isfinite(w)) throw EvaluationError("boundary weight evaluation failed", uq);
            }
            const double scale = kGaussW[q] * len * w;
            m_aa += scale * pa * pa;
            m_ab += scale * pa * pb;
            m_bb += scale * pb * pb;
        }
        push_sym(trip, a, a, m_aa);
        push_sym(trip, a, b, m_ab);
        push_sym(trip, b, b, m_bb);
    }

    DiscreteOperator op;
    op.kind = kind;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    return op;
}

}  // namespace

DiscreteOperator assemble_interior_form(const MeshGeometry& mesh) {
    const int n = mesh.vertex_count();
    const int nt = mesh.triangle_count();
    if (nt == 0) throw PreconditionError("mesh has no triangles");

    double mean_area = 0.0;
    for (int t = 0; t < nt; ++t) mean_area += triangle_area(mesh, t);
    mean_area /= nt;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(12 * nt);

    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = triangle_area(mesh, t);
        if (area < 1e-14 * mean_area)
            throw AssemblyError("degenerate triangle " + std::to_string(t) + " (area " +
                                std::to_string(area) + ")");

        const Point& p0 = mesh.vertices[tri[0]];
        const Point& p1 = mesh.vertices[tri[1]];
        const Point& p2 = mesh.vertices[tri[2]];
        // Constant hat gradients: grad(phi_i) = (perpendicular opposite edge) / (2 area).
        const double gx[3] = {(p1.y - p2.y) / (2 * area), (p2.y - p0.y) / (2 * area),
                              (p0.y - p1.y) / (2 * area)};
        const double gy[3] = {(p2.x - p1.x) / (2 * area), (p0.x - p2.x) / (2 * area),
                              (p1.x - p0.x) / (2 * area)};

        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                const double stiff = area * (gx[i] * gx[j] + gy[i] * gy[j]);
                const double mass = area / 12.0 * (i == j ? 2.0 : 1.0);
                push_sym(trip, tri[i], tri[j], stiff + mass);
            }
        }
    }

    DiscreteOperator op;
    op.kind = OperatorKind::InteriorH1;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    return op;
}

DiscreteOperator assemble_boundary_mass(const MeshGeometry& mesh) {
    return assemble_edge_weighted(mesh, nullptr, nullptr, OperatorKind::BoundaryMass);
}

DiscreteOperator assemble_boundary_weighted(const MeshGeometry& mesh,
                                            const std::function<double(double)>& weight,
                                            const DofVector& u) {
    check_dof_size(mesh, u, "assemble_boundary_weighted");
    if (!weight) throw PreconditionError("assemble_boundary_weighted: missing weight function");
    return assemble_edge_weighted(mesh, weight, &u, OperatorKind::BoundaryWeighted);
}

DofVector boundary_load(const MeshGeometry& mesh, const std::function<double(double)>& g,
                        const DofVector& u) {
    check_dof_size(mesh, u, "boundary_load");
    if (!g) throw PreconditionError("boundary_load: missing integrand");

    DofVector load = DofVector::Zero(mesh.vertex_count());
    for (const auto& e : mesh.boundary_edges) {
        const int a = e[0], b = e[1];
        const double len = edge_len(mesh, a, b);
        for (int q = 0; q < 2; ++q) {
            const double xi = kGaussXi[q];
            const double pa = 1.0 - xi, pb = xi;
            const double uq = u[a] * pa + u[b] * pb;
            const double gq = g(uq);
            if (!std::isfinite(gq)) throw EvaluationError("boundary integrand evaluation failed", uq);
            const double scale = kGaussW[q] * len * gq;
            load[a] += scale * pa;
            load[b] += scale * pb;
        }
    }
    return load;
}

DofVector residual(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u,
                   double lambda, const NonlinearitySpec& f) {
    if (lambda < 0.0) throw PreconditionError("residual needs lambda >= 0");
    check_dof_size(mesh, u, "residual");
    DofVector r = A.matrix * u;
    if (lambda != 0.0)
        r -= lambda * boundary_load(mesh, [&f](double s) { return f.eval(s); }, u);
    return r;
}

DiscreteOperator jacobian(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u,
                          double lambda, const NonlinearitySpec& f) {
    if (lambda < 0.0) throw PreconditionError("jacobian needs lambda >= 0");
    check_dof_size(mesh, u, "jacobian");
    DiscreteOperator J;
    J.kind = OperatorKind::InteriorH1;
    if (lambda == 0.0) {
        J.matrix = A.matrix;
        return J;
    }
    DiscreteOperator W =
        assemble_boundary_weighted(mesh, [&f](double s) { return f.eval_prime(s); }, u);
    J.matrix = A.matrix - lambda * W.matrix;
    return J;
}

struct DirectSolver::Impl {
    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
};

DirectSolver::DirectSolver(const SparseMat& m) : impl_(std::make_unique<Impl>()) {
    SparseMat compressed = m;
    compressed.makeCompressed();
    impl_->lu.compute(compressed);
    if (impl_->lu.info() != Eigen::Success)
        throw Error("sparse LU factorization failed (singular system?)");
}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

DofVector DirectSolver::solve(const DofVector& rhs) const {
    DofVector x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw Error("sparse LU solve failed");
    return x;
}

struct SpdSolver::Impl {
    Eigen::SimplicialLDLT<SparseMat> ldlt;
};

SpdSolver::SpdSolver(const SparseMat& m) : impl_(std::make_unique<Impl>()) {
    impl_->ldlt.compute(m);
    if (impl_->ldlt.info() != Eigen::Success)
        throw PreconditionError("LDLT factorization failed (matrix not positive definite?)");
    if ((impl_->ldlt.vectorD().array() <= 0.0).any())
        throw PreconditionError("matrix is not positive definite");
}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

DofVector SpdSolver::solve(const DofVector& rhs) const {
    DofVector x = impl_->ldlt.solve(rhs);
    if (impl_->ldlt.info() != Eigen::Success) throw Error("LDLT solve failed");
    return x;
}

}  // namespace bifurc
