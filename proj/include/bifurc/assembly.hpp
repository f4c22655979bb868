#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>

#include "bifurc/mesh.hpp"
#include "bifurc/nonlinearity.hpp"

namespace bifurc {

/// Nodal values, one per mesh vertex.
using DofVector = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

enum class OperatorKind { InteriorH1, BoundaryMass, BoundaryWeighted };

/// Sparse symmetric operator assembled from the mesh. Entries are summed in a
/// fixed order with symmetric contributions emitted pairwise, so entry(i,j)
/// and entry(j,i) are bit-identical and repeated assembly is reproducible.
struct DiscreteOperator {
    SparseMat matrix;
    OperatorKind kind = OperatorKind::InteriorH1;
    int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// A[i,j] = int_Omega grad(phi_i).grad(phi_j) + phi_i phi_j over P1 hats;
/// gradients are constant per triangle and the mass block uses the exact
/// three-point rule. Positive definite.
DiscreteOperator assemble_interior_form(const MeshGeometry& mesh);

/// B[i,j] = int_dOmega phi_i phi_j along boundary edges (2-point Gauss,
/// exact here). Positive semidefinite; rows of interior vertices vanish.
DiscreteOperator assemble_boundary_mass(const MeshGeometry& mesh);

/// W[i,j] = int_dOmega weight(u_h) phi_i phi_j with the weight evaluated at
/// the edge quadrature points of the linear interpolant u_h.
DiscreteOperator assemble_boundary_weighted(const MeshGeometry& mesh,
                                            const std::function<double(double)>& weight,
                                            const DofVector& u);

/// Component i = int_dOmega g(u_h) phi_i, with g evaluated at the 2-point
/// Gauss nodes of each boundary edge (not nodally). Depends only on the
/// traced values of u.
DofVector boundary_load(const MeshGeometry& mesh, const std::function<double(double)>& g,
                        const DofVector& u);

/// r = A u - lambda * boundary_load(f(|.|), u). The even extension of f is
/// always applied, so transiently negative Newton iterates stay meaningful.
DofVector residual(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u,
                   double lambda, const NonlinearitySpec& f);

/// J = A - lambda * W(f'(u_h)), the exact derivative of the discrete residual.
DiscreteOperator jacobian(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u,
                          double lambda, const NonlinearitySpec& f);

/// Direct sparse factorization (LU). Used for the Newton and bordered systems,
/// which turn indefinite past folds.
class DirectSolver {
public:
    explicit DirectSolver(const SparseMat& m);
    ~DirectSolver();
    DirectSolver(DirectSolver&&) noexcept;
    DirectSolver& operator=(DirectSolver&&) noexcept;
    DofVector solve(const DofVector& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Cholesky-type factorization for symmetric positive definite operators.
/// Throws PreconditionError if the matrix is not positive definite.
class SpdSolver {
public:
    explicit SpdSolver(const SparseMat& m);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;
    DofVector solve(const DofVector& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bifurc
