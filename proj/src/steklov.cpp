#include "bifurc/steklov.hpp"

#include <cmath>
#include <limits>

#include "bifurc/errors.hpp"

namespace bifurc {

SteklovPair solve_steklov_first(const DiscreteOperator& A, const DiscreteOperator& B, double tol,
                                int max_iterations) {
    if (tol <= 0.0) throw PreconditionError("steklov tolerance must be positive");
    if (A.dimension() != B.dimension())
        throw PreconditionError("operator dimensions disagree");
    if (B.matrix.nonZeros() == 0) throw PreconditionError("boundary operator has trivial range");

    SpdSolver solver(A.matrix);  // verifies positive definiteness

    const int n = A.dimension();
    DofVector x = DofVector::Ones(n);
    double mu = 0.0, rel_res = std::numeric_limits<double>::infinity();
    int iters = 0;

    for (iters = 1; iters <= max_iterations; ++iters) {
        DofVector bx = B.matrix * x;
        const double bx_norm = bx.norm();
        if (bx_norm == 0.0) throw PreconditionError("iterate fell into the kernel of B");
        DofVector z = solver.solve(bx);
        z /= z.cwiseAbs().maxCoeff();

        DofVector az = A.matrix * z;
        DofVector bz = B.matrix * z;
        mu = z.dot(az) / z.dot(bz);  // Rayleigh quotient, approaches mu1 from above
        rel_res = (az - mu * bz).norm() / az.norm();
        x = z;
        if (rel_res <= tol) break;
    }
    if (rel_res > tol)
        throw ConvergenceError("steklov power iteration did not converge", rel_res, max_iterations);

    // Sign-fix and sup-normalize the eigenvector.
    int arg_max = 0;
    x.cwiseAbs().maxCoeff(&arg_max);
    if (x[arg_max] < 0.0) x = -x;
    x /= x[arg_max];

    for (int v = 0; v < n; ++v) {
        if (!(x[v] > 0.0))
            throw InvariantViolation("first Steklov eigenfunction is not strictly positive at vertex " +
                                     std::to_string(v));
    }

    SteklovPair pair;
    pair.mu1 = mu;
    pair.phi1 = std::move(x);
    pair.residual_norm = rel_res;
    pair.iterations = iters;
    return pair;
}

}  // namespace bifurc
