#pragma once

#include "bifurc/assembly.hpp"

namespace bifurc {

/// First eigenpair of the pencil A phi = mu B phi. phi1 is strictly positive
/// at every vertex and sup-normalized to 1.
struct SteklovPair {
    double mu1 = 0.0;
    DofVector phi1;
    double residual_norm = 0.0;  ///< relative eigen-residual at acceptance
    int iterations = 0;
};

/// Smallest positive eigenvalue of (A, B) restricted to the range of B,
/// computed by power iteration on A^{-1} B (the largest eigenvalue of that
/// operator is 1/mu1) with a Rayleigh-quotient estimate and relative
/// eigen-residual stopping test ||A phi - mu B phi|| <= tol ||A phi||.
///
/// A must be positive definite, B positive semidefinite with a nontrivial
/// range; B's kernel (interior vertices) never pollutes the iteration since
/// every iterate passes through B.
SteklovPair solve_steklov_first(const DiscreteOperator& A, const DiscreteOperator& B,
                                double tol = 1e-10, int max_iterations = 500);

}  // namespace bifurc
