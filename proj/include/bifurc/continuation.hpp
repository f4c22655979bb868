#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bifurc/assembly.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/mesh.hpp"
#include "bifurc/nonlinearity.hpp"
#include "bifurc/steklov.hpp"

namespace bifurc {

/// One accepted continuation state.
///
/// `state` holds the nodal solution; past the norm switch it holds the
/// bounded variable w = lambda^{1/(p-1)} u instead (rescaled = true).
/// sup_norm and h1_norm always refer to the physical solution u, recovered
/// through the same scaling when the point is stored rescaled.
struct BranchPoint {
    double lambda = 0.0;
    DofVector state;
    double sup_norm = 0.0;
    double h1_norm = 0.0;
    double arclength = 0.0;
    int newton_iters = 0;
    bool positive = false;
    bool rescaled = false;
};

enum class Direction { Subcritical, Supercritical, Inconclusive };

std::string to_string(Direction d);

struct Fold {
    int index;          ///< branch point at the discrete lambda extremum
    double lambda_bar;  ///< extremum refined by quadratic interpolation
};

/// Traced branch with its classification metadata.
struct Diagram {
    std::vector<BranchPoint> points;
    std::vector<Fold> folds;
    double lambda_star_measured = 0.0;   ///< lambda of the first accepted point
    double lambda_star_predicted = 0.0;  ///< mu1/f'(0) on this mesh (NaN if f'(0)=0)
    Direction direction = Direction::Inconclusive;
    bool direction_consistent = true;
    double nonexistence_bound = 0.0;  ///< mu1/K; +inf when the linear lower bound fails
    double mu1 = 0.0;                 ///< discrete Steklov value used for predictions
    double max_rescaled_sup = 0.0;    ///< bound monitor for the rescaled tail
    std::string mesh_id;
    std::string f_text;
    std::string stop_reason;
    double newton_tol = 0.0;
};

struct ContinuationOptions {
    double newton_tol = 1e-10;
    int newton_max_iters = 25;
    double kickoff_amplitude = 1e-3;  ///< epsilon for branch_from_trivial
    double step_min = 1e-5;           ///< normalized arclength bounds
    double step_max = 0.2;
    double step_grow = 1.3;
    double lambda_min = -1.0;  ///< stop threshold; < 0 selects 1e-3 * mu1/f'(0)
    double norm_max = 1e4;
    double switch_threshold = 50.0;        ///< sup-norm that triggers the rescaled variable
    double lambda_step_fraction = 0.25;    ///< cap |d lambda| per step at this fraction of lambda
    double seed_growth = 2.0;              ///< amplitude factor for the second (secant) point
    int max_steps = 20000;
};

/// Corrector failure that exhausted its retry budget; carries what was traced.
struct BranchError : Error {
    BranchError(const std::string& what, Diagram partial_diagram)
        : Error(what), partial(std::move(partial_diagram)) {}
    Diagram partial;
};

/// Plain Newton at fixed lambda with residual-halving line search (at most 8
/// halvings per step). Converged when ||r|| <= tol (1 + ||A u||).
/// Throws ConvergenceError with the last residual norm on failure.
DofVector newton_solve(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u0,
                       double lambda, const NonlinearitySpec& f, double tol, int max_iters = 25);

/// First nontrivial point near the trivial-branch bifurcation: predictor
/// (mu1/f'(0), eps * phi1) corrected on the system augmented with the
/// amplitude constraint u(argmax phi1) = eps.
BranchPoint branch_from_trivial(const DiscreteOperator& A, const MeshGeometry& mesh,
                                const NonlinearitySpec& f, const SteklovPair& steklov, double eps,
                                const ContinuationOptions& opts = {});

/// Converge u0 at fixed lambda and wrap the result as a branch start.
BranchPoint branch_from_state(const DiscreteOperator& A, const MeshGeometry& mesh,
                              const NonlinearitySpec& f, const DofVector& u0, double lambda,
                              const ContinuationOptions& opts = {});

/// Pseudo-arclength continuation with a secant predictor and bordered Newton
/// corrector. The arclength metric weights lambda and the RMS nodal increment
/// equally. Steps halve on corrector failure, grow by step_grow after fast
/// convergence, and stay within [step_min, step_max]. The trace switches to
/// the rescaled variable once the sup-norm passes switch_threshold and stops
/// at lambda_min, norm_max, step underflow, or max_steps.
Diagram continue_branch(const DiscreteOperator& A, const MeshGeometry& mesh,
                        const NonlinearitySpec& f, const SteklovPair& steklov,
                        const BranchPoint& start, const ContinuationOptions& opts = {});

/// Positive solution of the pure-power limit: A w = load(b |w|^p). With no
/// initial guess the radial profile t* I0(r)/I0(R), t* = (mu1/b)^{1/(p-1)},
/// is interpolated onto the mesh. Convergence to the trivial solution is an
/// error: the limit state is nontrivial.
DofVector solve_limiting(const MeshGeometry& mesh, double b, double p,
                         const DofVector* w_init = nullptr, double tol = 1e-10,
                         int max_iters = 50);

/// Indices where the lambda increment changes sign, each with the extremum
/// refined by a quadratic through the three surrounding (arclength, lambda)
/// samples.
std::vector<Fold> detect_folds(const Diagram& diagram);

/// Analytic verdict from the sign of the remainder coefficient, checked
/// against the numeric side of (lambda_i - mu1/f'(0)) on the small-norm
/// points. Returns the analytic verdict; *consistent reports agreement.
Direction classify_direction(const NonlinearitySpec& f, const HypothesisReport& report,
                             const Diagram& diagram, bool* consistent = nullptr);

/// Limit of (mu1/f'(0) - lambda) / ||u||^{nu-1} along the branch.
struct AsymptoteEstimate {
    double numeric = 0.0;   ///< Richardson extrapolation over the small-norm points
    double analytic = 0.0;  ///< R0 * mu1/f'(0)^2 * int phi1^{1+nu} / int phi1^2
    int points_used = 0;
};

AsymptoteEstimate bifurcation_asymptotics(const Diagram& diagram, const HypothesisReport& report,
                                          const SteklovPair& steklov, const MeshGeometry& mesh);

/// Number of transversal branch crossings of lambda = lambda_query. Crossings
/// hidden between a sampled extremum and its refined fold value count twice.
int multiplicity_scan(const Diagram& diagram, double lambda_query);

}  // namespace bifurc
