#include "bifurc/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bifurc/oracle_radial.hpp"

namespace bifurc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Weak form of the traced problem in either variable. In the original
/// variable the flux is lambda f(u); in the rescaled variable w the flux is
/// the rescaled nonlinearity and lambda only enters through it.
class Problem {
public:
    Problem(const DiscreteOperator& A, const MeshGeometry& mesh, const NonlinearitySpec& f,
            bool rescaled)
        : A_(A), mesh_(mesh), f_(f), rescaled_(rescaled) {}

    const DiscreteOperator& A() const { return A_; }
    bool rescaled() const { return rescaled_; }

    DofVector residual_at(const DofVector& x, double lambda) const {
        const double lam = std::max(lambda, 0.0);
        if (!rescaled_) return residual(A_, mesh_, x, lam, f_);
        DofVector r = A_.matrix * x;
        r -= boundary_load(mesh_, [&](double s) { return rescaled_eval(f_, lam, s); }, x);
        return r;
    }

    SparseMat jacobian_at(const DofVector& x, double lambda) const {
        const double lam = std::max(lambda, 0.0);
        if (!rescaled_) return jacobian(A_, mesh_, x, lam, f_).matrix;
        DiscreteOperator w = assemble_boundary_weighted(
            mesh_, [&](double s) { return rescaled_eval_ds(f_, lam, s); }, x);
        return A_.matrix - w.matrix;
    }

    DofVector dresidual_dlambda(const DofVector& x, double lambda) const {
        if (!rescaled_) return -boundary_load(mesh_, [&](double s) { return f_.eval(s); }, x);
        const double lam = std::max(lambda, 1e-14);
        return -boundary_load(mesh_, [&](double s) { return rescaled_eval_dlambda(f_, lam, s); }, x);
    }

private:
    const DiscreteOperator& A_;
    const MeshGeometry& mesh_;
    const NonlinearitySpec& f_;
    bool rescaled_;
};

struct CorrectorResult {
    DofVector x;
    double lambda = 0.0;
    int iters = 0;
    bool converged = false;
    double last_residual = kInf;
};

double residual_scale(const Problem& prob, const DofVector& x) {
    return 1.0 + (prob.A().matrix * x).norm();
}

/// Newton on F(x, lambda) = 0 under the linear constraint
/// c_u . x + c_lambda lambda = target, solved through the bordered sparse
/// system with a residual-halving line search (at most 8 halvings per step).
CorrectorResult bordered_correct(const Problem& prob, DofVector x, double lambda,
                                 const DofVector& c_u, double c_lambda, double target, double tol,
                                 int max_iters) {
    const int n = static_cast<int>(x.size());
    CorrectorResult out;

    DofVector r = prob.residual_at(x, lambda);
    double con = c_u.dot(x) + c_lambda * lambda - target;

    for (int iter = 0; iter <= max_iters; ++iter) {
        const double rn = r.norm();
        out.last_residual = rn;
        if (rn <= tol * residual_scale(prob, x) && std::abs(con) <= 1e-12 * (1.0 + std::abs(target))) {
            out.x = std::move(x);
            out.lambda = lambda;
            out.iters = iter;
            out.converged = true;
            return out;
        }
        if (iter == max_iters) break;

        const SparseMat J = prob.jacobian_at(x, lambda);
        const DofVector r_lam = prob.dresidual_dlambda(x, lambda);

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(J.nonZeros() + 2 * n + 1);
        for (int k = 0; k < J.outerSize(); ++k)
            for (SparseMat::InnerIterator it(J, k); it; ++it)
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        for (int i = 0; i < n; ++i) {
            if (r_lam[i] != 0.0) trip.emplace_back(i, n, r_lam[i]);
            if (c_u[i] != 0.0) trip.emplace_back(n, i, c_u[i]);
        }
        if (c_lambda != 0.0) trip.emplace_back(n, n, c_lambda);

        SparseMat bordered(n + 1, n + 1);
        bordered.setFromTriplets(trip.begin(), trip.end());

        DofVector rhs(n + 1);
        rhs.head(n) = -r;
        rhs[n] = -con;
        const DofVector delta = DirectSolver(bordered).solve(rhs);

        const double merit0 = rn * rn + con * con;
        double alpha = 1.0;
        bool moved = false;
        for (int halving = 0; halving <= 8; ++halving, alpha *= 0.5) {
            DofVector x_try = x + alpha * delta.head(n);
            const double lam_try = lambda + alpha * delta[n];
            DofVector r_try;
            try {
                r_try = prob.residual_at(x_try, lam_try);
            } catch (const EvaluationError&) {
                continue;  // overflowed along the step, shorten it
            }
            const double con_try = c_u.dot(x_try) + c_lambda * lam_try - target;
            if (r_try.squaredNorm() + con_try * con_try < merit0) {
                x = std::move(x_try);
                lambda = lam_try;
                r = std::move(r_try);
                con = con_try;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // line search stalled
    }

    out.x = std::move(x);
    out.lambda = lambda;
    out.converged = false;
    return out;
}

/// Plain Newton at fixed lambda (no border, same line search and stopping test).
CorrectorResult plain_newton(const Problem& prob, DofVector x, double lambda, double tol,
                             int max_iters) {
    CorrectorResult out;
    DofVector r = prob.residual_at(x, lambda);

    for (int iter = 0; iter <= max_iters; ++iter) {
        const double rn = r.norm();
        out.last_residual = rn;
        if (rn <= tol * residual_scale(prob, x)) {
            out.x = std::move(x);
            out.lambda = lambda;
            out.iters = iter;
            out.converged = true;
            return out;
        }
        if (iter == max_iters) break;

        const SparseMat J = prob.jacobian_at(x, lambda);
        const DofVector delta = DirectSolver(J).solve(-r);

        const double merit0 = r.squaredNorm();
        double alpha = 1.0;
        bool moved = false;
        for (int halving = 0; halving <= 8; ++halving, alpha *= 0.5) {
            DofVector x_try = x + alpha * delta;
            DofVector r_try;
            try {
                r_try = prob.residual_at(x_try, lambda);
            } catch (const EvaluationError&) {
                continue;
            }
            if (r_try.squaredNorm() < merit0) {
                x = std::move(x_try);
                r = std::move(r_try);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }

    out.x = std::move(x);
    out.lambda = lambda;
    out.converged = false;
    return out;
}

BranchPoint make_point(const Problem& prob, const NonlinearitySpec& f, const DofVector& x,
                       double lambda, double arclength, int iters) {
    BranchPoint pt;
    pt.lambda = lambda;
    pt.state = x;
    pt.arclength = arclength;
    pt.newton_iters = iters;
    pt.rescaled = prob.rescaled();
    pt.positive = x.minCoeff() > 0.0;

    const double sup_state = x.cwiseAbs().maxCoeff();
    const double h1_state = std::sqrt(std::max(0.0, x.dot(prob.A().matrix * x)));
    if (!prob.rescaled()) {
        pt.sup_norm = sup_state;
        pt.h1_norm = h1_state;
    } else {
        // physical u = lambda^{-1/(p-1)} w
        const double factor = std::pow(lambda, -1.0 / (f.growth_exponent() - 1.0));
        pt.sup_norm = factor * sup_state;
        pt.h1_norm = factor * h1_state;
    }
    return pt;
}

/// Arclength metric: RMS nodal increment and lambda increment weighted equally.
double metric_dist(const DofVector& xa, double la, const DofVector& xb, double lb) {
    const double du2 = (xa - xb).squaredNorm() / static_cast<double>(xa.size());
    const double dl = la - lb;
    return std::sqrt(du2 + dl * dl);
}

}  // namespace

std::string to_string(Direction d) {
    switch (d) {
        case Direction::Subcritical: return "Subcritical";
        case Direction::Supercritical: return "Supercritical";
        case Direction::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

DofVector newton_solve(const DiscreteOperator& A, const MeshGeometry& mesh, const DofVector& u0,
                       double lambda, const NonlinearitySpec& f, double tol, int max_iters) {
    if (tol <= 0.0) throw PreconditionError("newton tolerance must be positive");
    if (lambda < 0.0) throw PreconditionError("newton_solve needs lambda >= 0");
    Problem prob(A, mesh, f, /*rescaled=*/false);
    CorrectorResult res = plain_newton(prob, u0, lambda, tol, max_iters);
    if (!res.converged)
        throw ConvergenceError("newton solve did not converge", res.last_residual, max_iters);
    return std::move(res.x);
}

BranchPoint branch_from_trivial(const DiscreteOperator& A, const MeshGeometry& mesh,
                                const NonlinearitySpec& f, const SteklovPair& steklov, double eps,
                                const ContinuationOptions& opts) {
    const double fp0 = f.slope_at_zero();
    if (fp0 <= 0.0)
        throw PreconditionError("branch_from_trivial needs f'(0) > 0 (no trivial-branch bifurcation)");
    if (eps < 1e-4 || eps > 1e-2)
        throw PreconditionError("kickoff amplitude must lie in [1e-4, 1e-2]");

    const double lambda0 = steklov.mu1 / fp0;
    int pin = 0;
    steklov.phi1.maxCoeff(&pin);

    Problem prob(A, mesh, f, /*rescaled=*/false);
    DofVector c_u = DofVector::Zero(mesh.vertex_count());
    c_u[pin] = 1.0;

    CorrectorResult res = bordered_correct(prob, eps * steklov.phi1, lambda0, c_u, 0.0, eps,
                                           opts.newton_tol, opts.newton_max_iters);
    if (!res.converged)
        throw ConvergenceError("kickoff corrector failed (amplitude too large?)", res.last_residual,
                               opts.newton_max_iters);

    BranchPoint pt = make_point(prob, f, res.x, res.lambda, 0.0, res.iters);
    if (!pt.positive) throw InvariantViolation("kickoff point is not strictly positive");
    return pt;
}

BranchPoint branch_from_state(const DiscreteOperator& A, const MeshGeometry& mesh,
                              const NonlinearitySpec& f, const DofVector& u0, double lambda,
                              const ContinuationOptions& opts) {
    Problem prob(A, mesh, f, /*rescaled=*/false);
    CorrectorResult res = plain_newton(prob, u0, lambda, opts.newton_tol, opts.newton_max_iters);
    if (!res.converged)
        throw ConvergenceError("branch seed did not converge", res.last_residual,
                               opts.newton_max_iters);
    return make_point(prob, f, res.x, res.lambda, 0.0, res.iters);
}

Diagram continue_branch(const DiscreteOperator& A, const MeshGeometry& mesh,
                        const NonlinearitySpec& f, const SteklovPair& steklov,
                        const BranchPoint& start, const ContinuationOptions& opts) {
    if (start.rescaled) throw PreconditionError("continue_branch expects an unrescaled start point");
    if (start.lambda <= 0.0) throw PreconditionError("start point must carry lambda > 0");

    const double p = f.growth_exponent();
    const double fp0 = f.slope_at_zero();
    const HypothesisReport report = analyze(f, 2);

    Diagram diagram;
    diagram.mesh_id = mesh.id();
    diagram.f_text = f.to_string();
    diagram.newton_tol = opts.newton_tol;
    diagram.mu1 = steklov.mu1;
    diagram.lambda_star_predicted = fp0 > 0.0 ? steklov.mu1 / fp0 : kNaN;
    diagram.nonexistence_bound =
        report.has_linear_lower_bound ? steklov.mu1 / report.linear_lower_bound : kInf;

    const double lambda_min =
        opts.lambda_min >= 0.0 ? opts.lambda_min
                               : 1e-3 * (fp0 > 0.0 ? steklov.mu1 / fp0 : steklov.mu1);

    Problem unrescaled(A, mesh, f, false);
    Problem rescaled(A, mesh, f, true);
    const Problem* prob = &unrescaled;

    {
        const double rn = unrescaled.residual_at(start.state, start.lambda).norm();
        if (rn > 100.0 * opts.newton_tol * residual_scale(unrescaled, start.state))
            throw PreconditionError("continue_branch start point is not converged");
    }

    diagram.points.push_back(start);
    diagram.points.back().arclength = 0.0;
    diagram.lambda_star_measured = start.lambda;

    // Secant seed: a second amplitude-pinned solve slightly along the branch.
    DofVector x_prev = start.state;
    double lam_prev = start.lambda;
    DofVector x_cur;
    double lam_cur = 0.0;
    {
        int pin = 0;
        start.state.cwiseAbs().maxCoeff(&pin);
        DofVector c_u = DofVector::Zero(mesh.vertex_count());
        c_u[pin] = 1.0;
        double growth = opts.seed_growth;
        bool seeded = false;
        for (int attempt = 0; attempt < 6 && !seeded; ++attempt) {
            const double target = growth * start.state[pin];
            try {
                CorrectorResult res = bordered_correct(*prob, growth * start.state, start.lambda,
                                                       c_u, 0.0, target, opts.newton_tol,
                                                       opts.newton_max_iters);
                if (res.converged && res.x.minCoeff() > 0.0 && res.lambda > 0.0) {
                    x_cur = std::move(res.x);
                    lam_cur = res.lambda;
                    BranchPoint pt = make_point(*prob, f, x_cur, lam_cur,
                                                metric_dist(x_prev, lam_prev, x_cur, lam_cur),
                                                res.iters);
                    diagram.points.push_back(std::move(pt));
                    seeded = true;
                }
            } catch (const Error&) {
                // fall through to a gentler amplitude
            }
            growth = 1.0 + 0.5 * (growth - 1.0);
        }
        if (!seeded) throw BranchError("could not generate the secant seed point", diagram);
    }

    double step = std::clamp(metric_dist(x_prev, lam_prev, x_cur, lam_cur), opts.step_min,
                             opts.step_max);
    bool last_failure_was_exception = false;
    std::string last_error;

    while (static_cast<int>(diagram.points.size()) < opts.max_steps) {
        const BranchPoint& cur_pt = diagram.points.back();
        if (cur_pt.lambda <= lambda_min) {
            diagram.stop_reason = "lambda_min";
            break;
        }
        if (cur_pt.sup_norm >= opts.norm_max) {
            diagram.stop_reason = "norm_max";
            break;
        }

        // Switch to the bounded variable once the solution grows large.
        if (!prob->rescaled() && p > 1.0 && cur_pt.sup_norm > opts.switch_threshold) {
            const double e = 1.0 / (p - 1.0);
            x_prev *= std::pow(lam_prev, e);
            x_cur *= std::pow(lam_cur, e);
            prob = &rescaled;
        }

        const double dist = metric_dist(x_prev, lam_prev, x_cur, lam_cur);
        DofVector dir_u = (x_cur - x_prev) / dist;
        const double dir_lam = (lam_cur - lam_prev) / dist;

        double step_eff = step;
        if (dir_lam != 0.0)
            step_eff = std::min(step_eff,
                                opts.lambda_step_fraction * std::max(lam_cur, 0.0) / std::abs(dir_lam));

        // Constraint row in the weighted metric: <dir, x - x_cur> = step_eff.
        DofVector c_u = dir_u / static_cast<double>(dir_u.size());
        const double c_lam = dir_lam;
        const double target = c_u.dot(x_cur) + c_lam * lam_cur + step_eff;

        bool accepted = false;
        try {
            CorrectorResult res =
                bordered_correct(*prob, x_cur + step_eff * dir_u, lam_cur + step_eff * dir_lam,
                                 c_u, c_lam, target, opts.newton_tol, opts.newton_max_iters);
            last_failure_was_exception = false;
            if (res.converged && res.x.minCoeff() > 0.0 && res.lambda > 0.0) {
                BranchPoint pt = make_point(*prob, f, res.x, res.lambda,
                                            cur_pt.arclength +
                                                metric_dist(x_cur, lam_cur, res.x, res.lambda),
                                            res.iters);
                x_prev = std::move(x_cur);
                lam_prev = lam_cur;
                x_cur = std::move(res.x);
                lam_cur = res.lambda;
                diagram.points.push_back(std::move(pt));
                accepted = true;
                if (res.iters <= 3) step = std::min(step * opts.step_grow, opts.step_max);
            }
        } catch (const Error& e) {
            last_failure_was_exception = true;
            last_error = e.what();
        }

        if (!accepted) {
            step *= 0.5;
            if (step < opts.step_min) {
                if (last_failure_was_exception)
                    throw BranchError("continuation corrector failed at the minimum step: " + last_error,
                                      diagram);
                diagram.stop_reason = "step_underflow";
                break;
            }
        }
    }
    if (diagram.stop_reason.empty()) diagram.stop_reason = "max_steps";

    for (const BranchPoint& pt : diagram.points)
        if (pt.rescaled)
            diagram.max_rescaled_sup =
                std::max(diagram.max_rescaled_sup, pt.state.cwiseAbs().maxCoeff());

    diagram.folds = detect_folds(diagram);

    bool consistent = true;
    if (report.bifurcates_from_zero) {
        int small = 0;
        for (const BranchPoint& pt : diagram.points)
            if (pt.sup_norm <= 0.05) ++small;
        if (small >= 5) {
            diagram.direction = classify_direction(f, report, diagram, &consistent);
        }
    }
    diagram.direction_consistent = consistent;
    return diagram;
}

DofVector solve_limiting(const MeshGeometry& mesh, double b, double p, const DofVector* w_init,
                         double tol, int max_iters) {
    if (b <= 0.0) throw PreconditionError("limiting problem needs b > 0");
    if (p <= 1.0) throw PreconditionError("limiting problem needs p > 1");

    double radius = 0.0;
    for (int v : mesh.boundary_vertices)
        radius = std::max(radius, std::hypot(mesh.vertices[v].x, mesh.vertices[v].y));
    const double mu1 = oracle::disk_mu1(std::min(radius, 30.0));
    const double t_star = std::pow(mu1 / b, 1.0 / (p - 1.0));

    DofVector w0;
    if (w_init) {
        if (w_init->size() != mesh.vertex_count())
            throw PreconditionError("limiting initial guess has wrong length");
        const double sup = w_init->cwiseAbs().maxCoeff();
        if (sup < 0.1 || sup > 100.0)
            throw PreconditionError("limiting initial guess sup-norm must lie in [0.1, 100]");
        if (w_init->minCoeff() <= 0.0)
            throw PreconditionError("limiting initial guess must be positive");
        w0 = *w_init;
    } else {
        const double i0_r = oracle::bessel_I(0, std::min(radius, 30.0));
        w0.resize(mesh.vertex_count());
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
            w0[v] = t_star * oracle::bessel_I(0, std::min(r, 30.0)) / i0_r;
        }
    }

    // The limit state solves the rescaled problem of a pure power at lambda = 0.
    const NonlinearitySpec power = NonlinearitySpec::from_terms({{b, p}});
    const DiscreteOperator A = assemble_interior_form(mesh);
    Problem prob(A, mesh, power, /*rescaled=*/true);
    CorrectorResult res = plain_newton(prob, w0, 0.0, tol, max_iters);
    if (!res.converged)
        throw ConvergenceError("limiting problem Newton did not converge", res.last_residual,
                               max_iters);
    if (res.x.cwiseAbs().maxCoeff() < 0.01 * t_star)
        throw ConvergenceError("limiting problem collapsed to the trivial solution",
                               res.last_residual, res.iters);
    if (res.x.minCoeff() <= 0.0)
        throw InvariantViolation("limiting solution is not strictly positive");
    return std::move(res.x);
}

std::vector<Fold> detect_folds(const Diagram& diagram) {
    std::vector<Fold> folds;
    const auto& pts = diagram.points;
    if (pts.size() < 3) return folds;

    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        const double d1 = pts[i].lambda - pts[i - 1].lambda;
        const double d2 = pts[i + 1].lambda - pts[i].lambda;
        if (d1 == 0.0 || d2 == 0.0) continue;
        if ((d1 > 0.0) == (d2 > 0.0)) continue;

        // Quadratic in arclength through the three surrounding samples.
        const double s0 = pts[i - 1].arclength, s1 = pts[i].arclength, s2 = pts[i + 1].arclength;
        const double l0 = pts[i - 1].lambda, l1 = pts[i].lambda, l2 = pts[i + 1].lambda;
        const double c1 = (l1 - l0) / (s1 - s0);
        const double c2 = ((l2 - l1) / (s2 - s1) - c1) / (s2 - s0);
        double lambda_bar = l1;
        if (c2 != 0.0) {
            const double s_star = 0.5 * (s0 + s1) - c1 / (2.0 * c2);
            if (s_star >= s0 && s_star <= s2)
                lambda_bar = l0 + c1 * (s_star - s0) + c2 * (s_star - s0) * (s_star - s1);
        }
        folds.push_back({static_cast<int>(i), lambda_bar});
    }
    return folds;
}

Direction classify_direction(const NonlinearitySpec& f, const HypothesisReport& report,
                             const Diagram& diagram, bool* consistent) {
    (void)f;
    Direction analytic = Direction::Inconclusive;
    if (report.remainder_exponent) {
        if (report.remainder_coeff_lower > 0.0) analytic = Direction::Subcritical;
        else if (report.remainder_coeff_upper < 0.0) analytic = Direction::Supercritical;
    }

    std::vector<double> lambdas;
    for (const BranchPoint& pt : diagram.points)
        if (pt.sup_norm <= 0.05) lambdas.push_back(pt.lambda);
    if (lambdas.size() < 5)
        throw PreconditionError("classify_direction needs at least 5 points with sup-norm <= 0.05");

    int below = 0, above = 0;
    for (double lam : lambdas) {
        if (lam < diagram.lambda_star_predicted) ++below;
        else if (lam > diagram.lambda_star_predicted) ++above;
    }
    Direction numeric = Direction::Inconclusive;
    if (below > above) numeric = Direction::Subcritical;
    else if (above > below) numeric = Direction::Supercritical;

    if (consistent) *consistent = (analytic == Direction::Inconclusive) || (analytic == numeric);
    return analytic;
}

AsymptoteEstimate bifurcation_asymptotics(const Diagram& diagram, const HypothesisReport& report,
                                          const SteklovPair& steklov, const MeshGeometry& mesh) {
    if (!report.bifurcates_from_zero)
        throw PreconditionError("bifurcation asymptotics need f'(0) > 0 with a remainder exponent");
    const double nu = *report.remainder_exponent;
    const double fp0 = report.slope_at_zero;
    const double lambda_star = steklov.mu1 / fp0;

    std::vector<std::pair<double, double>> window;  // (sup_norm, lambda)
    for (const BranchPoint& pt : diagram.points)
        if (!pt.rescaled && pt.sup_norm >= 1e-3 && pt.sup_norm <= 5e-2)
            window.emplace_back(pt.sup_norm, pt.lambda);
    if (window.size() < 2)
        throw PreconditionError("insufficient small-norm points for the asymptote estimate");
    std::sort(window.begin(), window.end());

    auto ratio = [&](const std::pair<double, double>& s) {
        return (lambda_star - s.second) / std::pow(s.first, nu - 1.0);
    };
    // One-step Richardson in the sup-norm using the two smallest points.
    const double t0 = window[0].first, t1 = window[1].first;
    const double g0 = ratio(window[0]), g1 = ratio(window[1]);

    AsymptoteEstimate est;
    est.numeric = (g0 * t1 - g1 * t0) / (t1 - t0);
    est.points_used = static_cast<int>(window.size());

    const double num = boundary_load(
                           mesh, [nu](double s) { return std::pow(std::abs(s), 1.0 + nu); },
                           steklov.phi1)
                           .sum();
    const double den =
        boundary_load(mesh, [](double s) { return s * s; }, steklov.phi1).sum();
    est.analytic = report.remainder_coeff_lower * steklov.mu1 / (fp0 * fp0) * num / den;
    return est;
}

int multiplicity_scan(const Diagram& diagram, double lambda_query) {
    if (lambda_query <= 0.0) throw PreconditionError("multiplicity scan needs lambda > 0");
    const auto& pts = diagram.points;
    int count = 0;

    int last_sign = 0;
    for (const BranchPoint& pt : pts) {
        const double d = pt.lambda - lambda_query;
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++count;
        last_sign = sign;
    }

    // A fold extremum may overshoot every sampled lambda; crossings hiding
    // between the sampled extremum and the refined fold value come in pairs.
    for (const Fold& fold : diagram.folds) {
        const double sampled = pts[fold.index].lambda;
        const bool is_max = fold.index > 0 && sampled >= pts[fold.index - 1].lambda;
        if (is_max) {
            if (lambda_query > sampled && lambda_query < fold.lambda_bar) count += 2;
        } else {
            if (lambda_query < sampled && lambda_query > fold.lambda_bar) count += 2;
        }
    }
    return count;
}

}  // namespace bifurc
