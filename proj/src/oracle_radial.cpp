#include "bifurc/oracle_radial.hpp"

#include <cmath>

#include "bifurc/errors.hpp"

namespace bifurc::oracle {

double bessel_I(int n, double x, double tol) {
    if (n != 0 && n != 1) throw PreconditionError("bessel_I supports orders 0 and 1 only");
    if (x < 0.0 || x > 30.0) throw PreconditionError("bessel_I argument must lie in [0, 30]");
    if (tol <= 0.0) throw PreconditionError("bessel_I tolerance must be positive");

    // term_k = (x/2)^{n+2k} / (k! (n+k)!), updated incrementally.
    const double q = 0.25 * x * x;
    double term = (n == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k <= 400; ++k) {
        term *= q / (static_cast<double>(k) * (n + k));
        sum += term;
        if (term < tol * sum) break;
    }
    return sum;
}

double disk_mu1(double radius) {
    if (radius <= 0.0 || radius > 30.0) throw PreconditionError("disk radius must lie in (0, 30]");
    return bessel_I(1, radius) / bessel_I(0, radius);
}

RadialBranch radial_branch(const NonlinearitySpec& f, double radius, std::vector<double> t_grid) {
    RadialBranch branch;
    branch.radius = radius;
    branch.mu1_exact = disk_mu1(radius);
    branch.lambda_of_t.reserve(t_grid.size());
    for (double t : t_grid) {
        if (t <= 0.0) throw PreconditionError("radial branch needs positive sup-norm parameters");
        const double ft = f.eval(t);
        if (ft <= 0.0)
            throw EvaluationError("nonlinearity vanishes on the requested grid", t);
        branch.lambda_of_t.push_back(branch.mu1_exact * t / ft);
    }
    branch.t_grid = std::move(t_grid);
    return branch;
}

double radial_profile(double t, double r, double radius) {
    return t * bessel_I(0, r) / bessel_I(0, radius);
}

}  // namespace bifurc::oracle
