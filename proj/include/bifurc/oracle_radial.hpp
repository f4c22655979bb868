#pragma once

#include <vector>

#include "bifurc/nonlinearity.hpp"

namespace bifurc::oracle {

/// Modified Bessel function I_n (n = 0 or 1) by direct power series
/// summation, truncated when a term drops below tol * partial_sum.
/// Valid for 0 <= x <= 30, where the series is well conditioned in doubles.
double bessel_I(int n, double x, double tol = 1e-15);

/// Exact first eigenvalue of the boundary eigenproblem on the disk of the
/// given radius: the radial mode gives I_1(R)/I_0(R), and higher angular
/// modes only increase the value.
double disk_mu1(double radius);

/// Closed-form branch on the disk. The radial family u(r) = c I_0(r) solves
/// the interior equation exactly; the boundary condition pins
/// lambda = mu1 * t / f(t) with t = u(R) = sup-norm of u.
struct RadialBranch {
    std::vector<double> t_grid;
    std::vector<double> lambda_of_t;
    double mu1_exact = 0.0;
    double radius = 0.0;
};

RadialBranch radial_branch(const NonlinearitySpec& f, double radius, std::vector<double> t_grid);

/// Radial profile with sup-norm t: u(r) = t * I_0(r) / I_0(R).
double radial_profile(double t, double r, double radius);

}  // namespace bifurc::oracle
