#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bifurc {

struct PowerTerm {
    double coeff;
    double exponent;
};

/// Boundary nonlinearity f(s) = sum_j a_j s^{e_j} on s >= 0, extended evenly
/// to the whole line as f(|s|). Exponents are strictly increasing, all >= 1,
/// and the leading coefficient is positive, so f grows like b*s^p at infinity.
/// f(0) = 0 holds structurally (no constant term is representable) and
/// nonnegativity on s >= 0 is verified numerically at construction.
class NonlinearitySpec {
public:
    static NonlinearitySpec from_terms(std::vector<PowerTerm> terms);

    /// Grammar: signed `coeff*s^exponent` terms, e.g. "1*s^1 - 1*s^2 + 1*s^3".
    /// Coefficient and exponent may be omitted ("s - s^2" parses), whitespace
    /// is ignored, exponents are decimals.
    static NonlinearitySpec parse(const std::string& text);

    const std::vector<PowerTerm>& terms() const { return terms_; }
    double growth_exponent() const { return terms_.back().exponent; }  ///< p
    double growth_coeff() const { return terms_.back().coeff; }        ///< b
    double slope_at_zero() const;                                      ///< f'(0+)

    /// f(|s|). Throws EvaluationError for |s| > 1e150.
    double eval(double s) const;
    /// d/ds f(|s|) = sign(s) f'(|s|), with the one-sided f'(0+) at s = 0.
    double eval_prime(double s) const;

    std::string to_string() const;

private:
    std::vector<PowerTerm> terms_;
};

/// Everything the branch machinery needs to know about f.
struct HypothesisReport {
    double growth_exponent = 0.0;                ///< p, the top power
    double growth_coeff = 0.0;                   ///< b, its coefficient
    std::map<int, bool> subcritical_for_dim;     ///< N -> (p in the subcritical window for N)
    double slope_at_zero = 0.0;                  ///< f'(0)
    std::optional<double> remainder_exponent;    ///< smallest exponent above 1 (sharp order of f - f'(0)s)
    double remainder_coeff_lower = 0.0;          ///< its coefficient (lower = upper for power sums)
    double remainder_coeff_upper = 0.0;
    double linear_lower_bound = 0.0;             ///< K = inf_{s>0} f(s)/s; 0 marks failure of f >= Ks
    double linear_lower_bound_argmin = 0.0;      ///< s attaining the infimum (0 when the infimum is at 0+)
    bool bifurcates_from_zero = false;           ///< f'(0) > 0 and a remainder exponent exists
    bool has_linear_lower_bound = false;         ///< K > 0
};

HypothesisReport analyze(const NonlinearitySpec& f, int dimension);

/// Blow-up rescaling of the flux: lambda^{p/(p-1)} f(lambda^{-1/(p-1)} |s|)
/// for lambda > 0, continued by b|s|^p at lambda = 0. The inner argument is
/// handled in logarithms once it exceeds 1e100; a result above 1e150 is an
/// evaluation error.
double rescaled_eval(const NonlinearitySpec& f, double lambda, double s);
/// Partial derivative of rescaled_eval in s.
double rescaled_eval_ds(const NonlinearitySpec& f, double lambda, double s);
/// Partial derivative of rescaled_eval in lambda (lambda > 0 only).
double rescaled_eval_dlambda(const NonlinearitySpec& f, double lambda, double s);

/// Integrability-exponent recursion behind the Hoelder regularity bootstrap.
/// Seeded by q0 = 2(N-1)/(p(N-2)); each step maps
///   r_i = (N-1) q_{i-1} / (N-1 - q_{i-1}),  q_i = r_i / p,  s_i = N q_{i-1}/(N-1),
/// and the recursion terminates once q_i >= N-1. Termination happens exactly
/// for subcritical p; at or above the critical exponent the sequence stalls.
struct BootstrapTrace {
    int dimension = 0;
    double growth_exponent = 0.0;
    std::vector<double> flux_exponents;     ///< q_i: integrability of the boundary flux
    std::vector<double> trace_exponents;    ///< r_i: integrability of the trace
    std::vector<double> sobolev_exponents;  ///< s_i: W^{1,s} regularity per step
    bool terminated = false;
    int steps = 0;
};

/// dimension >= 3 runs the recursion; dimension == 2 returns a trivially
/// terminated trace (no bootstrap needed there). Non-termination within
/// max_steps is data, not an error.
BootstrapTrace bootstrap_exponents(int dimension, double p, int max_steps);

}  // namespace bifurc
