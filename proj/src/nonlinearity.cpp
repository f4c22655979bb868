#include "bifurc/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

constexpr double kArgLimit = 1e150;
constexpr double kResultLimit = 1e150;

bool is_linear_exponent(double e) { return std::abs(e - 1.0) < 1e-12; }

double term_scale(const std::vector<PowerTerm>& terms) {
    double scale = 0.0;
    for (const auto& t : terms) scale = std::max(scale, std::abs(t.coeff));
    return scale;
}

/// Golden-section minimum of fn on [a, b], relative interval tolerance.
double golden_min(const std::vector<PowerTerm>& terms, double a, double b,
                  double (*fn)(const std::vector<PowerTerm>&, double), double rel_tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = fn(terms, x1);
    double f2 = fn(terms, x2);
    while ((b - a) > rel_tol * std::max(1e-300, std::abs(b))) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fn(terms, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fn(terms, x2);
        }
    }
    return 0.5 * (a + b);
}

double eval_terms(const std::vector<PowerTerm>& terms, double s) {
    double sum = 0.0;
    for (const auto& t : terms) sum += t.coeff * std::pow(s, t.exponent);
    return sum;
}

double eval_ratio(const std::vector<PowerTerm>& terms, double s) {
    double sum = 0.0;
    for (const auto& t : terms) sum += t.coeff * std::pow(s, t.exponent - 1.0);
    return sum;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    std::vector<double> grid;
    const double decades = std::log10(hi / lo);
    const int n = static_cast<int>(decades * per_decade) + 1;
    grid.reserve(n + 1);
    for (int i = 0; i <= n; ++i) grid.push_back(lo * std::pow(10.0, decades * i / n));
    return grid;
}

void check_nonnegative(const std::vector<PowerTerm>& terms) {
    const double scale = term_scale(terms);
    const auto grid = log_grid(1e-8, 1e8, 64);
    double prev_s = 0.0, prev_f = 0.0;
    for (double s : grid) {
        double local = 0.0;
        for (const auto& t : terms) local += std::abs(t.coeff) * std::pow(s, t.exponent);
        const double fs = eval_terms(terms, s);
        if (fs < -1e-13 * std::max(local, scale)) {
            // Bisect the sign change to report where f first goes negative.
            double a = prev_s, b = s;
            if (prev_f > 0.0 && a > 0.0) {
                for (int it = 0; it < 200; ++it) {
                    const double m = 0.5 * (a + b);
                    (eval_terms(terms, m) > 0.0 ? a : b) = m;
                }
            }
            throw InvariantViolation("nonlinearity is negative near s = " + std::to_string(0.5 * (a + b)) +
                                     " (f must map [0,inf) into [0,inf))");
        }
        prev_s = s;
        prev_f = fs;
    }
}

}  // namespace

NonlinearitySpec NonlinearitySpec::from_terms(std::vector<PowerTerm> terms) {
    if (terms.empty()) throw InvariantViolation("nonlinearity needs at least one power term");
    std::sort(terms.begin(), terms.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
    for (size_t j = 0; j < terms.size(); ++j) {
        if (!std::isfinite(terms[j].coeff) || !std::isfinite(terms[j].exponent))
            throw InvariantViolation("nonlinearity term has non-finite coefficient or exponent");
        if (terms[j].coeff == 0.0) throw InvariantViolation("nonlinearity term has zero coefficient");
        if (terms[j].exponent < 1.0 - 1e-12)
            throw InvariantViolation("exponent " + std::to_string(terms[j].exponent) +
                                     " is below 1 (would break f(0) = 0 with bounded slope)");
        if (j > 0 && terms[j].exponent - terms[j - 1].exponent < 1e-12)
            throw InvariantViolation("duplicate exponent " + std::to_string(terms[j].exponent) +
                                     " in nonlinearity");
    }
    if (terms.back().coeff <= 0.0)
        throw InvariantViolation("leading coefficient must be positive (growth at infinity)");
    check_nonnegative(terms);

    NonlinearitySpec spec;
    spec.terms_ = std::move(terms);
    return spec;
}

NonlinearitySpec NonlinearitySpec::parse(const std::string& text) {
    std::string src;
    src.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) src.push_back(c);
    if (src.empty()) throw ParseError("empty nonlinearity string");

    std::vector<PowerTerm> terms;
    size_t i = 0;
    auto read_number = [&](double fallback, bool* found) -> double {
        char* end = nullptr;
        const double v = std::strtod(src.c_str() + i, &end);
        const size_t used = end - (src.c_str() + i);
        if (used == 0) {
            *found = false;
            return fallback;
        }
        *found = true;
        i += used;
        return v;
    };

    while (i < src.size()) {
        double sign = 1.0;
        if (src[i] == '+' || src[i] == '-') {
            sign = (src[i] == '-') ? -1.0 : 1.0;
            ++i;
        }
        bool have_coeff = false;
        double coeff = read_number(1.0, &have_coeff);
        if (have_coeff && i < src.size() && src[i] == '*') ++i;
        if (i >= src.size() || src[i] != 's')
            throw ParseError("expected 's' at position " + std::to_string(i) + " in '" + text + "'");
        ++i;
        double exponent = 1.0;
        if (i < src.size() && src[i] == '^') {
            ++i;
            bool have_exp = false;
            exponent = read_number(1.0, &have_exp);
            if (!have_exp)
                throw ParseError("expected exponent after '^' at position " + std::to_string(i) + " in '" + text + "'");
        }
        terms.push_back({sign * coeff, exponent});
        if (i < src.size() && src[i] != '+' && src[i] != '-')
            throw ParseError("unexpected character '" + std::string(1, src[i]) + "' at position " +
                             std::to_string(i) + " in '" + text + "'");
    }
    return from_terms(std::move(terms));
}

double NonlinearitySpec::slope_at_zero() const {
    double slope = 0.0;
    for (const auto& t : terms_)
        if (is_linear_exponent(t.exponent)) slope += t.coeff;
    return slope;
}

double NonlinearitySpec::eval(double s) const {
    const double as = std::abs(s);
    if (as > kArgLimit) throw EvaluationError("nonlinearity argument overflow", s);
    const double value = eval_terms(terms_, as);
    if (!std::isfinite(value)) throw EvaluationError("nonlinearity overflow", s);
    return value;
}

double NonlinearitySpec::eval_prime(double s) const {
    const double as = std::abs(s);
    if (as > kArgLimit) throw EvaluationError("nonlinearity argument overflow", s);
    if (as == 0.0) return slope_at_zero();  // one-sided f'(0+)
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.coeff * t.exponent * std::pow(as, t.exponent - 1.0);
    if (!std::isfinite(sum)) throw EvaluationError("nonlinearity overflow", s);
    return (s < 0.0) ? -sum : sum;
}

std::string NonlinearitySpec::to_string() const {
    std::ostringstream os;
    char buf[64];
    for (size_t j = 0; j < terms_.size(); ++j) {
        const double c = terms_[j].coeff;
        if (j == 0) {
            if (c < 0.0) os << '-';
        } else {
            os << (c < 0.0 ? " - " : " + ");
        }
        std::snprintf(buf, sizeof(buf), "%.12g*s^%.12g", std::abs(c), terms_[j].exponent);
        os << buf;
    }
    return os.str();
}

HypothesisReport analyze(const NonlinearitySpec& f, int dimension) {
    if (dimension < 2) throw PreconditionError("dimension must be at least 2");
    const auto& terms = f.terms();

    HypothesisReport rep;
    rep.growth_exponent = f.growth_exponent();
    rep.growth_coeff = f.growth_coeff();
    rep.slope_at_zero = f.slope_at_zero();

    const double p = rep.growth_exponent;
    for (int n = 2; n <= std::max(10, dimension); ++n)
        rep.subcritical_for_dim[n] = (p > 1.0) && (n == 2 || p < double(n) / double(n - 2));

    // Sharp remainder order: the smallest exponent above 1. For a power sum the
    // liminf and limsup of (f(s) - f'(0)s)/s^nu coincide with its coefficient.
    for (const auto& t : terms) {
        if (!is_linear_exponent(t.exponent)) {
            rep.remainder_exponent = t.exponent;
            rep.remainder_coeff_lower = t.coeff;
            rep.remainder_coeff_upper = t.coeff;
            break;
        }
    }
    rep.bifurcates_from_zero = (rep.slope_at_zero > 0.0) && rep.remainder_exponent.has_value();

    // K = inf_{s>0} f(s)/s: bracket the minimum on a log grid, refine by
    // golden section, and take the s -> 0+ limit f'(0) into account.
    const auto grid = log_grid(1e-8, 1e8, 64);
    size_t best = 0;
    double best_val = eval_ratio(terms, grid[0]);
    for (size_t i = 1; i < grid.size(); ++i) {
        const double v = eval_ratio(terms, grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = grid[best > 0 ? best - 1 : 0];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const double s_star = golden_min(terms, lo, hi, eval_ratio, 1e-10);
    double k_interior = eval_ratio(terms, s_star);

    if (rep.slope_at_zero <= k_interior) {
        rep.linear_lower_bound = rep.slope_at_zero;
        rep.linear_lower_bound_argmin = 0.0;
    } else {
        rep.linear_lower_bound = k_interior;
        rep.linear_lower_bound_argmin = s_star;
    }
    if (rep.linear_lower_bound < 1e-12 * term_scale(terms)) {
        rep.linear_lower_bound = 0.0;  // the linear lower bound f >= K s fails
        rep.linear_lower_bound_argmin = 0.0;
    }
    rep.has_linear_lower_bound = rep.linear_lower_bound > 0.0;
    return rep;
}

double rescaled_eval(const NonlinearitySpec& f, double lambda, double s) {
    if (lambda < 0.0) throw PreconditionError("rescaled flux needs lambda >= 0");
    const double as = std::abs(s);
    if (as > kArgLimit) throw EvaluationError("rescaled flux argument overflow", s);
    const double p = f.growth_exponent();

    double result = 0.0;
    if (lambda == 0.0 || as == 0.0) {
        result = (as == 0.0) ? 0.0 : f.growth_coeff() * std::pow(as, p);
    } else {
        if (p <= 1.0) throw PreconditionError("rescaling requires superlinear growth (p > 1)");
        // Term-wise: lambda^{p/(p-1)} (lambda^{-1/(p-1)} |s|)^{e} = lambda^{(p-e)/(p-1)} |s|^{e}.
        // Evaluated through logarithms, which also covers inner arguments past 1e100.
        const double log_lambda = std::log(lambda);
        const double log_s = std::log(as);
        for (const auto& t : f.terms()) {
            const double log_term = (p - t.exponent) / (p - 1.0) * log_lambda + t.exponent * log_s;
            if (log_term > 400.0) throw EvaluationError("rescaled flux overflow", s);
            result += t.coeff * std::exp(log_term);
        }
    }
    if (!std::isfinite(result) || std::abs(result) > kResultLimit)
        throw EvaluationError("rescaled flux overflow", s);
    return result;
}

double rescaled_eval_ds(const NonlinearitySpec& f, double lambda, double s) {
    if (lambda < 0.0) throw PreconditionError("rescaled flux needs lambda >= 0");
    const double as = std::abs(s);
    if (as > kArgLimit) throw EvaluationError("rescaled flux argument overflow", s);
    const double p = f.growth_exponent();
    const double sign = (s < 0.0) ? -1.0 : 1.0;

    if (lambda == 0.0) {
        if (as == 0.0) return 0.0;
        const double slope = sign * f.growth_coeff() * p * std::pow(as, p - 1.0);
        if (!std::isfinite(slope)) throw EvaluationError("rescaled flux overflow", s);
        return slope;
    }
    if (p <= 1.0) throw PreconditionError("rescaling requires superlinear growth (p > 1)");
    if (as == 0.0) return lambda * f.slope_at_zero();  // one-sided slope at w = 0

    const double log_lambda = std::log(lambda);
    const double log_s = std::log(as);
    double sum = 0.0;
    for (const auto& t : f.terms()) {
        const double log_term = (p - t.exponent) / (p - 1.0) * log_lambda + (t.exponent - 1.0) * log_s;
        if (log_term > 400.0) throw EvaluationError("rescaled flux overflow", s);
        sum += t.coeff * t.exponent * std::exp(log_term);
    }
    if (!std::isfinite(sum)) throw EvaluationError("rescaled flux overflow", s);
    return sign * sum;
}

double rescaled_eval_dlambda(const NonlinearitySpec& f, double lambda, double s) {
    if (lambda <= 0.0) throw PreconditionError("lambda derivative of the rescaled flux needs lambda > 0");
    const double as = std::abs(s);
    if (as > kArgLimit) throw EvaluationError("rescaled flux argument overflow", s);
    const double p = f.growth_exponent();
    if (p <= 1.0) throw PreconditionError("rescaling requires superlinear growth (p > 1)");
    if (as == 0.0) return 0.0;

    const double log_lambda = std::log(lambda);
    const double log_s = std::log(as);
    double sum = 0.0;
    for (const auto& t : f.terms()) {
        const double alpha = (p - t.exponent) / (p - 1.0);
        if (alpha == 0.0) continue;  // the leading term does not depend on lambda
        const double log_term = (alpha - 1.0) * log_lambda + t.exponent * log_s;
        if (log_term > 400.0) throw EvaluationError("rescaled flux overflow", s);
        sum += t.coeff * alpha * std::exp(log_term);
    }
    if (!std::isfinite(sum)) throw EvaluationError("rescaled flux overflow", s);
    return sum;
}

BootstrapTrace bootstrap_exponents(int dimension, double p, int max_steps) {
    if (dimension < 2) throw PreconditionError("bootstrap needs dimension >= 2");
    if (p <= 1.0) throw PreconditionError("bootstrap needs superlinear growth (p > 1)");
    if (max_steps < 0) throw PreconditionError("max_steps must be non-negative");

    BootstrapTrace trace;
    trace.dimension = dimension;
    trace.growth_exponent = p;
    if (dimension == 2) {
        trace.terminated = true;  // regularity is immediate in the plane
        return trace;
    }

    const double nm1 = dimension - 1;
    const double q0 = 2.0 * nm1 / (p * (dimension - 2));
    trace.flux_exponents.push_back(q0);
    trace.trace_exponents.push_back(p * q0);
    if (q0 >= nm1) {
        trace.terminated = true;
        return trace;
    }

    for (int i = 1; i <= max_steps; ++i) {
        const double q_prev = trace.flux_exponents.back();
        const double r = nm1 * q_prev / (nm1 - q_prev);
        const double q = r / p;
        trace.trace_exponents.push_back(r);
        trace.flux_exponents.push_back(q);
        trace.sobolev_exponents.push_back(dimension * q_prev / nm1);
        trace.steps = i;
        if (q >= nm1) {
            trace.terminated = true;
            break;
        }
    }
    return trace;
}

}  // namespace bifurc
