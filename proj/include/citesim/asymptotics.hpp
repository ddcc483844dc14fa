#pragma once

#include <cstdint>
#include <vector>

namespace citesim::asymptotics {

// p.g.f. of the n-author aggregate before the limit. The per-paper p.g.f.
// family is S(w) = 1 - lambda (1-w)^gamma (lambda <= 1 keeps S a p.g.f.),
// the paper count normalizer is 1 - r_n = n^{-1/gamma}, and the returned
// value is S(r_n + (1-r_n) Q(z))^n for the geometric Q. Algebraically that
// collapses to (1 - x)^n with x = (lambda/n) ((1-q)(1-z)/(1-(1-q)z))^gamma,
// evaluated as exp(n log1p(-x)) so large n loses no precision.
double rn_pgf_eval(double lambda, double gamma, double q, double n, double z);

// Limit law exp(-lambda (1-q)^gamma T(z)^gamma), T(z) = (1-z)/(1-(1-q)z).
// Deliberately a separate arithmetic route from the model p.g.f.
double limit_pgf_eval(double lambda, double gamma, double q, double z);

struct ConvergenceRow {
    double n = 0.0;
    double sup_error = 0.0;  // sup over the z grid of |R_n(z) - limit(z)|
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::vector<double> grid;
    bool strictly_decreasing = false;
};

// Tabulates sup-errors along n_values (default 1e2..1e6 by decades) over
// z_grid (default {0, 0.05, ..., 0.95, 0.99}).
ConvergenceReport convergence_report(double lambda, double gamma, double q,
                                     std::vector<double> n_values = {},
                                     std::vector<double> z_grid = {});

// S(k) = P(X >= k) = 1 - sum_{j<k} pmf[j]. The compensated running sum is
// applied as (1 - cum) - comp, which keeps survival accurate far below the
// double rounding floor of the plain cumulative sum. Clamped at 0.
std::vector<double> survival_from_pmf(const std::vector<double>& pmf);

// log S(k) built backward from log pmf values by running log-sum-exp.
// The final entry equals log_pmf.back().
std::vector<double> log_survival_from_log_pmf(const std::vector<double>& log_pmf);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of y against x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// log S(k) against log k on k_min..k_max from a pmf; a power tail of index
// gamma shows up as slope ~ -gamma.
LinearFit tail_index_estimate(const std::vector<double>& pmf, int k_min, int k_max);

// log S(k) against k on k_min..k_max from a pmf; a geometric tail with
// ratio 1-q shows up as slope ~ log(1-q).
LinearFit exponential_tail_estimate(const std::vector<double>& pmf, int k_min, int k_max);

// The same fits for precomputed (log-)survival sequences; used where the
// pmf itself would underflow.
LinearFit tail_index_from_survival(const std::vector<double>& survival, int k_min, int k_max);
LinearFit decay_rate_from_log_pmf(const std::vector<double>& log_pmf, int k_min, int k_max);

}  // namespace citesim::asymptotics
