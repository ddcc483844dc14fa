#include "citesim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "citesim/errors.hpp"

namespace citesim::asymptotics {

namespace {

void check_params(double lambda, double gamma, double q) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("limit harness: lambda must be positive");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ValidationError("limit harness: gamma must be in (0, 1]");
    }
    if (!(q > 0.0 && q < 1.0)) {
        throw ValidationError("limit harness: q must be in (0, 1)");
    }
}

void check_z(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("limit harness: z must be in [0, 1]");
}

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

double rn_pgf_eval(double lambda, double gamma, double q, double n, double z) {
    check_params(lambda, gamma, q);
    check_z(z);
    if (lambda > 1.0) {
        throw ValidationError("rn_pgf_eval: lambda must be <= 1 for S to be a p.g.f.");
    }
    if (!(n >= 1.0)) throw ValidationError("rn_pgf_eval: n must be >= 1");
    // 1 - Q(z) for the geometric p.g.f. in closed form; no cancellation.
    const double one_minus_q_of_z = (1.0 - q) * (1.0 - z) / (1.0 - (1.0 - q) * z);
    const double x = (lambda / n) * std::pow(one_minus_q_of_z, gamma);
    if (x >= 1.0) {
        throw NumericalError(fmt::format("rn_pgf_eval: per-term mass {:.6f} >= 1 at n = {}", x, n));
    }
    return std::exp(n * std::log1p(-x));
}

double limit_pgf_eval(double lambda, double gamma, double q, double z) {
    check_params(lambda, gamma, q);
    check_z(z);
    const double t = (1.0 - z) / (1.0 - (1.0 - q) * z);
    return std::exp(-lambda * std::pow(1.0 - q, gamma) * std::pow(t, gamma));
}

ConvergenceReport convergence_report(double lambda, double gamma, double q,
                                     std::vector<double> n_values,
                                     std::vector<double> z_grid) {
    check_params(lambda, gamma, q);
    if (n_values.empty()) n_values = {1e2, 1e3, 1e4, 1e5, 1e6};
    if (z_grid.empty()) {
        for (int i = 0; i < 20; ++i) z_grid.push_back(0.05 * i);
        z_grid.push_back(0.99);
    }
    ConvergenceReport rep;
    rep.grid = z_grid;
    for (double n : n_values) {
        double sup = 0.0;
        for (double z : z_grid) {
            const double err = std::abs(rn_pgf_eval(lambda, gamma, q, n, z) -
                                        limit_pgf_eval(lambda, gamma, q, z));
            sup = std::max(sup, err);
        }
        rep.rows.push_back({n, sup});
    }
    rep.strictly_decreasing = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        if (!(rep.rows[i].sup_error < rep.rows[i - 1].sup_error)) {
            rep.strictly_decreasing = false;
            break;
        }
    }
    return rep;
}

std::vector<double> survival_from_pmf(const std::vector<double>& pmf) {
    std::vector<double> s(pmf.size());
    double cum = 0.0, comp = 0.0;
    for (size_t k = 0; k < pmf.size(); ++k) {
        s[k] = std::max((1.0 - cum) - comp, 0.0);
        const double t = cum + pmf[k];
        comp += (cum - t) + pmf[k];
        cum = t;
    }
    return s;
}

std::vector<double> log_survival_from_log_pmf(const std::vector<double>& log_pmf) {
    if (log_pmf.empty()) throw ValidationError("log_survival: empty input");
    std::vector<double> s(log_pmf.size());
    s.back() = log_pmf.back();
    for (size_t k = log_pmf.size() - 1; k-- > 0;) {
        s[k] = logaddexp(log_pmf[k], s[k + 1]);
    }
    return s;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("linear_fit: needs two equal-length samples of size >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("linear_fit: x values are all identical");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

namespace {

LinearFit fit_window(const std::vector<double>& y, int k_min, int k_max, bool log_x) {
    if (k_min < 1 || k_max <= k_min || k_max >= static_cast<int>(y.size())) {
        throw ValidationError("tail fit: window must satisfy 1 <= k_min < k_max < size");
    }
    std::vector<double> xs, ys;
    xs.reserve(static_cast<size_t>(k_max - k_min) + 1);
    ys.reserve(xs.capacity());
    for (int k = k_min; k <= k_max; ++k) {
        xs.push_back(log_x ? std::log(static_cast<double>(k)) : static_cast<double>(k));
        ys.push_back(y[static_cast<size_t>(k)]);
    }
    return linear_fit(xs, ys);
}

std::vector<double> log_survival_window(const std::vector<double>& survival, int k_min,
                                        int k_max) {
    std::vector<double> logs(survival.size(),
                             -std::numeric_limits<double>::infinity());
    for (size_t k = 0; k < survival.size(); ++k) {
        const bool in_window = static_cast<int>(k) >= k_min && static_cast<int>(k) <= k_max;
        if (in_window && !(survival[k] > 0.0)) {
            throw NumericalError(fmt::format("tail fit: survival vanished at k = {}", k));
        }
        if (survival[k] > 0.0) logs[k] = std::log(survival[k]);
    }
    return logs;
}

}  // namespace

LinearFit tail_index_estimate(const std::vector<double>& pmf, int k_min, int k_max) {
    return tail_index_from_survival(survival_from_pmf(pmf), k_min, k_max);
}

LinearFit exponential_tail_estimate(const std::vector<double>& pmf, int k_min, int k_max) {
    const auto survival = survival_from_pmf(pmf);
    return fit_window(log_survival_window(survival, k_min, k_max), k_min, k_max,
                      /*log_x=*/false);
}

LinearFit tail_index_from_survival(const std::vector<double>& survival, int k_min, int k_max) {
    return fit_window(log_survival_window(survival, k_min, k_max), k_min, k_max,
                      /*log_x=*/true);
}

LinearFit decay_rate_from_log_pmf(const std::vector<double>& log_pmf, int k_min, int k_max) {
    return fit_window(log_pmf, k_min, k_max, /*log_x=*/false);
}

}  // namespace citesim::asymptotics
