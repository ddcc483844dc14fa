#include "citesim/inference.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "citesim/errors.hpp"
#include "citesim/sampler.hpp"

namespace citesim::inference {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::pair<std::int64_t, std::int64_t>> value_counts(
    const std::vector<std::int64_t>& counts) {
    std::map<std::int64_t, std::int64_t> hist;
    for (std::int64_t v : counts) ++hist[v];
    return {hist.begin(), hist.end()};
}

// Zero-truncated geometric log-likelihood at its MLE q = 1/mean.
double ztg_log_likelihood(double q, std::int64_t n, std::int64_t sum) {
    if (q >= 1.0) return 0.0;  // all counts are 1
    return static_cast<double>(n) * std::log(q) +
           static_cast<double>(sum - n) * std::log1p(-q);
}

// log P(k) for the BetaLike-mixed zero-truncated geometric,
// P(k) = B(s+1, b+k-1) / B(s, b).
struct MixedZtgLikelihood {
    std::vector<std::pair<std::int64_t, std::int64_t>> hist;
    std::int64_t n = 0;

    double operator()(double log_s, double log_b) const {
        const double s = std::exp(log_s), b = std::exp(log_b);
        double acc = static_cast<double>(n) *
                     (std::log(s) - std::lgamma(b) + std::lgamma(s + b));
        for (const auto& [v, cnt] : hist) {
            acc += static_cast<double>(cnt) *
                   (std::lgamma(b + static_cast<double>(v) - 1.0) -
                    std::lgamma(s + b + static_cast<double>(v)));
        }
        return std::isfinite(acc) ? acc : kNegInf;
    }
};

struct MixedFit {
    double log_s = 0.0;
    double log_b = 0.0;
    double log_likelihood = kNegInf;
};

// Derivative-free coordinate search over (log s, log b) from a fixed grid of
// restarts; two of them sit near the degenerate mixture with mean q_hat so
// the nested null is always reachable.
MixedFit fit_mixed_ztg(const MixedZtgLikelihood& like, double q_hat) {
    constexpr double kBound = 18.4;  // s, b within [1e-8, 1e8]
    const double qc = std::clamp(q_hat, 0.01, 0.99);
    const std::array<std::pair<double, double>, 10> starts = {{
        {1.0, 1.0},
        {0.5, 0.5},
        {2.0, 2.0},
        {1.0, 3.0},
        {3.0, 1.0},
        {0.5, 2.0},
        {2.0, 0.5},
        {5.0, 5.0},
        {50.0 * qc, 50.0 * (1.0 - qc)},
        {500.0 * qc, 500.0 * (1.0 - qc)},
    }};
    MixedFit best;
    for (const auto& [s0, b0] : starts) {
        double cur[2] = {std::log(s0), std::log(b0)};
        double f = like(cur[0], cur[1]);
        double step = 1.0;
        int evals = 0;
        while (step > 1e-7 && evals < 4000) {
            bool improved = false;
            for (int d = 0; d < 2; ++d) {
                for (double sgn : {1.0, -1.0}) {
                    double cand[2] = {cur[0], cur[1]};
                    cand[d] = std::clamp(cand[d] + sgn * step, -kBound, kBound);
                    const double fc = like(cand[0], cand[1]);
                    ++evals;
                    if (fc > f) {
                        cur[0] = cand[0];
                        cur[1] = cand[1];
                        f = fc;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (f > best.log_likelihood) best = {cur[0], cur[1], f};
    }
    if (best.log_likelihood == kNegInf) {
        throw NumericalError("equality_vs_elite_test: mixed-model likelihood was not finite at any restart");
    }
    return best;
}

struct LrFit {
    double lr = 0.0;
    MixedFit mixed;
};

LrFit lr_statistic_for(const std::vector<std::int64_t>& counts) {
    std::int64_t sum = 0;
    for (std::int64_t v : counts) sum += v;
    const auto n = static_cast<std::int64_t>(counts.size());
    const double q_hat = static_cast<double>(n) / static_cast<double>(sum);
    const double null_ll = ztg_log_likelihood(q_hat, n, sum);
    MixedZtgLikelihood like{value_counts(counts), n};
    LrFit out;
    out.mixed = fit_mixed_ztg(like, q_hat);
    out.lr = std::max(2.0 * (out.mixed.log_likelihood - null_ll), 0.0);
    return out;
}

}  // namespace

void Dataset::validate() const {
    if (counts.empty()) throw ValidationError("dataset: no counts");
    for (std::int64_t v : counts) {
        if (v < 1) throw ValidationError(fmt::format("dataset: count {} is not positive", v));
    }
}

const std::vector<Dataset>& embedded_datasets() {
    static const std::vector<Dataset> datasets = {
        {"ex1",
         {130, 4, 27, 9, 12, 36, 32, 19, 129, 1, 167, 278, 41, 46, 26, 25, 19, 12, 7, 11, 6, 2},
         "publications per member, Dept. of Probability and Mathematical Statistics, "
         "Charles University (Research Gate, 2017-05-20)"},
        {"ex2",
         {25, 76, 173, 2, 10, 9, 4, 13, 23},
         "publications per member, Dept. of Probability and Mathematical Statistics, "
         "Saint-Petersburg State University (Research Gate, 2017-05-20)"},
        {"ex3",
         {25, 18, 50, 3, 2, 83, 60, 5, 37, 28, 14, 53, 51, 19, 47, 2, 37},
         "publications per member, Dept. of Mathematical Analysis, Charles University "
         "(Research Gate, 2017-05-20)"},
        {"ex4",
         {31, 93, 7, 1, 25, 14, 9, 43, 23, 25},
         "publications per member, Dept. of Algebra, Charles University "
         "(Research Gate, 2017-05-20)"},
    };
    return datasets;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot open dataset file '{}'", path));
    Dataset out;
    out.name = std::filesystem::path(path).filename().string();
    out.source = fmt::format("file: {}", path);
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string field = line.substr(0, line.find(','));
        const auto b = field.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = field.find_last_not_of(" \t\r");
        field = field.substr(b, e - b + 1);
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            if (first_data_line) {  // header row
                first_data_line = false;
                continue;
            }
            throw ValidationError(
                fmt::format("dataset '{}' line {}: '{}' is not an integer", path, line_no, field));
        }
        first_data_line = false;
        if (value < 1) {
            throw ValidationError(
                fmt::format("dataset '{}' line {}: count {} is not positive", path, line_no, value));
        }
        out.counts.push_back(value);
    }
    out.validate();
    return out;
}

Dataset resolve_dataset(const std::string& name_or_path) {
    for (const Dataset& d : embedded_datasets()) {
        if (d.name == name_or_path) return d;
    }
    return load_dataset(name_or_path);
}

double ecdf(const Dataset& data, std::int64_t x) {
    data.validate();
    std::int64_t c = 0;
    for (std::int64_t v : data.counts) c += v <= x ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(data.counts.size());
}

SurvivalCurve neg_log_survival(const Dataset& data) {
    data.validate();
    std::vector<std::int64_t> sorted = data.counts;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    SurvivalCurve curve;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        if (j < sorted.size()) {  // maximum excluded: 1 - F = 0 there
            curve.points.push_back(
                {sorted[i], -std::log((n - static_cast<double>(j)) / n)});
        }
        i = j;
    }
    if (curve.points.empty()) {
        throw ValidationError("neg_log_survival: all values identical; curve is degenerate");
    }
    return curve;
}

CurveFit linear_fit(const SurvivalCurve& curve, std::int64_t x_threshold) {
    std::vector<double> xs, ys;
    for (const SurvivalPoint& p : curve.points) {
        if (p.x <= x_threshold) {
            xs.push_back(static_cast<double>(p.x));
            ys.push_back(p.y);
        }
    }
    if (xs.size() < 3) {
        throw ValidationError(fmt::format(
            "linear_fit: {} points at x <= {}; need at least 3", xs.size(), x_threshold));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    CurveFit fit;
    fit.x_threshold = x_threshold;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

GeometricFit geometric_mle(const Dataset& data) {
    data.validate();
    std::int64_t sum = 0;
    for (std::int64_t v : data.counts) sum += v;
    const auto n = static_cast<std::int64_t>(data.counts.size());
    GeometricFit fit;
    fit.q_hat = static_cast<double>(n) / static_cast<double>(sum);
    fit.log_likelihood = ztg_log_likelihood(fit.q_hat, n, sum);
    return fit;
}

EliteTestResult equality_vs_elite_test(const Dataset& data, int bootstrap_reps,
                                       const RngState& rng) {
    data.validate();
    if (bootstrap_reps < 99) {
        throw ValidationError("equality_vs_elite_test: bootstrap_reps must be >= 99");
    }
    const LrFit observed = lr_statistic_for(data.counts);
    const double q_hat = geometric_mle(data).q_hat;
    const auto n = static_cast<std::int64_t>(data.counts.size());

    std::int64_t exceed = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : exceed)
#endif
    for (int r = 0; r < bootstrap_reps; ++r) {
        RngState sub = rng.substream(static_cast<std::uint64_t>(r));
        const std::vector<std::int64_t> rep = sample_ztg(sub, q_hat, n);
        if (lr_statistic_for(rep).lr >= observed.lr) ++exceed;
    }

    EliteTestResult out;
    out.lr_statistic = observed.lr;
    out.p_value = static_cast<double>(exceed + 1) / static_cast<double>(bootstrap_reps + 1);
    out.elite_fit = models::BetaLike{std::exp(observed.mixed.log_s), std::exp(observed.mixed.log_b)};
    return out;
}

std::vector<std::int64_t> sample_ztg(RngState& rng, double q, std::int64_t n) {
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("sample_ztg: q must be in (0, 1]");
    if (n < 0) throw ValidationError("sample_ztg: n must be >= 0");
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = 1 + sampling::sample_geometric(rng, q);
    return out;
}

std::vector<std::int64_t> sample_ztg_mixture(RngState& rng, const models::MixingDistribution& xi,
                                             std::int64_t n) {
    models::validate(xi);
    if (n < 0) throw ValidationError("sample_ztg_mixture: n must be >= 0");
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (auto& v : out) {
        const double q = sampling::sample_mixing(rng, xi);
        v = 1 + sampling::sample_geometric(rng, std::max(q, 1e-12));
    }
    return out;
}

}  // namespace citesim::inference
