#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citesim/models.hpp"
#include "citesim/rng.hpp"

namespace citesim::inference {

struct Dataset {
    std::string name;
    std::vector<std::int64_t> counts;  // positive publication counts
    std::string source;

    void validate() const;
};

// The four built-in publication-count datasets, names "ex1".."ex4".
const std::vector<Dataset>& embedded_datasets();

// Plain text or CSV: one positive integer per row (first field), optional
// single header row.
Dataset load_dataset(const std::string& path);

// "ex1".."ex4" resolve to the embedded datasets, anything else is a path.
Dataset resolve_dataset(const std::string& name_or_path);

// Empirical CDF: fraction of counts <= x.
double ecdf(const Dataset& data, std::int64_t x);

struct CurveFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::int64_t x_threshold = 0;
};

struct SurvivalPoint {
    std::int64_t x = 0;
    double y = 0.0;  // -log(1 - F(x))
};

struct SurvivalCurve {
    std::vector<SurvivalPoint> points;  // x strictly increasing, y non-decreasing
    std::optional<CurveFit> fit;
};

// One point per distinct data value except the maximum (where 1 - F = 0).
// Throws on fewer than two distinct values.
SurvivalCurve neg_log_survival(const Dataset& data);

// Ordinary least squares over the curve points with x <= x_threshold.
// Needs at least three such points.
CurveFit linear_fit(const SurvivalCurve& curve, std::int64_t x_threshold);

struct GeometricFit {
    double q_hat = 0.0;
    double log_likelihood = 0.0;
};

// Zero-truncated geometric P(k) = q(1-q)^{k-1} on k >= 1; q_hat = 1/mean.
GeometricFit geometric_mle(const Dataset& data);

struct EliteTestResult {
    double lr_statistic = 0.0;
    double p_value = 1.0;
    models::MixingDistribution elite_fit{models::BetaLike{}};
};

// Likelihood-ratio test of a degenerate mixing law (every author shares one
// q) against a BetaLike mixture, with a parametric bootstrap under the
// fitted null. Identical result for a fixed rng regardless of thread count.
EliteTestResult equality_vs_elite_test(const Dataset& data, int bootstrap_reps,
                                       const RngState& rng);

// n zero-truncated geometric draws (support k >= 1).
std::vector<std::int64_t> sample_ztg(RngState& rng, double q, std::int64_t n);

// Each draw picks its own q from the mixing law first.
std::vector<std::int64_t> sample_ztg_mixture(RngState& rng, const models::MixingDistribution& xi,
                                             std::int64_t n);

}  // namespace citesim::inference
