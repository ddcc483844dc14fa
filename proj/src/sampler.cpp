#include "citesim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "citesim/errors.hpp"

namespace citesim::sampling {

namespace {

constexpr std::int64_t kBatchChunk = 1024;

std::int64_t sample_sibuya(RngState& rng, double gamma, bool& capped) {
    return sample_hazard_walk(rng, gamma, capped);
}

// Stopped sum of n draws from `draw`.
template <typename Draw>
std::int64_t sum_of(std::int64_t n, Draw&& draw) {
    std::int64_t acc = 0;
    for (std::int64_t i = 0; i < n; ++i) acc += draw();
    return acc;
}

std::int64_t sample_truncated_geometric(RngState& rng, const models::TruncatedGeometricParams& p) {
    // CDF walk; exact and O(k).
    const double target = rng.uniform01() * (1.0 - std::pow(1.0 - p.q, static_cast<double>(p.m)));
    double cum = 0.0, w = p.q;
    std::int64_t k = 0;
    while (k < p.m - 1 && cum + w <= target) {
        cum += w;
        w *= 1.0 - p.q;
        ++k;
    }
    return k;
}

std::int64_t sample_normalizer(RngState& rng, const models::NormalizerParams& p) {
    // Zero-inflated geometric: P(0) = (1-u)/C and a q/C geometric tail.
    const double c = 1.0 - p.u * (1.0 - p.q);
    if (rng.uniform01() < (1.0 - p.u) / c) return 0;
    return 1 + sample_geometric(rng, p.q / c);
}

std::int64_t sample_discrete_stable(RngState& rng, const models::DiscreteStableParams& p,
                                    std::int64_t& cap_hits) {
    // Poisson-many Sibuya(gamma) clusters; for q < 1 every cluster member is
    // a 1-shifted geometric(q) count, matching
    //   exp(-lambda (1-q)^gamma ((1-z)/(1-(1-q)z))^gamma).
    bool capped = false;
    if (p.q == 1.0) {
        const std::int64_t n = sample_poisson(rng, p.lambda);
        std::int64_t acc = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            acc += sample_sibuya(rng, p.gamma, capped);
            if (capped) ++cap_hits;
            capped = false;
        }
        return acc;
    }
    const std::int64_t n = sample_poisson(rng, p.lambda * std::pow(1.0 - p.q, p.gamma));
    std::int64_t acc = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t cluster = sample_sibuya(rng, p.gamma, capped);
        if (capped) ++cap_hits;
        capped = false;
        for (std::int64_t j = 0; j < cluster; ++j) acc += 1 + sample_geometric(rng, p.q);
    }
    return acc;
}

std::int64_t sample_field_like(RngState& rng, double lambda,
                               const models::AuthorModelParams& author, std::int64_t& cap_hits) {
    const std::int64_t authors = sample_poisson(rng, lambda);
    std::int64_t acc = 0;
    for (std::int64_t j = 0; j < authors; ++j) acc += sample_author(rng, author, cap_hits);
    return acc;
}

std::int64_t sample_elite(RngState& rng, const models::EliteModelParams& p,
                          std::int64_t& cap_hits) {
    const std::int64_t authors = sample_poisson(rng, p.lambda);
    std::int64_t acc = 0;
    for (std::int64_t j = 0; j < authors; ++j) {
        const double q = sample_mixing(rng, p.xi);
        acc += sample_author(rng, {0.0, p.gamma, q}, cap_hits);
    }
    return acc;
}

struct OnceVisitor {
    RngState& rng;
    std::int64_t& cap_hits;

    std::int64_t operator()(const models::GeometricParams& m) const {
        return sample_geometric(rng, m.q);
    }
    std::int64_t operator()(const models::TruncatedGeometricParams& m) const {
        return sample_truncated_geometric(rng, m);
    }
    std::int64_t operator()(const models::CitationParams& m) const {
        bool capped = false;
        const std::int64_t k = sample_citation(rng, m, capped);
        if (capped) ++cap_hits;
        return k;
    }
    std::int64_t operator()(const models::AuthorModelParams& m) const {
        return sample_author(rng, m, cap_hits);
    }
    std::int64_t operator()(const models::FieldModelParams& m) const {
        return sample_field_like(rng, m.lambda, {m.a, m.p, m.q}, cap_hits);
    }
    std::int64_t operator()(const models::DiscreteStableParams& m) const {
        return sample_discrete_stable(rng, m, cap_hits);
    }
    std::int64_t operator()(const models::NormalizerParams& m) const {
        return sample_normalizer(rng, m);
    }
    std::int64_t operator()(const models::EliteModelParams& m) const {
        return sample_elite(rng, m, cap_hits);
    }
};

BatchResult run_batch(const models::ModelSpec& model, std::int64_t n, std::uint64_t seed,
                      const BatchOptions& options, bool parallel) {
    models::validate(model);
    if (n < 0) throw ValidationError("sample_batch: n must be >= 0");
    if (options.max_k < 0) throw ValidationError("sample_batch: max_k must be >= 0");

    BatchResult out;
    out.n = n;
    out.counts.assign(static_cast<size_t>(options.max_k) + 1, 0);
    if (options.keep_values) out.values.assign(static_cast<size_t>(n), 0);

    const std::int64_t chunks = (n + kBatchChunk - 1) / kBatchChunk;
    const RngState base(seed);

#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
    {
        std::vector<std::int64_t> counts(static_cast<size_t>(options.max_k) + 1, 0);
        std::int64_t beyond = 0, cap_hits = 0;
        std::uint64_t total = 0;

#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
        for (std::int64_t c = 0; c < chunks; ++c) {
            RngState rng = base.substream(static_cast<std::uint64_t>(c));
            const std::int64_t lo = c * kBatchChunk;
            const std::int64_t hi = std::min(n, lo + kBatchChunk);
            for (std::int64_t i = lo; i < hi; ++i) {
                const std::int64_t v = std::visit(OnceVisitor{rng, cap_hits}, model);
                total += static_cast<std::uint64_t>(v);
                if (v <= options.max_k) {
                    ++counts[static_cast<size_t>(v)];
                } else {
                    ++beyond;
                }
                if (options.keep_values) out.values[static_cast<size_t>(i)] = v;
            }
        }

#ifdef _OPENMP
#pragma omp critical(citesim_batch_merge)
#endif
        {
            for (size_t k = 0; k < counts.size(); ++k) out.counts[k] += counts[k];
            out.beyond += beyond;
            out.cap_hits += cap_hits;
            out.total += total;
        }
    }
    return out;
}

}  // namespace

std::int64_t sample_geometric(RngState& rng, double q) {
    std::int64_t k = 0;
    while (rng.uniform01() >= q) ++k;
    return k;
}

std::int64_t sample_hazard_walk(RngState& rng, double p, bool& capped) {
    std::int64_t k = 1;
    while (rng.uniform01() >= p / static_cast<double>(k)) {
        if (++k >= kWalkCap) {
            capped = true;
            return kWalkCap;
        }
    }
    return k;
}

std::int64_t sample_citation(RngState& rng, const models::CitationParams& params, bool& capped) {
    if (rng.uniform01() < params.a) return 0;
    return sample_hazard_walk(rng, params.p, capped);
}

std::int64_t sample_author(RngState& rng, const models::AuthorModelParams& params,
                           std::int64_t& cap_hits) {
    const std::int64_t papers = sample_geometric(rng, params.q);
    const models::CitationParams cp{params.a, params.p};
    return sum_of(papers, [&] {
        bool capped = false;
        const std::int64_t k = sample_citation(rng, cp, capped);
        if (capped) ++cap_hits;
        return k;
    });
}

std::int64_t sample_poisson(RngState& rng, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("sample_poisson: lambda must be finite and >= 0");
    }
    // Arrival counting in log space; immune to exp(-lambda) underflow.
    std::int64_t k = 0;
    double s = -std::log1p(-rng.uniform01());
    while (s <= lambda) {
        ++k;
        s += -std::log1p(-rng.uniform01());
    }
    return k;
}

double sample_beta(RngState& rng, double s, double b) {
    std::gamma_distribution<double> gs(s, 1.0), gb(b, 1.0);
    const double x = gs(rng.engine());
    const double y = gb(rng.engine());
    if (x + y <= 0.0) return 0.5;  // both denormal-zero; vanishing probability
    return x / (x + y);
}

double sample_mixing(RngState& rng, const models::MixingDistribution& xi) {
    if (const auto* am = std::get_if<models::AtomMixture>(&xi)) {
        const double u = rng.uniform01();
        double cum = 0.0;
        for (const models::Atom& a : am->atoms) {
            cum += a.weight;
            if (u < cum) return a.q;
        }
        return am->atoms.back().q;
    }
    const auto& bl = std::get<models::BetaLike>(xi);
    return sample_beta(rng, bl.s, bl.b);
}

std::int64_t sample_once(RngState& rng, const models::ModelSpec& model, std::int64_t& cap_hits) {
    models::validate(model);
    return std::visit(OnceVisitor{rng, cap_hits}, model);
}

std::vector<double> BatchResult::frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    if (n == 0) return f;
    for (size_t k = 0; k < counts.size(); ++k) {
        f[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
    }
    return f;
}

double BatchResult::mean() const {
    if (n == 0) throw ValidationError("BatchResult::mean: empty batch");
    return static_cast<double>(total) / static_cast<double>(n);
}

std::int64_t BatchResult::median() const {
    if (n == 0) throw ValidationError("BatchResult::median: empty batch");
    const std::int64_t half = (n + 1) / 2;
    std::int64_t cum = 0;
    for (size_t k = 0; k < counts.size(); ++k) {
        cum += counts[k];
        if (cum >= half) return static_cast<std::int64_t>(k);
    }
    throw NumericalError("BatchResult::median: median lies beyond the histogram range");
}

BatchResult sample_batch(const models::ModelSpec& model, std::int64_t n, std::uint64_t seed,
                         const BatchOptions& options) {
    return run_batch(model, n, seed, options, options.parallel);
}

BatchResult sample_batch_serial(const models::ModelSpec& model, std::int64_t n,
                                std::uint64_t seed, const BatchOptions& options) {
    return run_batch(model, n, seed, options, false);
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t m = std::min(a.size(), b.size());
    double acc = 0.0;
    for (size_t k = 0; k < m; ++k) acc += std::abs(a[k] - b[k]);
    return 0.5 * acc;
}

}  // namespace citesim::sampling
