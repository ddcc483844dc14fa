#pragma once

#include <cstdint>
#include <vector>

#include "citesim/models.hpp"
#include "citesim/rng.hpp"

namespace citesim::sampling {

// Hazard walks longer than this are truncated; the batch result records how
// often that happened.
inline constexpr std::int64_t kWalkCap = 10'000'000;

// Counts failures before the first success in Bernoulli(q) trials.
std::int64_t sample_geometric(RngState& rng, double q);

// Walk that stops at step k with probability p / k (k = 1, 2, ...). Returns
// kWalkCap and sets `capped` when the walk survives past the cap.
std::int64_t sample_hazard_walk(RngState& rng, double p, bool& capped);

// a-weighted coin for an uncited paper, otherwise a hazard walk.
std::int64_t sample_citation(RngState& rng, const models::CitationParams& params, bool& capped);

// Geometric(q)-many papers, each with citation(a, p) cites.
std::int64_t sample_author(RngState& rng, const models::AuthorModelParams& params,
                           std::int64_t& cap_hits);

std::int64_t sample_poisson(RngState& rng, double lambda);

double sample_beta(RngState& rng, double s, double b);

// One acceptance parameter q drawn from the mixing law.
double sample_mixing(RngState& rng, const models::MixingDistribution& xi);

// One draw from any family. cap_hits increments for every truncated walk
// inside the draw.
std::int64_t sample_once(RngState& rng, const models::ModelSpec& model, std::int64_t& cap_hits);

struct BatchResult {
    std::vector<std::int64_t> counts;  // histogram over 0..max_k
    std::int64_t beyond = 0;           // draws that landed past max_k
    std::int64_t cap_hits = 0;
    std::int64_t n = 0;
    std::uint64_t total = 0;           // sum of all draws
    std::vector<std::int64_t> values;  // per-draw values when keep_values was set

    std::vector<double> frequencies() const;
    double mean() const;
    std::int64_t median() const;  // from the histogram; throws if past max_k
};

struct BatchOptions {
    int max_k = 4096;
    bool keep_values = false;
    bool parallel = true;
};

// Draws n samples. Draw i lives in substream i / kBatchChunk of `seed`, so
// the result is identical for any thread count, and bitwise reproducible.
BatchResult sample_batch(const models::ModelSpec& model, std::int64_t n, std::uint64_t seed,
                         const BatchOptions& options = {});

// Serial twin of sample_batch for the benchmark and for tests.
BatchResult sample_batch_serial(const models::ModelSpec& model, std::int64_t n,
                                std::uint64_t seed, const BatchOptions& options = {});

// 0.5 * sum |a_k - b_k| over the shared index range.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace citesim::sampling
