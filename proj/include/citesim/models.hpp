#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "citesim/errors.hpp"
#include "citesim/power_series.hpp"

namespace citesim::models {

// ---------------------------------------------------------------------------
// Parameter records. validate() throws ValidationError naming the field.
// ---------------------------------------------------------------------------

// P(k) = q (1-q)^k on k >= 0.
struct GeometricParams {
    double q = 0.5;
    void validate() const;
};

// Geometric conditioned on k < m: P(k) = q (1-q)^k / (1 - (1-q)^m).
struct TruncatedGeometricParams {
    double q = 0.5;
    std::int64_t m = 1;
    void validate() const;
};

// Per-paper citations: P(0) = a, and for k >= 1
// P(k) = (1-a) (p/k) prod_{j=1}^{k-1} (1 - p/j);
// p.g.f. 1 - (1-a)(1-z)^p. The k >= 1 branch is a Sibuya(p) law, i.e. the
// stopping time of the hazard process that halts at k with probability p/k.
// Mean is finite only when p = 1 (tail index p).
struct CitationParams {
    double a = 0.0;
    double p = 1.0;
    void validate() const;
};

// Citations of one author: a geometric number of papers, each cited
// independently per CitationParams. p.g.f. Q(C(z)) = q / (q + (1-q)(1-a)(1-z)^p)
// with Q geometric and C the per-paper p.g.f.
struct AuthorModelParams {
    double a = 0.0;
    double p = 1.0;
    double q = 0.5;
    void validate() const;
};

// Citations of a field: a Poisson(lambda) number of authors. p.g.f.
// exp{-lambda (1 - A(z))} with A the author-level p.g.f. above.
struct FieldModelParams {
    double lambda = 1.0;
    double a = 0.0;
    double p = 1.0;
    double q = 0.5;
    void validate() const;
};

// exp{-lambda ((1-q)(1-z) / (1 - (1-q)z))^gamma} for q < 1; at q = 1 the
// geometric layer is absent and the p.g.f. is exp{-lambda (1-z)^gamma}
// (Poisson(lambda) at gamma = 1). gamma in (0,1) gives a power tail of
// index gamma; gamma = 1, q < 1 gives an exponential tail of rate -log(1-q).
struct DiscreteStableParams {
    double lambda = 1.0;
    double gamma = 1.0;
    double q = 1.0;
    void validate() const;
};

// The normalizing family ((1-u) + (u+q-1)z) / (1 - u(1-q) - (1-q)(1-u)z),
// u in (0,1): composing it into the discrete stable p.g.f. raises that
// p.g.f. to the power u^gamma.
struct NormalizerParams {
    double u = 0.5;
    double q = 0.5;
    void validate() const;
};

// Mixing law for the per-author geometric parameter q.
struct Atom {
    double q = 0.5;
    double weight = 1.0;
};

struct AtomMixture {
    std::vector<Atom> atoms;
    void validate() const;
};

// Density proportional to q^{s-1} (1-q)^{b-1} on (0,1).
struct BetaLike {
    double s = 1.0;
    double b = 1.0;
    void validate() const;
};

using MixingDistribution = std::variant<AtomMixture, BetaLike>;

void validate(const MixingDistribution& xi);

// Field-level model in which each author draws her own q from xi and each
// paper's citations follow Sibuya(gamma). p.g.f.
// exp{-lambda (1 - int Q_q(C_gamma(z)) dXi(q))}, C_gamma(z) = 1 - (1-z)^gamma.
struct EliteModelParams {
    double lambda = 1.0;
    double gamma = 1.0;
    MixingDistribution xi = AtomMixture{{Atom{0.5, 1.0}}};
    void validate() const;
};

using ModelSpec =
    std::variant<GeometricParams, TruncatedGeometricParams, CitationParams,
                 AuthorModelParams, FieldModelParams, DiscreteStableParams,
                 NormalizerParams, EliteModelParams>;

void validate(const ModelSpec& model);
std::string family_name(const ModelSpec& model);

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// Closed-form p.g.f. value at z in [0,1]; exactly 1 at z = 1. Elite mixtures
// integrate the atom sum exactly or BetaLike by adaptive quadrature to
// absolute tolerance 1e-10.
double pgf_eval(const ModelSpec& model, double z);

// pmf[k] for k = 0..max_k, extracted through the series engine (order
// max_k). Negative coefficients with magnitude <= 1e-12 are clamped to 0;
// anything more negative, or a partial sum above 1 + 1e-9, raises
// NumericalError.
std::vector<double> pmf(const ModelSpec& model, int max_k);

// The product-form citation pmf, evaluated directly (no series).
double citation_pmf_closed_form(const CitationParams& params, std::int64_t k);

// Direct truncated-geometric pmf.
double truncated_geometric_pmf(const TruncatedGeometricParams& params, std::int64_t k);

// Exact log-pmf of the gamma = 1, q < 1 discrete stable law through the
// rescaled recurrence in w = (1-q)z, usable far below double underflow of
// the pmf itself. Returns log P(k) for k = 0..max_k.
std::vector<double> discrete_stable_log_pmf(const DiscreteStableParams& params, int max_k);

// k-th factorial moment of the mixed geometric defined by xi:
// k! * int ((1-q)/q)^k dXi(q). Atom mixtures are exact. BetaLike mixtures
// follow the epsilon-sweep: the integral over [eps, 1] is evaluated for
// eps = 1e-2 .. 1e-8 and flagged infinite when it grows by more than a
// factor of 2 across the last two decades; finite values are k! * I(1e-8)
// (truncation error O(eps^{s-k})).
struct FactorialMoment {
    double value = 0.0;
    bool is_infinite = false;
};
FactorialMoment factorial_moment(const MixingDistribution& xi, int k);

// Evaluates the normalizing p.g.f. at z in [0,1].
double stability_transform(const NormalizerParams& params, double z);

// Normalizer pmf in closed form: P(0) = (1-u)/(1-u(1-q)),
// P(k) = u q^2 D^{k-1} / C^{k+1} with C = 1-u(1-q), D = (1-q)(1-u).
double normalizer_pmf(const NormalizerParams& params, std::int64_t k);

// Mode, median and truncated means of a pmf. Checkpoints are
// {10, 100, 1000, max_k} clipped to max_k. Throws NumericalError
// ("median not reached ...") when mass up to max_k stays below 0.5.
struct SummaryStats {
    std::int64_t mode = 0;
    std::int64_t median = 0;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> partial_means;
};
SummaryStats summary_stats(const ModelSpec& model, int max_k);
SummaryStats summary_stats_from_pmf(const std::vector<double>& pmf);

}  // namespace citesim::models
