#include "citesim/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

namespace citesim::models {

using series::PowerSeries;

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

double lbeta(double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature with endpoint-taming power substitutions.
// ---------------------------------------------------------------------------

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    // Roundoff floor: on large integrands the absolute tolerance is
    // unreachable, so accept once the refinement is relatively converged.
    if (std::abs(delta) <= 15.0 * tol ||
        std::abs(delta) <= 1e-13 * std::abs(left + right)) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) throw NumericalError("adaptive quadrature did not converge");
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

int taming_power(double exponent_param) {
    // q = c * t^m turns a q^{s-1} density factor into t^{m s - 1}; pick m
    // so the exponent is at least 1.
    const int m = static_cast<int>(std::ceil(2.0 / exponent_param));
    return std::max(2, m);
}

// Integral of g(q) dXi(q) over (lo, 1) for a BetaLike xi, with power
// substitutions at whichever endpoints are singular. lo = 0 integrates the
// full mixing law.
double beta_mixture_integral(const BetaLike& xi,
                             const std::function<double(double)>& g, double lo,
                             double tol) {
    const double norm = lbeta(xi.s, xi.b);
    auto density = [&](double q) {
        return std::exp((xi.s - 1.0) * std::log(q) +
                        (xi.b - 1.0) * std::log1p(-q) - norm);
    };
    const double split = 0.5;
    double total = 0.0;
    // Left piece: q in (lo, 1/2], q = lo + (1/2 - lo) t^ms.
    if (lo < split) {
        const int ms = lo == 0.0 ? taming_power(xi.s) : 2;
        const double span = split - lo;
        auto f = [&](double t) {
            if (t <= 0.0) return 0.0;
            const double tm = std::pow(t, ms - 1);
            const double q = lo + span * tm * t;
            if (q <= 0.0 || q >= 1.0) return 0.0;
            return g(q) * density(q) * span * ms * tm;
        };
        total += adaptive_simpson(f, 0.0, 1.0, 0.5 * tol);
    }
    // Right piece: q in [1/2, 1), 1 - q = (1/2) v^mb.
    {
        const int mb = taming_power(xi.b);
        auto f = [&](double v) {
            if (v <= 0.0) return 0.0;
            const double vm = std::pow(v, mb - 1);
            const double q = 1.0 - split * vm * v;
            if (q <= 0.0 || q >= 1.0) return 0.0;
            return g(q) * density(q) * split * mb * vm;
        };
        total += adaptive_simpson(f, 0.0, 1.0, 0.5 * tol);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Series builders. All routes go through the generic engine ops so that the
// closed-form checks in the tests exercise an independent code path.
// ---------------------------------------------------------------------------

PowerSeries one_minus_cz(double c, int order) {
    PowerSeries s = PowerSeries::zero(order);
    s[0] = 1.0;
    if (order >= 1) s[1] = -c;
    return s;
}

PowerSeries citation_series(const CitationParams& mp, int order) {
    PowerSeries b = series::ps_real_pow(one_minus_cz(1.0, order), mp.p);
    PowerSeries out = PowerSeries::zero(order);
    out[0] = 1.0 - (1.0 - mp.a) * b[0];
    for (int k = 1; k <= order; ++k) out[k] = -(1.0 - mp.a) * b[k];
    return out;
}

// q / (q + (1-q)(1-a)(1-z)^p)
PowerSeries author_series(const AuthorModelParams& mp, int order) {
    PowerSeries d = series::ps_real_pow(one_minus_cz(1.0, order), mp.p);
    const double scale = (1.0 - mp.q) * (1.0 - mp.a);
    for (int k = 0; k <= order; ++k) d[k] *= scale;
    d[0] += mp.q;
    PowerSeries inv = series::ps_inv(d);
    for (int k = 0; k <= order; ++k) inv[k] *= mp.q;
    return inv;
}

PowerSeries poisson_compound(const PowerSeries& unit, double lambda) {
    PowerSeries e = unit;
    e[0] -= 1.0;
    for (int k = 0; k <= e.order(); ++k) e[k] *= lambda;
    return series::ps_exp(e);
}

PowerSeries field_series(const FieldModelParams& mp, int order) {
    return poisson_compound(author_series({mp.a, mp.p, mp.q}, order), mp.lambda);
}

PowerSeries discrete_stable_series(const DiscreteStableParams& mp, int order) {
    PowerSeries e = series::ps_real_pow(one_minus_cz(1.0, order), mp.gamma);
    double scale = -mp.lambda;
    if (mp.q < 1.0) {
        PowerSeries v = series::ps_real_pow(one_minus_cz(1.0 - mp.q, order), -mp.gamma);
        e = series::ps_mul(e, v);
        scale *= std::pow(1.0 - mp.q, mp.gamma);
    }
    for (int k = 0; k <= order; ++k) e[k] *= scale;
    return series::ps_exp(e);
}

struct EliteAtoms {
    std::vector<Atom> atoms;  // normalized weights
};

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = 0.5 * (1.0 - t);
        w[static_cast<size_t>(i)] = 1.0 / ((1.0 - t * t) * pp * pp);
    }
}

// Discretizes a BetaLike law into a normalized atom mixture, using the same
// endpoint substitutions as the quadrature. Good to ~1e-10 for smooth
// integrands once both pieces carry 128 nodes.
EliteAtoms discretize(const BetaLike& xi) {
    const int n = 128;
    std::vector<double> gx, gw;
    gauss_legendre_01(n, gx, gw);
    const double norm = lbeta(xi.s, xi.b);
    auto density = [&](double q) {
        return std::exp((xi.s - 1.0) * std::log(q) +
                        (xi.b - 1.0) * std::log1p(-q) - norm);
    };
    EliteAtoms out;
    const int ms = taming_power(xi.s), mb = taming_power(xi.b);
    for (int i = 0; i < n; ++i) {
        const double t = gx[static_cast<size_t>(i)];
        const double q = 0.5 * std::pow(t, ms);
        if (q > 0.0) {
            out.atoms.push_back(
                {q, gw[static_cast<size_t>(i)] * density(q) * 0.5 * ms * std::pow(t, ms - 1)});
        }
    }
    for (int i = 0; i < n; ++i) {
        const double v = gx[static_cast<size_t>(i)];
        const double q = 1.0 - 0.5 * std::pow(v, mb);
        if (q < 1.0) {
            out.atoms.push_back(
                {q, gw[static_cast<size_t>(i)] * density(q) * 0.5 * mb * std::pow(v, mb - 1)});
        }
    }
    double total = 0.0;
    for (const Atom& a : out.atoms) total += a.weight;
    for (Atom& a : out.atoms) a.weight /= total;
    return out;
}

PowerSeries elite_series(const EliteModelParams& mp, int order) {
    std::vector<Atom> atoms;
    if (const auto* am = std::get_if<AtomMixture>(&mp.xi)) {
        atoms = am->atoms;
    } else {
        atoms = discretize(std::get<BetaLike>(mp.xi)).atoms;
    }
    PowerSeries mix = PowerSeries::zero(order);
    for (const Atom& atom : atoms) {
        PowerSeries a = author_series({0.0, mp.gamma, atom.q}, order);
        for (int k = 0; k <= order; ++k) mix[k] += atom.weight * a[k];
    }
    return poisson_compound(mix, mp.lambda);
}

std::vector<double> finalize_pmf(const PowerSeries& s) {
    std::vector<double> out(s.coeffs());
    double sum = 0.0, comp = 0.0;
    for (size_t k = 0; k < out.size(); ++k) {
        double c = out[k];
        if (c < -1e-12) {
            throw NumericalError(fmt::format(
                "pmf coefficient {} is {:.3e}; below the -1e-12 clamp threshold", k, c));
        }
        if (c < 0.0) c = 0.0;
        out[k] = c;
        const double t = sum + c;
        comp += (sum - t) + c;
        sum = t;
    }
    if (sum + comp > 1.0 + 1e-9) {
        throw NumericalError(fmt::format("pmf mass {:.17g} exceeds 1 + 1e-9", sum + comp));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

void GeometricParams::validate() const {
    require(q > 0.0 && q <= 1.0, "geometric: q must be in (0, 1]");
}

void TruncatedGeometricParams::validate() const {
    require(q > 0.0 && q <= 1.0, "truncated geometric: q must be in (0, 1]");
    require(m >= 1, "truncated geometric: m must be >= 1");
}

void CitationParams::validate() const {
    require(a >= 0.0 && a <= 1.0, "citation: a must be in [0, 1]");
    require(p > 0.0 && p <= 1.0, "citation: p must be in (0, 1]");
}

void AuthorModelParams::validate() const {
    CitationParams{a, p}.validate();
    require(q > 0.0 && q <= 1.0, "author: q must be in (0, 1]");
}

void FieldModelParams::validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), "field: lambda must be positive");
    AuthorModelParams{a, p, q}.validate();
}

void DiscreteStableParams::validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), "discrete stable: lambda must be positive");
    require(gamma > 0.0 && gamma <= 1.0, "discrete stable: gamma must be in (0, 1]");
    require(q > 0.0 && q <= 1.0, "discrete stable: q must be in (0, 1]");
}

void NormalizerParams::validate() const {
    require(u > 0.0 && u < 1.0, "normalizer: u must be in (0, 1)");
    require(q > 0.0 && q <= 1.0, "normalizer: q must be in (0, 1]");
}

void AtomMixture::validate() const {
    require(!atoms.empty(), "mixing distribution: needs at least one atom");
    double total = 0.0;
    for (const Atom& a : atoms) {
        require(a.q > 0.0 && a.q <= 1.0, "mixing distribution: atom q must be in (0, 1]");
        require(a.weight > 0.0, "mixing distribution: atom weight must be positive");
        total += a.weight;
    }
    require(std::abs(total - 1.0) <= 1e-9, "mixing distribution: atom weights must sum to 1");
}

void BetaLike::validate() const {
    require(s > 0.0 && std::isfinite(s), "mixing distribution: s must be positive");
    require(b > 0.0 && std::isfinite(b), "mixing distribution: b must be positive");
}

void validate(const MixingDistribution& xi) {
    std::visit([](const auto& v) { v.validate(); }, xi);
}

void EliteModelParams::validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), "elite: lambda must be positive");
    require(gamma > 0.0 && gamma <= 1.0, "elite: gamma must be in (0, 1]");
    models::validate(xi);
}

void validate(const ModelSpec& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

std::string family_name(const ModelSpec& model) {
    struct Namer {
        std::string operator()(const GeometricParams&) const { return "geometric"; }
        std::string operator()(const TruncatedGeometricParams&) const { return "truncated_geometric"; }
        std::string operator()(const CitationParams&) const { return "citation"; }
        std::string operator()(const AuthorModelParams&) const { return "author"; }
        std::string operator()(const FieldModelParams&) const { return "field"; }
        std::string operator()(const DiscreteStableParams&) const { return "discrete_stable"; }
        std::string operator()(const NormalizerParams&) const { return "normalizer"; }
        std::string operator()(const EliteModelParams&) const { return "elite"; }
    };
    return std::visit(Namer{}, model);
}

// ---------------------------------------------------------------------------
// pgf_eval.
// ---------------------------------------------------------------------------

namespace {

double author_pgf(const AuthorModelParams& mp, double z) {
    const double tail = (1.0 - mp.q) * (1.0 - mp.a) * std::pow(1.0 - z, mp.p);
    return mp.q / (mp.q + tail);
}

double mixture_one_minus_pgf(const MixingDistribution& xi, double w) {
    // int (1-q)(1-w) / (1 - (1-q) w) dXi(q)
    auto g = [w](double q) { return (1.0 - q) * (1.0 - w) / (1.0 - (1.0 - q) * w); };
    if (const auto* am = std::get_if<AtomMixture>(&xi)) {
        double acc = 0.0;
        for (const Atom& a : am->atoms) acc += a.weight * g(a.q);
        return acc;
    }
    return beta_mixture_integral(std::get<BetaLike>(xi), g, 0.0, 1e-10);
}

struct PgfVisitor {
    double z;

    double operator()(const GeometricParams& m) const {
        return m.q / (1.0 - (1.0 - m.q) * z);
    }
    double operator()(const TruncatedGeometricParams& m) const {
        const double r = 1.0 - m.q;
        const double rm = std::pow(r, static_cast<double>(m.m));
        return m.q * (1.0 - rm * std::pow(z, static_cast<double>(m.m))) /
               ((1.0 - rm) * (1.0 - r * z));
    }
    double operator()(const CitationParams& m) const {
        return 1.0 - (1.0 - m.a) * std::pow(1.0 - z, m.p);
    }
    double operator()(const AuthorModelParams& m) const { return author_pgf(m, z); }
    double operator()(const FieldModelParams& m) const {
        return std::exp(m.lambda * (author_pgf({m.a, m.p, m.q}, z) - 1.0));
    }
    double operator()(const DiscreteStableParams& m) const {
        const double base = m.q < 1.0
                                ? ((1.0 - m.q) * (1.0 - z)) / (1.0 - (1.0 - m.q) * z)
                                : 1.0 - z;
        return std::exp(-m.lambda * std::pow(base, m.gamma));
    }
    double operator()(const NormalizerParams& m) const {
        return stability_transform(m, z);
    }
    double operator()(const EliteModelParams& m) const {
        const double w = 1.0 - std::pow(1.0 - z, m.gamma);
        return std::exp(-m.lambda * mixture_one_minus_pgf(m.xi, w));
    }
};

}  // namespace

double pgf_eval(const ModelSpec& model, double z) {
    validate(model);
    if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("pgf_eval: z must be in [0, 1]");
    if (z == 1.0) return 1.0;
    return std::visit(PgfVisitor{z}, model);
}

// ---------------------------------------------------------------------------
// pmf.
// ---------------------------------------------------------------------------

namespace {

struct PmfVisitor {
    int order;

    PowerSeries operator()(const GeometricParams& m) const {
        PowerSeries s = PowerSeries::zero(order);
        double w = m.q;
        for (int k = 0; k <= order; ++k) {
            s[k] = w;
            w *= 1.0 - m.q;
        }
        return s;
    }
    PowerSeries operator()(const TruncatedGeometricParams& m) const {
        PowerSeries s = PowerSeries::zero(order);
        for (std::int64_t k = 0; k <= order; ++k) {
            s[static_cast<int>(k)] = truncated_geometric_pmf(m, k);
        }
        return s;
    }
    PowerSeries operator()(const CitationParams& m) const {
        return citation_series(m, order);
    }
    PowerSeries operator()(const AuthorModelParams& m) const {
        return author_series(m, order);
    }
    PowerSeries operator()(const FieldModelParams& m) const {
        return field_series(m, order);
    }
    PowerSeries operator()(const DiscreteStableParams& m) const {
        return discrete_stable_series(m, order);
    }
    PowerSeries operator()(const NormalizerParams& m) const {
        PowerSeries s = PowerSeries::zero(order);
        for (std::int64_t k = 0; k <= order; ++k) {
            s[static_cast<int>(k)] = normalizer_pmf(m, k);
        }
        return s;
    }
    PowerSeries operator()(const EliteModelParams& m) const {
        return elite_series(m, order);
    }
};

}  // namespace

std::vector<double> pmf(const ModelSpec& model, int max_k) {
    validate(model);
    if (max_k < 0) throw ValidationError("pmf: max_k must be >= 0");
    return finalize_pmf(std::visit(PmfVisitor{max_k}, model));
}

double citation_pmf_closed_form(const CitationParams& params, std::int64_t k) {
    params.validate();
    if (k < 0) throw ValidationError("citation pmf: k must be >= 0");
    if (k == 0) return params.a;
    double prod = 1.0;
    for (std::int64_t j = 1; j < k; ++j) prod *= 1.0 - params.p / static_cast<double>(j);
    return (1.0 - params.a) * (params.p / static_cast<double>(k)) * prod;
}

double truncated_geometric_pmf(const TruncatedGeometricParams& params, std::int64_t k) {
    params.validate();
    if (k < 0) throw ValidationError("truncated geometric pmf: k must be >= 0");
    if (k >= params.m) return 0.0;
    const double r = 1.0 - params.q;
    return params.q * std::pow(r, static_cast<double>(k)) /
           (1.0 - std::pow(r, static_cast<double>(params.m)));
}

std::vector<double> discrete_stable_log_pmf(const DiscreteStableParams& params, int max_k) {
    params.validate();
    if (params.gamma != 1.0 || params.q >= 1.0) {
        throw ValidationError("discrete_stable_log_pmf: requires gamma == 1 and q < 1");
    }
    // With w = (1-q) z the p.g.f. is exp(-lambda + lambda q / (1 - w)), so
    // d_k = [w^k] exp(lambda q / (1 - w)) * e^{-lambda} obeys an all-positive
    // recurrence and stays in double range; log P(k) = log d_k + k log(1-q).
    const double lq = params.lambda * params.q;
    std::vector<double> d(static_cast<size_t>(max_k) + 1);
    d[0] = std::exp(-params.lambda * (1.0 - params.q));
    for (int k = 1; k <= max_k; ++k) {
        double acc = 0.0, comp = 0.0;
        for (int j = 1; j <= k; ++j) {
            const double term = static_cast<double>(j) * d[static_cast<size_t>(k - j)];
            const double t = acc + term;
            comp += (acc - t) + term;
            acc = t;
        }
        d[static_cast<size_t>(k)] = lq * (acc + comp) / static_cast<double>(k);
        if (!std::isfinite(d[static_cast<size_t>(k)])) {
            throw NumericalError("discrete_stable_log_pmf: scaled coefficient overflow");
        }
    }
    const double logr = std::log1p(-params.q);
    std::vector<double> out(static_cast<size_t>(max_k) + 1);
    for (int k = 0; k <= max_k; ++k) {
        out[static_cast<size_t>(k)] = std::log(d[static_cast<size_t>(k)]) + static_cast<double>(k) * logr;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Factorial moments, stability transform, summaries.
// ---------------------------------------------------------------------------

FactorialMoment factorial_moment(const MixingDistribution& xi, int k) {
    validate(xi);
    if (k < 1) throw ValidationError("factorial_moment: k must be >= 1");
    double kfact = 1.0;
    for (int j = 2; j <= k; ++j) kfact *= static_cast<double>(j);
    auto g = [k](double q) { return std::pow((1.0 - q) / q, static_cast<double>(k)); };
    if (const auto* am = std::get_if<AtomMixture>(&xi)) {
        double acc = 0.0;
        for (const Atom& a : am->atoms) acc += a.weight * g(a.q);
        return {kfact * acc, false};
    }
    const BetaLike& bl = std::get<BetaLike>(xi);
    // Integrals over [eps, 1]; divergence shows up as growth of the sweep.
    std::vector<double> sweep;
    for (int e = 2; e <= 8; ++e) {
        sweep.push_back(beta_mixture_integral(bl, g, std::pow(10.0, -e), 1e-10));
    }
    const double last = sweep.back();
    const double two_decades_back = sweep[sweep.size() - 3];
    if (last > 2.0 * two_decades_back) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {kfact * last, false};
}

double stability_transform(const NormalizerParams& params, double z) {
    params.validate();
    if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("stability_transform: z must be in [0, 1]");
    if (z == 1.0) return 1.0;
    const double r = 1.0 - params.q;
    return ((1.0 - params.u) + (params.u + params.q - 1.0) * z) /
           (1.0 - params.u * r - r * (1.0 - params.u) * z);
}

double normalizer_pmf(const NormalizerParams& params, std::int64_t k) {
    params.validate();
    if (k < 0) throw ValidationError("normalizer pmf: k must be >= 0");
    const double r = 1.0 - params.q;
    const double c = 1.0 - params.u * r;
    if (k == 0) return (1.0 - params.u) / c;
    const double d = r * (1.0 - params.u);
    return params.u * params.q * params.q * std::pow(d, static_cast<double>(k - 1)) /
           std::pow(c, static_cast<double>(k + 1));
}

SummaryStats summary_stats_from_pmf(const std::vector<double>& pmf) {
    if (pmf.empty()) throw ValidationError("summary_stats: empty pmf");
    const int max_k = static_cast<int>(pmf.size()) - 1;
    SummaryStats st;
    double best = -1.0;
    for (int k = 0; k <= max_k; ++k) {
        if (pmf[static_cast<size_t>(k)] > best) {
            best = pmf[static_cast<size_t>(k)];
            st.mode = k;
        }
    }
    std::int64_t median = -1;
    double cum = 0.0, comp = 0.0;
    for (int k = 0; k <= max_k; ++k) {
        const double x = pmf[static_cast<size_t>(k)];
        const double t = cum + x;
        comp += (cum - t) + x;
        cum = t;
        if (median < 0 && cum + comp >= 0.5) median = k;
    }
    if (median < 0) {
        throw NumericalError(fmt::format(
            "median not reached within max_k = {} (mass {:.6f})", max_k, cum + comp));
    }
    st.median = median;
    for (std::int64_t cp : {std::int64_t{10}, std::int64_t{100}, std::int64_t{1000},
                            static_cast<std::int64_t>(max_k)}) {
        st.checkpoints.push_back(std::min<std::int64_t>(cp, max_k));
    }
    for (std::int64_t cp : st.checkpoints) {
        double acc = 0.0, c2 = 0.0;
        for (std::int64_t k = 1; k <= cp; ++k) {
            const double x = static_cast<double>(k) * pmf[static_cast<size_t>(k)];
            const double t = acc + x;
            c2 += (acc - t) + x;
            acc = t;
        }
        st.partial_means.push_back(acc + c2);
    }
    return st;
}

SummaryStats summary_stats(const ModelSpec& model, int max_k) {
    return summary_stats_from_pmf(pmf(model, max_k));
}

}  // namespace citesim::models
