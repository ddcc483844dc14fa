#include "citesim/power_series.hpp"

#include <algorithm>
#include <cmath>

namespace citesim::series {

namespace {

// Neumaier variant of Kahan summation: the compensation also catches the
// case where the incoming term dominates the running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

void check_finite(const std::vector<double>& c) {
    for (double x : c) {
        if (!std::isfinite(x)) {
            throw ValidationError("power series coefficient is not finite");
        }
    }
}

}  // namespace

PowerSeries::PowerSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw ValidationError("power series needs at least the constant term");
    check_finite(c_);
}

PowerSeries PowerSeries::zero(int order) {
    if (order < 0) throw ValidationError("negative series order");
    return PowerSeries(std::vector<double>(static_cast<size_t>(order) + 1, 0.0));
}

PowerSeries PowerSeries::constant(double value, int order) {
    PowerSeries s = zero(order);
    s[0] = value;
    return s;
}

double PowerSeries::eval(double z) const {
    double acc = 0.0;
    for (size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
    return acc;
}

PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b) {
    const int n = std::min(a.order(), b.order());
    PowerSeries out = PowerSeries::zero(n);
    for (int k = 0; k <= n; ++k) out[k] = a[k] + b[k];
    return out;
}

namespace kernel {

namespace {

inline double conv_coeff(std::span<const double> a, std::span<const double> b,
                         long k) {
    const long na = static_cast<long>(a.size());
    const long nb = static_cast<long>(b.size());
    const long jlo = std::max(0L, k - (nb - 1));
    const long jhi = std::min(k, na - 1);
    CompensatedSum s;
    for (long j = jlo; j <= jhi; ++j) s.add(a[static_cast<size_t>(j)] * b[static_cast<size_t>(k - j)]);
    return s.value();
}

}  // namespace

void convolve_serial(std::span<const double> a, std::span<const double> b,
                     std::span<double> out) {
    for (long k = 0; k < static_cast<long>(out.size()); ++k) out[static_cast<size_t>(k)] = conv_coeff(a, b, k);
}

void convolve(std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) out[static_cast<size_t>(k)] = conv_coeff(a, b, k);
}

}  // namespace kernel

PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b) {
    const int n = std::min(a.order(), b.order());
    PowerSeries out = PowerSeries::zero(n);
    std::vector<double> buf(static_cast<size_t>(n) + 1);
    kernel::convolve(std::span<const double>(a.coeffs()).subspan(0, static_cast<size_t>(n) + 1),
                     std::span<const double>(b.coeffs()).subspan(0, static_cast<size_t>(n) + 1),
                     buf);
    for (int k = 0; k <= n; ++k) out[k] = buf[static_cast<size_t>(k)];
    return out;
}

PowerSeries ps_exp(const PowerSeries& a) {
    if (a[0] > 709.0) throw NumericalError("ps_exp: e^{a0} overflows");
    const int n = a.order();
    PowerSeries c = PowerSeries::zero(n);
    c[0] = std::exp(a[0]);
    for (int k = 1; k <= n; ++k) {
        CompensatedSum s;
        for (int j = 1; j <= k; ++j) s.add(static_cast<double>(j) * a[j] * c[k - j]);
        c[k] = s.value() / static_cast<double>(k);
    }
    for (int k = 0; k <= n; ++k) {
        if (!std::isfinite(c[k])) throw NumericalError("ps_exp: coefficient overflow");
    }
    return c;
}

PowerSeries ps_log(const PowerSeries& a) {
    if (!(a[0] > 0.0)) throw ValidationError("ps_log: constant term must be positive");
    const int n = a.order();
    PowerSeries b = PowerSeries::zero(n);
    b[0] = std::log(a[0]);
    // From a = exp(b): k a_k = sum_{j=1..k} j b_j a_{k-j}.
    for (int k = 1; k <= n; ++k) {
        CompensatedSum s;
        for (int j = 1; j < k; ++j) s.add(static_cast<double>(j) * b[j] * a[k - j]);
        b[k] = (static_cast<double>(k) * a[k] - s.value()) / (static_cast<double>(k) * a[0]);
    }
    return b;
}

PowerSeries ps_real_pow(const PowerSeries& a, double alpha) {
    if (!(a[0] > 0.0)) throw ValidationError("ps_real_pow: constant term must be positive");
    PowerSeries b = ps_log(a);
    for (int k = 0; k <= b.order(); ++k) b[k] *= alpha;
    return ps_exp(b);
}

PowerSeries ps_inv(const PowerSeries& a) {
    if (a[0] == 0.0) throw ValidationError("ps_inv: constant term must be nonzero");
    const int n = a.order();
    PowerSeries r = PowerSeries::zero(n);
    r[0] = 1.0 / a[0];
    for (int k = 1; k <= n; ++k) {
        CompensatedSum s;
        for (int j = 1; j <= k; ++j) s.add(a[j] * r[k - j]);
        r[k] = -s.value() / a[0];
    }
    return r;
}

PowerSeries ps_compose_geometric(const PowerSeries& outer, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("ps_compose_geometric: q must be in (0, 1]");
    const int n = outer.order();
    PowerSeries qs = PowerSeries::zero(n);
    double w = q;
    for (int k = 0; k <= n; ++k) {
        qs[k] = w;
        w *= 1.0 - q;
    }
    PowerSeries acc = PowerSeries::constant(outer[n], n);
    for (int k = n - 1; k >= 0; --k) {
        acc = ps_mul(acc, qs);
        acc[0] += outer[k];
    }
    return acc;
}

}  // namespace citesim::series
