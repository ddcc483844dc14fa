#pragma once

#include <span>
#include <vector>

#include "citesim/errors.hpp"

namespace citesim::series {

// Default truncation order for pmf extraction.
inline constexpr int kDefaultOrder = 4096;

// Truncated formal power series over the reals. coeffs()[k] is the
// coefficient of z^k; a series of order N stores N+1 coefficients.
// Binary operations truncate to the smaller operand's order, so the
// retained coefficients are exact images of the untruncated algebra
// (coefficient k of any product/exp/log depends only on coefficients
// j <= k of the inputs).
class PowerSeries {
public:
    PowerSeries() : c_(1, 0.0) {}
    explicit PowerSeries(std::vector<double> coeffs);

    static PowerSeries zero(int order);
    static PowerSeries constant(double value, int order);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int k) const { return c_[static_cast<size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<size_t>(k)]; }
    const std::vector<double>& coeffs() const { return c_; }

    // Horner evaluation of the truncated polynomial.
    double eval(double z) const;

private:
    std::vector<double> c_;
};

// c = a + b.
PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b);

// Cauchy product, plain O(N^2) with compensated inner sums.
PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b);

// exp(a) by the standard recurrence c_k = (1/k) sum_{j=1..k} j a_j c_{k-j},
// c_0 = e^{a_0}. Throws NumericalError when e^{a_0} overflows.
PowerSeries ps_exp(const PowerSeries& a);

// log(a); requires a_0 > 0 (ValidationError otherwise).
PowerSeries ps_log(const PowerSeries& a);

// a^alpha = exp(alpha * log(a)); requires a_0 > 0.
PowerSeries ps_real_pow(const PowerSeries& a, double alpha);

// Reciprocal 1/a; requires a_0 != 0.
PowerSeries ps_inv(const PowerSeries& a);

// outer(Q(z)) where Q(z) = q / (1 - (1-q) z), 0 < q <= 1: Q is expanded
// to the outer's order and composed by Horner's rule. O(N^3); intended
// for moderate orders.
PowerSeries ps_compose_geometric(const PowerSeries& outer, double q);

namespace kernel {

// out[k] = sum_j a[j] b[k-j] for k < out.size(); out.size() must not
// exceed a.size() + b.size() - 1. The parallel kernel distributes output
// coefficients across threads; each coefficient's accumulation order is
// fixed, so results are bit-identical for any thread count.
void convolve(std::span<const double> a, std::span<const double> b,
              std::span<double> out);
void convolve_serial(std::span<const double> a, std::span<const double> b,
                     std::span<double> out);

}  // namespace kernel

}  // namespace citesim::series
