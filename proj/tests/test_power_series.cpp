#include <doctest.h>

#include <cmath>
#include <vector>

#include "citesim/errors.hpp"
#include "citesim/power_series.hpp"
#include "oracles.hpp"

using citesim::NumericalError;
using citesim::ValidationError;
using citesim::series::PowerSeries;

namespace {

PowerSeries make(std::vector<double> c) { return PowerSeries(std::move(c)); }

void check_close(const PowerSeries& got, const std::vector<double>& want, double tol) {
    REQUIRE(got.order() == static_cast<int>(want.size()) - 1);
    for (size_t k = 0; k < want.size(); ++k) {
        CHECK(std::abs(got[static_cast<int>(k)] - want[k]) <= tol);
    }
}

}  // namespace

TEST_SUITE("power_series") {

TEST_CASE("construction and accessors") {
    PowerSeries def;
    CHECK(def.order() == 0);
    CHECK(def[0] == 0.0);

    auto z = citesim::series::PowerSeries::zero(3);
    CHECK(z.order() == 3);
    for (int k = 0; k <= 3; ++k) CHECK(z[k] == 0.0);

    auto c = citesim::series::PowerSeries::constant(2.5, 2);
    CHECK(c.order() == 2);
    CHECK(c[0] == 2.5);
    CHECK(c[1] == 0.0);

    CHECK_THROWS_AS(make({}), ValidationError);
}

TEST_CASE("eval is Horner on the truncated polynomial") {
    auto s = make({1.0, 2.0, 3.0});
    CHECK(s.eval(0.0) == 1.0);
    CHECK(s.eval(1.0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(s.eval(0.5) == doctest::Approx(1.0 + 1.0 + 0.75).epsilon(1e-15));

    // Truncated geometric series at z = 0.5 against the closed partial sum.
    std::vector<double> geo(21);
    for (int k = 0; k <= 20; ++k) geo[static_cast<size_t>(k)] = std::pow(0.25, k);
    double partial = (1.0 - std::pow(0.125, 21)) / (1.0 - 0.125);
    CHECK(make(geo).eval(0.5) == doctest::Approx(partial).epsilon(1e-14));
}

TEST_CASE("ps_add examples") {
    auto sum = ps_add(make({1, 2, 3}), make({4, 5, 6}));
    check_close(sum, {5, 7, 9}, 0.0);

    // Mixed orders truncate to the smaller.
    auto mixed = ps_add(make({1, 2, 3, 4}), make({1, 1}));
    check_close(mixed, {2, 3}, 0.0);

    auto zero = ps_add(make({1, -1}), make({-1, 1}));
    check_close(zero, {0, 0}, 0.0);
}

TEST_CASE("ps_mul examples") {
    check_close(ps_mul(make({1, 1}), make({1, 1})), {1, 2}, 0.0);
    check_close(ps_mul(make({1, 1, 1}), make({1, 1, 1})), {1, 2, 3}, 0.0);

    // Multiplicative identity.
    auto a = make({0.5, -0.25, 3.0, 1.25});
    auto id = citesim::series::PowerSeries::constant(1.0, 3);
    check_close(ps_mul(a, id), a.coeffs(), 0.0);

    // Commutativity on a fixed pair.
    auto b = make({2.0, 0.5, -1.0, 0.125});
    auto ab = ps_mul(a, b);
    auto ba = ps_mul(b, a);
    for (int k = 0; k <= 3; ++k) CHECK(ab[k] == ba[k]);
}

TEST_CASE("ps_exp examples") {
    check_close(ps_exp(make({0, 1, 0, 0})), {1.0, 1.0, 0.5, 1.0 / 6.0}, 1e-15);
    check_close(ps_exp(make({0, 0, 0})), {1, 0, 0}, 0.0);

    auto e = ps_exp(make({-0.5, 0.0}));
    CHECK(e[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(e[1] == 0.0);

    CHECK_THROWS_AS(ps_exp(make({710.0, 1.0})), NumericalError);
}

TEST_CASE("ps_log examples") {
    check_close(ps_log(make({1, 0, 0})), {0, 0, 0}, 0.0);
    check_close(ps_log(make({1, 1, 0})), {0, 1, -0.5}, 1e-15);

    CHECK_THROWS_AS(ps_log(make({0.0, 1.0})), ValidationError);
    CHECK_THROWS_AS(ps_log(make({-2.0, 1.0})), ValidationError);
}

TEST_CASE("exp/log round trips") {
    auto s = make({2.0, 0.3, 0.1});
    auto back = ps_exp(ps_log(s));
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(back[k] - s[k]) <= 1e-12);

    // Both directions at order 64 with coefficients of both signs.
    std::vector<double> c(65);
    c[0] = 3.0;
    for (int k = 1; k <= 64; ++k) {
        c[static_cast<size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * 2.0 / (1.0 + k);
    }
    auto big = make(c);
    auto round1 = ps_exp(ps_log(big));
    for (int k = 0; k <= 64; ++k) CHECK(std::abs(round1[k] - big[k]) <= 1e-12);

    std::vector<double> d(65);
    for (int k = 0; k <= 64; ++k) d[static_cast<size_t>(k)] = 5.0 * std::cos(1.7 * k) / (k + 1.0);
    auto arg = make(d);
    auto round2 = ps_log(ps_exp(arg));
    for (int k = 0; k <= 64; ++k) CHECK(std::abs(round2[k] - arg[k]) <= 1e-12);
}

TEST_CASE("ps_real_pow examples") {
    auto sqrt_series = ps_real_pow(make({1, -1, 0, 0}), 0.5);
    check_close(sqrt_series, {1.0, -0.5, -0.125, -0.0625}, 1e-15);

    auto pow_one = ps_real_pow(make({1, -1, 0, 0}), 1.0);
    check_close(pow_one, {1, -1, 0, 0}, 1e-15);

    auto pow_zero = ps_real_pow(make({4.0, 2.0, 1.0}), 0.0);
    check_close(pow_zero, {1, 0, 0}, 1e-15);

    CHECK_THROWS_AS(ps_real_pow(make({0.0, 1.0}), 0.5), ValidationError);
}

TEST_CASE("ps_real_pow matches the binomial recurrence for (1-z)^alpha") {
    for (double alpha : {0.25, 0.5, 0.9, 1.5, -0.5}) {
        std::vector<double> base(129, 0.0);
        base[0] = 1.0;
        base[1] = -1.0;
        auto got = ps_real_pow(make(base), alpha);
        auto want = oracles::binomial_series(alpha, 128);
        for (int k = 0; k <= 128; ++k) {
            CHECK(std::abs(got[k] - want[static_cast<size_t>(k)]) <= 1e-12);
        }
    }
}

TEST_CASE("integer real_pow agrees with repeated multiplication") {
    auto a = make({1.5, -0.4, 0.2, 0.05, -0.01, 0.003, 0.5, -0.125});
    auto prod = a;
    for (int m = 1; m <= 3; ++m) {
        auto pow_m = ps_real_pow(a, static_cast<double>(m));
        for (int k = 0; k <= a.order(); ++k) CHECK(std::abs(pow_m[k] - prod[k]) <= 1e-12);
        prod = ps_mul(prod, a);
    }
}

TEST_CASE("ps_inv examples") {
    // 1 / (1 - z) = geometric series.
    auto geo = ps_inv(make({1, -1, 0, 0, 0}));
    check_close(geo, {1, 1, 1, 1, 1}, 1e-15);

    auto a = make({2.0, 1.0, -0.5, 0.25});
    auto prod = ps_mul(a, ps_inv(a));
    check_close(prod, {1, 0, 0, 0}, 1e-14);

    CHECK_THROWS_AS(ps_inv(make({0.0, 1.0})), ValidationError);
}

TEST_CASE("ps_compose_geometric examples") {
    // Identity outer recovers the geometric kernel q/(1-(1-q)z).
    auto q_series = ps_compose_geometric(make({0, 1, 0, 0, 0}), 0.5);
    for (int k = 0; k <= 4; ++k) {
        CHECK(q_series[k] == doctest::Approx(0.5 * std::pow(0.5, k)).epsilon(1e-14));
    }

    // Constant outer is unchanged.
    auto c = ps_compose_geometric(make({3.0, 0.0, 0.0}), 0.25);
    check_close(c, {3, 0, 0}, 1e-15);

    // Outer z^2 equals Q * Q.
    auto q2 = ps_compose_geometric(make({0, 0, 1, 0, 0, 0}), 0.5);
    std::vector<double> qc(6);
    for (int k = 0; k <= 5; ++k) qc[static_cast<size_t>(k)] = 0.5 * std::pow(0.5, k);
    auto direct = ps_mul(make(qc), make(qc));
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(q2[k] - direct[k]) <= 1e-13);

    CHECK_THROWS_AS(ps_compose_geometric(make({0, 1}), 0.0), ValidationError);
    CHECK_THROWS_AS(ps_compose_geometric(make({0, 1}), 1.5), ValidationError);
}

TEST_CASE("binary operations truncate to the smaller order") {
    auto small = make({1.0, 2.0});
    auto large = make({1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK(ps_add(small, large).order() == 1);
    CHECK(ps_mul(large, small).order() == 1);
    CHECK(ps_exp(small).order() == 1);
    CHECK(ps_log(make({1.0, 0.5, 0.25})).order() == 2);
}

TEST_CASE("parallel convolution kernel is bit-identical to serial") {
    const int n = 512;
    std::vector<double> a(n), b(n);
    for (int k = 0; k < n; ++k) {
        a[static_cast<size_t>(k)] = std::sin(0.1 * k) / (1.0 + k);
        b[static_cast<size_t>(k)] = std::cos(0.07 * k) * std::pow(0.99, k);
    }
    std::vector<double> out_par(n, 0.0), out_ser(n, 0.0);
    citesim::series::kernel::convolve(a, b, out_par);
    citesim::series::kernel::convolve_serial(a, b, out_ser);
    for (int k = 0; k < n; ++k) CHECK(out_par[static_cast<size_t>(k)] == out_ser[static_cast<size_t>(k)]);

    // And the kernel agrees with ps_mul on the shared prefix.
    auto prod = ps_mul(make(a), make(b));
    for (int k = 0; k < n; ++k) {
        CHECK(std::abs(prod[k] - out_ser[static_cast<size_t>(k)]) <= 1e-15 * (1.0 + std::abs(prod[k])));
    }
}

}  // TEST_SUITE
