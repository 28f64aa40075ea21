#include <cmath>
#include <random>

#include "doctest.h"
#include "nldiff/errors.hpp"
#include "nldiff/hypergeom.hpp"
#include "oracle_values.hpp"

using namespace nldiff;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PfqParams multiplier_tuple(int n, double beta) {
    return {1.0, (n + 2 - beta) / 2, 2.0, (n + 2) / 2.0, (n + 4 - beta) / 2};
}

}  // namespace

TEST_CASE("zero argument gives exactly one") {
    CHECK(pfq_2f3({1, 1, 2, 1.5, 2}, 0.0).value == 1.0);
    for (int digits : {20, 50, 200}) CHECK(pfq_2f3_extended({1, 1, 2, 1.5, 2}, 0.0, digits).value == 1.0);
}

TEST_CASE("vanishing numerator parameter truncates the series") {
    for (double x : {-0.5, -30.0, -1e4}) CHECK(pfq_2f3({1, 0, 2, 1.5, 2.5}, x).value == 1.0);
}

TEST_CASE("invalid denominator parameters are rejected") {
    CHECK_THROWS_AS(pfq_2f3({1, 1, 0, 1.5, 2}, -1.0), Error);
    CHECK_THROWS_AS(pfq_2f3({1, 1, 2, -3, 2}, -1.0), Error);
    try {
        pfq_2f3({1, 1, 2, 1.5, -1}, -1.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParams);
    }
    CHECK_THROWS_AS(pfq_2f3({1, 1, 2, 1.5, 2}, 1.0), Error);
}

TEST_CASE("term cap raises NonConvergence") {
    SeriesOptions opts;
    opts.term_cap = 5;
    try {
        pfq_2f3(multiplier_tuple(1, 1.0 / 3), -25.0, opts);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonConvergence);
    }
}

TEST_CASE("kernel exponent one third at moderate argument matches the quadrature oracle") {
    const auto r = pfq_2f3(multiplier_tuple(1, 1.0 / 3), -25.0);
    CHECK(r.converged);
    CHECK(rel(r.value, oracle::kF23N1Beta13X25) < 1e-8);
    const auto e = pfq_2f3_extended(multiplier_tuple(1, 1.0 / 3), -2500.0, 50);
    CHECK(rel(e.value, oracle::kF23N1Beta13X2500) < 1e-8);
}

TEST_CASE("five-sixths tuple at both arguments") {
    const PfqParams p{1, 5.0 / 6, 2, 1.5, 11.0 / 6};
    CHECK(rel(pfq_2f3(p, -25.0).value, oracle::kF23Tuple56X25) < 1e-8);
    const auto e = pfq_2f3_extended(p, -2500.0, 50);
    CHECK(rel(e.value, oracle::kF23Tuple56X2500) < 1e-8);
    CHECK(e.cancellation_digits > 20.0);
}

TEST_CASE("double path reports heavy cancellation at large argument") {
    const auto r = pfq_2f3(multiplier_tuple(1, 1.0 / 3), -2500.0);
    CHECK(r.cancellation_digits > kCancellationThreshold);
    bool extended = false;
    const auto a = pfq_2f3_auto(multiplier_tuple(1, 1.0 / 3), -2500.0, &extended);
    CHECK(extended);
    CHECK(rel(a.value, oracle::kF23N1Beta13X2500) < 1e-10);
}

TEST_CASE("predicted cancellation is finite where terms overflow double") {
    const double c = predicted_cancellation_digits(multiplier_tuple(2, 0.5), -1e6);
    CHECK(std::isfinite(c));
    CHECK(c > 400.0);
}

TEST_CASE("recurrence terms match direct Pochhammer products") {
    const PfqParams p{1.0, 0.8, 2.0, 1.5, 2.3};
    const double x = -3.7;
    double t = 1.0;
    for (int j = 0; j <= 20; ++j) {
        // direct: prod_{i<j} of each factor, evaluated with lgamma quotients
        double direct = std::exp(std::lgamma(p.a1 + j) - std::lgamma(p.a1) + std::lgamma(p.a2 + j) -
                                 std::lgamma(p.a2) - std::lgamma(p.b1 + j) + std::lgamma(p.b1) -
                                 std::lgamma(p.b2 + j) + std::lgamma(p.b2) - std::lgamma(p.b3 + j) +
                                 std::lgamma(p.b3) - std::lgamma(j + 1.0)) *
                        std::pow(std::abs(x), j);
        if (j % 2 == 1) direct = -direct;
        CHECK(rel(t, direct) < 1e-13);
        t *= (p.a1 + j) * (p.a2 + j) / ((p.b1 + j) * (p.b2 + j) * (p.b3 + j) * (1.0 + j)) * x;
    }
}

TEST_CASE("standard and extended agree when cancellation is small") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> beta_d(-1.0, 3.0), x_d(-20.0, 0.0);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const auto p = multiplier_tuple(1, beta_d(rng));
        const double x = x_d(rng);
        const auto s = pfq_2f3(p, x);
        if (s.cancellation_digits >= 2.0) continue;
        const auto e = pfq_2f3_extended(p, x, 30);
        CHECK(rel(s.value, e.value) < 1e-12);
        CHECK(e.est_abs_error <= s.est_abs_error);
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("multiplier parameterization stays in (0, 1] for nonpositive argument") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> n_d(1, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const int n = n_d(rng);
        const double beta = -2.0 + (n + 4.0) * u(rng);  // [-2, n+2]
        const double x = -std::pow(10.0, 4.0 * u(rng) - 1.0);
        const auto r = pfq_2f3_auto(multiplier_tuple(n, beta), x);
        CHECK(r.value > 0.0);
        CHECK(r.value <= 1.0 + 1e-15);
    }
}
