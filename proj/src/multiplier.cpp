#include "nldiff/multiplier.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "nldiff/errors.hpp"
#include "nldiff/parallel.hpp"
#include "nldiff/quadrature.hpp"

namespace nldiff {
namespace {

using std::numbers::pi;

double norm_of(std::span<const double> nu) {
    double s = 0.0;
    for (double v : nu) s += v * v;
    return std::sqrt(s);
}

void check_nu(const OperatorParams& p, std::span<const double> nu) {
    if (static_cast<int>(nu.size()) != p.n) {
        std::ostringstream os;
        os << "frequency vector has " << nu.size() << " components, expected " << p.n;
        fail(ErrorKind::InvalidParams, os.str());
    }
}

void check_norm(double nu_norm) {
    if (!(nu_norm >= 0.0) || !std::isfinite(nu_norm)) {
        std::ostringstream os;
        os << "frequency norm must be finite and nonnegative, got " << nu_norm;
        fail(ErrorKind::InvalidParams, os.str());
    }
}

PfqParams series_params(const OperatorParams& p) {
    return {1.0, (p.n + 2 - p.beta) / 2, 2.0, (p.n + 2) / 2.0, (p.n + 4 - p.beta) / 2};
}

double sphere_area(int n) { return n == 1 ? 2.0 : (n == 2 ? 2.0 * pi : 4.0 * pi); }

// Non-oscillatory part of the large-argument expansion.
double algebraic_part(const OperatorParams& p, double X) {
    const double A = (p.n - p.beta) / 2;
    const double B = p.n / 2.0;
    const double d2 = p.delta * p.delta;
    const double L = std::log(X / 2);
    if (A == 0.0) {
        return -(2.0 * p.n / d2) *
               (2.0 * L + std::numbers::egamma - boost::math::digamma(B));
    }
    const double alpha = 2.0 * p.n * (A + 1) / (d2 * A);
    if (std::abs(A) < 1e-4) {
        using boost::math::digamma;
        using boost::math::polygamma;
        using boost::math::trigamma;
        const double q1 = digamma(1.0) + digamma(B) - 2.0 * L;
        const double q2 = (trigamma(1.0) - trigamma(B)) / 2;
        const double q3 = (polygamma(2, 1.0) + polygamma(2, B)) / 6;
        return alpha * std::expm1(A * (q1 + A * (q2 + A * q3)));
    }
    const double bma = B - A;  // = beta/2
    if (bma <= 0.0 && bma == std::floor(bma)) return -alpha;  // 1/Gamma(beta/2) = 0
    if (A + 1 > 0.0 && bma > 0.0) {
        const double q = std::lgamma(B) + std::lgamma(A + 1) - std::lgamma(bma) - 2 * A * L;
        return alpha * std::expm1(q);
    }
    const double r = std::tgamma(B) * std::tgamma(A + 1) / std::tgamma(bma) * std::exp(-2 * A * L);
    return alpha * (r - 1.0);
}

// Oscillatory part, optimally truncated Hankel-type series.
double oscillatory_part(const OperatorParams& p, double X, double* omitted) {
    const double A = (p.n - p.beta) / 2;
    const double B = p.n / 2.0;
    const double order = B - 1;
    const double q = 2 * A - B - 0.5;
    const double phase = order * pi / 2 + pi / 4;
    const double four_mu2 = 4 * order * order;

    std::complex<double> sum = 0.0;
    std::complex<double> ipow(0.0, 1.0);  // i^(N+1)
    double a_k = 1.0;                     // Hankel coefficient a_N(order)
    double c = 1.0;                       // c_N
    double xpow = 1.0;                    // X^-N
    double prev = std::abs(c);
    double last_omitted = 0.0;
    for (int N = 0; N < 400; ++N) {
        const double mag = std::abs(c) * xpow;
        if (N > 1 && mag > prev) {
            last_omitted = mag;
            break;
        }
        sum += ipow * (c * xpow);
        last_omitted = mag;
        if (mag != 0.0 && mag < 1e-18 * std::abs(sum)) break;
        if (mag != 0.0) prev = mag;
        // advance to N+1
        const double j = N + 1;
        a_k *= (four_mu2 - (2 * j - 1) * (2 * j - 1)) / (j * 8.0);
        c = (q - N) * c + a_k;
        xpow /= X;
        ipow *= std::complex<double>(0.0, 1.0);
    }
    const double pref = -(4.0 * p.n * (A + 1) / (p.delta * p.delta)) * std::sqrt(2.0 / pi) *
                        std::tgamma(B) * std::pow(2.0, B - 1) * std::pow(X, -(p.n + 1) / 2.0);
    const std::complex<double> rot = std::polar(1.0, X - phase);
    if (omitted) *omitted = std::abs(pref) * last_omitted;
    return pref * (rot * sum).real();
}

// (K(x) - 1) for the radial kernel of dimension n, accurate for small x.
double kernel_minus_one(int n, double x) {
    if (n == 1) {
        const double s = std::sin(x / 2);
        return -2.0 * s * s;
    }
    const double z = -x * x / 4;
    if (x < 1.0) {
        double term = 1.0, sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= (n == 2) ? z / (double(k) * k) : 4 * z / ((2.0 * k) * (2.0 * k + 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return n == 2 ? std::cyl_bessel_j(0.0, x) - 1.0 : std::sin(x) / x - 1.0;
}

// Leading small-x coefficient kappa: K(x) - 1 ~ -kappa x^2.
double kernel_kappa(int n) { return n == 1 ? 0.5 : (n == 2 ? 0.25 : 1.0 / 6.0); }

}  // namespace

void OperatorParams::validate() const {
    std::ostringstream os;
    if (n < 1 || n > 3) {
        os << "dimension must be 1, 2 or 3, got " << n;
    } else if (!(delta > 0.0) || !std::isfinite(delta)) {
        os << "horizon must be positive, got " << delta;
    } else if (!std::isfinite(beta) || !(beta < n + 4)) {
        os << "kernel exponent must satisfy beta < n+4, got " << beta;
    } else {
        return;
    }
    fail(ErrorKind::InvalidParams, os.str());
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::Hypergeometric: return "hypergeometric";
        case Branch::ExtendedHypergeometric: return "extended";
        case Branch::Quadrature: return "quadrature";
        case Branch::Asymptotic: return "asymptotic";
        case Branch::ClassicalExact: return "classical";
    }
    return "unknown";
}

double scaling_constant(const OperatorParams& p) {
    p.validate();
    const double e = p.n + 2 - p.beta;
    return 2 * e * std::tgamma(p.n / 2.0 + 1) / (std::pow(pi, p.n / 2.0) * std::pow(p.delta, e));
}

double alpha_constant(const OperatorParams& p) {
    p.validate();
    if (!(p.beta < p.n)) {
        std::ostringstream os;
        os << "alpha is defined only for beta < n (beta = " << p.beta << ", n = " << p.n << ")";
        fail(ErrorKind::InvalidParams, os.str());
    }
    return 2.0 * p.n * (p.n + 2 - p.beta) / (p.delta * p.delta * (p.n - p.beta));
}

DerivedConstants derived_constants(const OperatorParams& p) {
    DerivedConstants d;
    d.c_scaling = scaling_constant(p);
    d.alpha = p.beta < p.n ? alpha_constant(p) : std::nan("");
    return d;
}

MultiplierValue multiplier(const OperatorParams& p, std::span<const double> nu, double crossover) {
    p.validate();
    check_nu(p, nu);
    return multiplier_radial(p, norm_of(nu), crossover);
}

MultiplierValue multiplier_radial(const OperatorParams& p, double nu_norm, double crossover) {
    p.validate();
    check_norm(nu_norm);
    if (nu_norm == 0.0) return {0.0, p.classical() ? Branch::ClassicalExact : Branch::Hypergeometric, 0.0};
    if (p.classical()) return {-nu_norm * nu_norm, Branch::ClassicalExact, 0.0};
    const double X = nu_norm * p.delta;
    if (X > crossover) {
        double err = 0.0;
        const double v = multiplier_expansion(p, nu_norm, &err);
        return {v, Branch::Asymptotic, err / std::abs(v)};
    }
    bool extended = false;
    const auto r = pfq_2f3_auto(series_params(p), -X * X / 4, &extended, {}, kMultiplierCancellation);
    return {-nu_norm * nu_norm * r.value,
            extended ? Branch::ExtendedHypergeometric : Branch::Hypergeometric,
            r.est_abs_error / std::abs(r.value)};
}

double multiplier_asymptotic(const OperatorParams& p, double nu_norm) {
    p.validate();
    if (!(nu_norm > 0.0)) fail(ErrorKind::InvalidParams, "asymptotic form requires |nu| > 0");
    const int n = p.n;
    const double b = p.beta;
    const double d = p.delta;
    if (b == n) {
        return -(2.0 * n / (d * d)) *
               (2 * std::log(nu_norm) + std::log(d * d / 4) + std::numbers::egamma -
                boost::math::digamma(n / 2.0));
    }
    if (b >= n + 2 && (b - n) / 2 == std::floor((b - n) / 2)) {
        fail(ErrorKind::InvalidParams, "asymptotic form excludes beta = n+2, n+4, ...");
    }
    const double constant = -2.0 * n * (n + 2 - b) / (d * d * (n - b));
    const double half = b / 2;
    double coeff = 0.0;
    if (!(half <= 0.0 && half == std::floor(half))) {
        coeff = 2 * std::pow(2 / d, n + 2 - b) * std::tgamma((n + 4 - b) / 2) *
                std::tgamma((n + 2) / 2.0) / ((n - b) * std::tgamma(half));
    }
    return constant + coeff * std::pow(nu_norm, b - n);
}

double multiplier_expansion(const OperatorParams& p, double nu_norm, double* est_abs_error) {
    p.validate();
    if (!(nu_norm > 0.0)) fail(ErrorKind::InvalidParams, "expansion requires |nu| > 0");
    if (p.classical()) {
        if (est_abs_error) *est_abs_error = 0.0;
        return -nu_norm * nu_norm;
    }
    const double X = nu_norm * p.delta;
    double omitted = 0.0;
    const double alg = algebraic_part(p, X);
    const double osc = oscillatory_part(p, X, &omitted);
    if (est_abs_error) *est_abs_error = omitted + 4e-16 * (std::abs(alg) + std::abs(osc));
    return alg + osc;
}

double calibrate_crossover(const OperatorParams& p, double rel_tol, double x_min, double x_max,
                           double step) {
    p.validate();
    if (p.classical()) return x_min;
    const auto sp = series_params(p);
    double last_bad = -1.0;
    const int count = static_cast<int>(std::floor((x_max - x_min) / step + 0.5));
    for (int i = 0; i <= count; ++i) {
        const double X = x_min + i * step;
        const double nu = X / p.delta;
        const double series = -nu * nu * pfq_2f3_extended(sp, -X * X / 4, 30).value;
        const double expansion = multiplier_expansion(p, nu);
        if (std::abs(series - expansion) > rel_tol * std::abs(series)) last_bad = X;
    }
    return last_bad < 0.0 ? x_min : std::min(x_max, last_bad + step);
}

MultiplierValue multiplier_quadrature_oracle(const OperatorParams& p, std::span<const double> nu,
                                             double rel_tol) {
    p.validate();
    check_nu(p, nu);
    return multiplier_quadrature_radial(p, norm_of(nu), rel_tol);
}

MultiplierValue multiplier_quadrature_radial(const OperatorParams& p, double nu_norm, double rel_tol) {
    p.validate();
    check_norm(nu_norm);
    if (!(p.beta < p.n + 2)) {
        fail(ErrorKind::InvalidParams, "the defining integral requires beta < n+2");
    }
    if (nu_norm == 0.0) return {0.0, Branch::Quadrature, 0.0};

    const int n = p.n;
    const double expo = n - 1 - p.beta;
    const double e2 = n + 2 - p.beta;  // exponent of the r -> 0 remainder
    const double nu = nu_norm;
    auto f = [&](double r) { return kernel_minus_one(n, nu * r) * std::pow(r, expo); };

    // Remainder on [0, r0] from the leading small-argument term; its relative
    // error is O((nu r0)^2).
    auto remainder = [&](double r0) { return -kernel_kappa(n) * nu * nu * std::pow(r0, e2) / e2; };

    // Geometric grading toward 0, then split panels longer than a half-period.
    std::vector<double> pts{p.delta};
    double r = p.delta;
    // Conservative magnitude of the integral: ~ nu^2 delta^e2 for small X and
    // no smaller than ~ delta^(n-beta) for large X.
    const double X = nu * p.delta;
    const double rough = std::abs(remainder(p.delta)) / (1.0 + X * X);
    while (true) {
        const double x = nu * r;
        if (x * x * std::abs(remainder(r)) < 1e-3 * rel_tol * rough && x < 1e-2) break;
        r *= 0.5;
        pts.push_back(r);
        if (pts.size() > 4000) fail(ErrorKind::QuadratureFailure, "grading toward the origin did not terminate");
    }
    std::reverse(pts.begin(), pts.end());
    const double half_period = pi / nu;
    std::vector<double> breaks;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / half_period)));
        for (int j = 0; j < pieces; ++j) breaks.push_back(a + (b - a) * j / pieces);
    }
    breaks.push_back(p.delta);

    const auto q = integrate_adaptive(f, breaks, 0.0, 0.1 * rel_tol);
    const double total = q.value + remainder(pts.front());
    const double rem_err = std::pow(nu * pts.front(), 2) * std::abs(remainder(pts.front()));
    const double err = q.abs_error + rem_err;
    if (!q.converged || err > rel_tol * std::abs(total)) {
        std::ostringstream os;
        os << "quadrature error estimate " << err << " exceeds tolerance for |nu| = " << nu_norm;
        fail(ErrorKind::QuadratureFailure, os.str());
    }
    const double scale = scaling_constant(p) * sphere_area(n);
    return {scale * total, Branch::Quadrature, err / std::abs(total)};
}

MultiplierTable multiplier_table(const OperatorParams& p, const TorusGeometry& geom, unsigned threads,
                                 double crossover) {
    p.validate();
    geom.validate();
    if (geom.n != p.n) fail(ErrorKind::InvalidParams, "table geometry dimension differs from operator dimension");
    const std::size_t total = geom.size();
    std::vector<double> norms(total);
    for (std::size_t i = 0; i < total; ++i) norms[i] = geom.nu_norm(geom.index_to_k(i));
    std::vector<double> unique = norms;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<MultiplierValue> evaluated(unique.size());
    parallel_for(unique.size(), resolve_threads(threads), [&](std::size_t i) {
        try {
            evaluated[i] = multiplier_radial(p, unique[i], crossover);
        } catch (const Error& e) {
            std::ostringstream os;
            os << e.what() << " (at |nu_k| = " << unique[i] << ")";
            throw Error(e.kind(), os.str());
        }
    });

    MultiplierTable t;
    t.params = p;
    t.geom = geom;
    t.values.resize(total);
    t.branches.resize(total);
    t.est_rel_errors.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto pos = std::lower_bound(unique.begin(), unique.end(), norms[i]) - unique.begin();
        t.values[i] = evaluated[pos].value;
        t.branches[i] = evaluated[pos].branch;
        t.est_rel_errors[i] = evaluated[pos].est_rel_error;
    }
    return t;
}

MultiplierTable classical_table(const TorusGeometry& geom) {
    geom.validate();
    MultiplierTable t;
    t.params = {geom.n, 1.0, geom.n + 2.0};
    t.geom = geom;
    const std::size_t total = geom.size();
    t.values.resize(total);
    t.branches.assign(total, Branch::ClassicalExact);
    t.est_rel_errors.assign(total, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
        const double nn = geom.nu_norm(geom.index_to_k(i));
        t.values[i] = -nn * nn;
    }
    return t;
}

}  // namespace nldiff
