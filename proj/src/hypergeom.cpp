#include "nldiff/hypergeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nldiff/errors.hpp"
#include "wide_float.hpp"

namespace nldiff {
namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

bool nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

void check_argument(const PfqParams& p, double x) {
    p.validate();
    if (!(x <= 0.0)) {
        std::ostringstream os;
        os << "2F3 argument must satisfy x <= 0, got " << x;
        fail(ErrorKind::InvalidParams, os.str());
    }
}

double term_ratio(const PfqParams& p, double x, double j) {
    return (p.a1 + j) * (p.a2 + j) / ((p.b1 + j) * (p.b2 + j) * (p.b3 + j) * (1.0 + j)) * x;
}

[[noreturn]] void no_convergence(const PfqParams& p, double x, std::size_t cap) {
    std::ostringstream os;
    os << "2F3(" << p.a1 << ", " << p.a2 << "; " << p.b1 << ", " << p.b2 << ", " << p.b3
       << "; " << x << ") did not converge within " << cap << " terms";
    fail(ErrorKind::NonConvergence, os.str());
}

struct ExtendedPass {
    double value;
    std::size_t terms;
    double log10_max_partial;
    double log10_weighted;  // log10 of sum (j+1)|t_j|
    double last_term;
    double log10_value;
};

ExtendedPass extended_pass(const PfqParams& p, double x, int digits, const SeriesOptions& opts) {
    using detail::WideFloat;
    const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623) + 16);
    WideFloat term(bits, 1.0), sum(bits, 1.0), max_partial(bits, 1.0), weighted(bits, 1.0);
    WideFloat factor(bits), scratch(bits), abs_sum(bits);
    const WideFloat xw(bits, x);
    const double params[5] = {p.a1, p.a2, p.b1, p.b2, p.b3};
    WideFloat pw[5] = {WideFloat(bits, params[0]), WideFloat(bits, params[1]), WideFloat(bits, params[2]),
                       WideFloat(bits, params[3]), WideFloat(bits, params[4])};

    int small_run = 0;
    std::size_t used = 1;
    double last = 1.0;
    for (std::size_t j = 0;; ++j) {
        if (used >= opts.term_cap) no_convergence(p, x, opts.term_cap);
        const double jd = static_cast<double>(j);
        factor.set_sum(pw[0], jd);
        term *= factor;
        factor.set_sum(pw[1], jd);
        term *= factor;
        factor.set_sum(pw[2], jd);
        term /= factor;
        factor.set_sum(pw[3], jd);
        term /= factor;
        factor.set_sum(pw[4], jd);
        term /= factor;
        mpfr_div_d(term.raw(), term.raw(), 1.0 + jd, MPFR_RNDN);
        term *= xw;
        sum += term;
        ++used;

        abs_sum.set_abs(sum);
        if (abs_sum.cmp_abs(max_partial) > 0) max_partial.set(abs_sum);
        scratch.set_abs(term);
        scratch *= static_cast<double>(j + 2);
        weighted += scratch;

        last = term.to_double();
        const double lt = term.log10_abs();
        const double ls = sum.log10_abs();
        if (term.is_zero() || lt < ls + std::log10(opts.rel_stop)) {
            if (++small_run >= opts.consecutive_small) break;
        } else {
            small_run = 0;
        }
    }
    return {sum.to_double(), used, max_partial.log10_abs(), weighted.log10_abs(), last,
            sum.log10_abs()};
}

}  // namespace

void PfqParams::validate() const {
    for (double v : {a1, a2, b1, b2, b3}) {
        if (!std::isfinite(v)) fail(ErrorKind::InvalidParams, "2F3 parameters must be finite");
    }
    for (double b : {b1, b2, b3}) {
        if (nonpositive_integer(b)) {
            std::ostringstream os;
            os << "2F3 denominator parameter " << b << " is zero or a negative integer";
            fail(ErrorKind::InvalidParams, os.str());
        }
    }
}

SeriesResult pfq_2f3(const PfqParams& p, double x, const SeriesOptions& opts) {
    check_argument(p, x);
    SeriesResult r;
    if (x == 0.0) {
        r.value = 1.0;
        r.terms_used = 1;
        r.converged = true;
        return r;
    }
    // Neumaier compensated summation.
    double sum = 1.0, comp = 0.0;
    double term = 1.0;
    double max_partial = 1.0;
    double weighted = 1.0;
    int small_run = 0;
    std::size_t used = 1;
    for (std::size_t j = 0;; ++j) {
        if (used >= opts.term_cap) no_convergence(p, x, opts.term_cap);
        term *= term_ratio(p, x, static_cast<double>(j));
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        ++used;
        const double current = sum + comp;
        max_partial = std::max(max_partial, std::abs(current));
        weighted += static_cast<double>(j + 2) * std::abs(term);
        if (term == 0.0 || std::abs(term) < opts.rel_stop * std::abs(current)) {
            if (++small_run >= opts.consecutive_small) break;
        } else {
            small_run = 0;
        }
    }
    r.value = sum + comp;
    r.terms_used = used;
    r.converged = true;
    r.cancellation_digits =
        r.value == 0.0 ? std::numeric_limits<double>::infinity()
                       : std::max(0.0, std::log10(max_partial / std::abs(r.value)));
    // Each recurrence step contributes about six roundings to t_j.
    r.est_abs_error =
        6.0 * kUnitRoundoff * weighted + 2.0 * kUnitRoundoff * std::abs(r.value) + std::abs(term);
    return r;
}

double predicted_cancellation_digits(const PfqParams& p, double x, const SeriesOptions& opts) {
    check_argument(p, x);
    if (x == 0.0) return 0.0;
    double log_term = 0.0, log_max = 0.0;
    for (std::size_t j = 0; j < opts.term_cap; ++j) {
        const double r = term_ratio(p, x, static_cast<double>(j));
        if (r == 0.0) break;
        log_term += std::log10(std::abs(r));
        log_max = std::max(log_max, log_term);
        if (std::abs(r) < 1.0 && log_term < log_max - 20.0) break;
    }
    return log_max;
}

int required_digits(double cancellation_digits) {
    return 16 + static_cast<int>(std::ceil(std::max(0.0, cancellation_digits))) + 8;
}

SeriesResult pfq_2f3_extended(const PfqParams& p, double x, int digits, const SeriesOptions& opts) {
    check_argument(p, x);
    SeriesResult r;
    if (x == 0.0) {
        r.value = 1.0;
        r.terms_used = 1;
        r.converged = true;
        return r;
    }
    int working = std::max(digits, required_digits(predicted_cancellation_digits(p, x, opts)));
    ExtendedPass pass{};
    for (int attempt = 0; attempt < 4; ++attempt) {
        pass = extended_pass(p, x, working, opts);
        const double cancel = std::max(0.0, pass.log10_max_partial - pass.log10_value);
        if (required_digits(cancel) <= working) break;
        working = required_digits(cancel) + 8;
    }
    r.value = pass.value;
    r.terms_used = pass.terms;
    r.converged = true;
    r.cancellation_digits = pass.value == 0.0
                                ? std::numeric_limits<double>::infinity()
                                : std::max(0.0, pass.log10_max_partial - pass.log10_value);
    const double rounding = std::pow(10.0, pass.log10_weighted + std::log10(6.0) - working);
    r.est_abs_error = rounding + kUnitRoundoff * std::abs(r.value) + std::abs(pass.last_term);
    return r;
}

SeriesResult pfq_2f3_auto(const PfqParams& p, double x, bool* used_extended, const SeriesOptions& opts,
                          double threshold) {
    threshold = std::min(threshold, kCancellationThreshold);
    bool extended = predicted_cancellation_digits(p, x, opts) > threshold;
    SeriesResult r;
    if (!extended) {
        r = pfq_2f3(p, x, opts);
        extended = r.cancellation_digits > threshold;
    }
    if (extended) r = pfq_2f3_extended(p, x, required_digits(r.cancellation_digits), opts);
    if (used_extended) *used_extended = extended;
    return r;
}

}  // namespace nldiff
