#pragma once

#include <cstddef>

namespace nldiff {

/// Parameters of 2F3(a1, a2; b1, b2, b3; x).
struct PfqParams {
    double a1 = 1.0;
    double a2 = 1.0;
    double b1 = 1.0;
    double b2 = 1.0;
    double b3 = 1.0;

    /// Throws InvalidParams if a denominator parameter is zero or a negative integer.
    void validate() const;

    bool operator==(const PfqParams&) const = default;
};

struct SeriesResult {
    double value = 0.0;
    std::size_t terms_used = 0;
    double est_abs_error = 0.0;
    // log10(max |partial sum| / |value|), clamped at 0.
    double cancellation_digits = 0.0;
    bool converged = false;
};

struct SeriesOptions {
    std::size_t term_cap = 10000;
    double rel_stop = 1e-17;
    int consecutive_small = 3;
};

/// Above this many digits of cancellation the double-precision sum is not trusted.
inline constexpr double kCancellationThreshold = 6.0;

/// Direct summation of the 2F3 series in double precision for x <= 0, with
/// Neumaier-compensated accumulation.
SeriesResult pfq_2f3(const PfqParams& p, double x, const SeriesOptions& opts = {});

/// The same series in MPFR arithmetic.  The working precision is at least
/// `digits` decimal digits, raised when necessary to
/// 16 + ceil(predicted cancellation) + 8 so the result keeps double accuracy.
SeriesResult pfq_2f3_extended(const PfqParams& p, double x, int digits,
                              const SeriesOptions& opts = {});

/// Predicted cancellation (in decimal digits) from a log-space scan of the
/// term magnitudes; never overflows, even where the terms exceed double range.
double predicted_cancellation_digits(const PfqParams& p, double x,
                                     const SeriesOptions& opts = {});

/// Working precision used for a given amount of cancellation.
int required_digits(double cancellation_digits);

/// Evaluates with the double path when its cancellation is acceptable and
/// falls back to extended precision otherwise.  `used_extended` reports the path.
/// A caller may pass a stricter `threshold` than the default.
SeriesResult pfq_2f3_auto(const PfqParams& p, double x, bool* used_extended = nullptr,
                          const SeriesOptions& opts = {},
                          double threshold = kCancellationThreshold);

}  // namespace nldiff
