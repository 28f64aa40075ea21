#pragma once

// Minimal RAII wrapper over an MPFR number with an explicit per-value precision.

#include <mpfr.h>

#include <cmath>
#include <utility>

namespace nldiff::detail {

class WideFloat {
public:
    explicit WideFloat(mpfr_prec_t bits, double v = 0.0) {
        mpfr_init2(x_, bits);
        mpfr_set_d(x_, v, MPFR_RNDN);
    }
    WideFloat(const WideFloat& o) {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    WideFloat& operator=(const WideFloat& o) {
        if (this != &o) mpfr_set(x_, o.x_, MPFR_RNDN);
        return *this;
    }
    ~WideFloat() { mpfr_clear(x_); }

    WideFloat& operator+=(const WideFloat& o) { mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    WideFloat& operator*=(const WideFloat& o) { mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }
    WideFloat& operator/=(const WideFloat& o) { mpfr_div(x_, x_, o.x_, MPFR_RNDN); return *this; }
    WideFloat& operator*=(double d) { mpfr_mul_d(x_, x_, d, MPFR_RNDN); return *this; }
    WideFloat& add(double d) { mpfr_add_d(x_, x_, d, MPFR_RNDN); return *this; }
    WideFloat& set(const WideFloat& o) { mpfr_set(x_, o.x_, MPFR_RNDN); return *this; }
    WideFloat& set_sum(const WideFloat& a, double d) { mpfr_add_d(x_, a.x_, d, MPFR_RNDN); return *this; }
    WideFloat& set_abs(const WideFloat& o) { mpfr_abs(x_, o.x_, MPFR_RNDN); return *this; }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    // log10|x|, -inf for zero
    double log10_abs() const;
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    int cmp_abs(const WideFloat& o) const { return mpfr_cmpabs(x_, o.x_); }

    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

private:
    mpfr_t x_;
};

inline double WideFloat::log10_abs() const {
    if (mpfr_zero_p(x_)) return -1e300;
    long exp = 0;
    const double mant = mpfr_get_d_2exp(&exp, x_, MPFR_RNDN);
    return std::log10(std::abs(mant)) + static_cast<double>(exp) * 0.30102999566398119521;
}

}  // namespace nldiff::detail
