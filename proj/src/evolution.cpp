#include "nldiff/evolution.hpp"

#include <cmath>
#include <sstream>

#include "nldiff/errors.hpp"
#include "nldiff/parallel.hpp"

namespace nldiff {
namespace {

void check_match(const SpectralField& f, const MultiplierTable& table) {
    if (!(f.geom == table.geom) || f.coeffs.size() != table.values.size()) {
        fail(ErrorKind::InvalidParams, "field geometry does not match the multiplier table");
    }
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        std::ostringstream os;
        os << "time must be finite and nonnegative, got " << t;
        fail(ErrorKind::InvalidParams, os.str());
    }
}

template <typename Fn>
SpectralField map_modes(const SpectralField& in, unsigned threads, Fn&& fn) {
    SpectralField out(in.geom, in.real);
    parallel_for(in.coeffs.size(), resolve_threads(threads), [&](std::size_t i) { out.coeffs[i] = fn(i, in.coeffs[i]); });
    return out;
}

// (expm1(z) - z)/z, accurate for small z.
double excess_ratio(double z) {
    if (std::abs(z) < 1e-2) {
        return z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720 + z / 5040)))));
    }
    return (std::expm1(z) - z) / z;
}

}  // namespace

double phi1(double m, double t) {
    const double z = m * t;
    if (std::abs(z) < 1e-4) return t * (1.0 + z / 2 * (1.0 + z / 3 * (1.0 + z / 4)));
    return std::expm1(z) / m;
}

SpectralField evolve_homogeneous(const SpectralField& f, const MultiplierTable& table, double t, unsigned threads) {
    check_match(f, table);
    check_time(t);
    return map_modes(f, threads, [&](std::size_t i, Complex c) { return c * std::exp(table.values[i] * t); });
}

SpectralField evolve_sourced(const SpectralField& b, const MultiplierTable& table, double t, unsigned threads) {
    check_match(b, table);
    check_time(t);
    return map_modes(b, threads, [&](std::size_t i, Complex c) { return c * phi1(table.values[i], t); });
}

SpectralField apply_operator(const SpectralField& field, const MultiplierTable& table, unsigned threads) {
    check_match(field, table);
    return map_modes(field, threads, [&](std::size_t i, Complex c) { return c * table.values[i]; });
}

void EvolutionProblem::validate() const {
    check_match(initial, table);
    if (source) check_match(*source, table);
}

SpectralField solve_field(const EvolutionProblem& problem, double t, unsigned threads) {
    problem.validate();
    check_time(t);
    SpectralField u = evolve_homogeneous(problem.initial, problem.table, t, threads);
    if (problem.source) {
        const SpectralField s = evolve_sourced(*problem.source, problem.table, t, threads);
        for (std::size_t i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] += s.coeffs[i];
        u.real = u.real && s.real;
    }
    return u;
}

EvolutionState solve(const EvolutionProblem& problem, double t, unsigned threads) {
    EvolutionState st;
    st.params = problem.table.params;
    st.geom = problem.table.geom;
    st.t = t;
    st.field = solve_field(problem, t, threads);
    st.derivative = apply_operator(st.field, problem.table, threads);
    if (problem.source) {
        for (std::size_t i = 0; i < st.derivative.coeffs.size(); ++i) st.derivative.coeffs[i] += problem.source->coeffs[i];
    }
    return st;
}

double residual(const EvolutionProblem& problem, double t, double h, double s) {
    if (!(h > 0.0 && h < t)) fail(ErrorKind::InvalidParams, "residual requires 0 < h < t");
    const SpectralField plus = solve_field(problem, t + h);
    const SpectralField minus = solve_field(problem, t - h);
    const EvolutionState now = solve(problem, t);
    SpectralField r(now.geom, now.field.real);
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
        r.coeffs[i] = (plus.coeffs[i] - minus.coeffs[i]) / (2 * h) - now.derivative.coeffs[i];
    }
    return sobolev_norm(r, s);
}

double gateaux_difference_check(const SpectralField& f, const MultiplierTable& table, double t, double h,
                                double s) {
    check_match(f, table);
    check_time(t);
    if (h == 0.0) fail(ErrorKind::InvalidParams, "difference step must be nonzero");
    SpectralField weighted(f.geom);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        const double m = table.values[i];
        const double bracket = m * excess_ratio(m * h);  // (e^{mh}-1)/h - m
        weighted.coeffs[i] = f.coeffs[i] * (bracket * std::exp(m * t));
    }
    const double norm = sobolev_norm(weighted, s);
    return norm * norm;
}

}  // namespace nldiff
