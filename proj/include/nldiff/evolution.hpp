#pragma once

#include <optional>

#include "nldiff/multiplier.hpp"
#include "nldiff/torus.hpp"

namespace nldiff {

/// (e^{mt} - 1)/m, equal to t at m = 0.  Uses a four-term Taylor series for
/// |mt| < 1e-4.
double phi1(double m, double t);

/// Coefficients f_k e^{m(nu_k) t}.
SpectralField evolve_homogeneous(const SpectralField& f, const MultiplierTable& table, double t,
                                 unsigned threads = 1);

/// Coefficients phi1(m(nu_k), t) b_k: zero initial data, constant-in-time source.
SpectralField evolve_sourced(const SpectralField& b, const MultiplierTable& table, double t,
                             unsigned threads = 1);

/// Entrywise m(nu_k) c_k.
SpectralField apply_operator(const SpectralField& field, const MultiplierTable& table, unsigned threads = 1);

/// Initial data f and optional source b, solved by superposition.
struct EvolutionProblem {
    MultiplierTable table;
    SpectralField initial;
    std::optional<SpectralField> source;

    /// Throws InvalidParams if the fields and table disagree on geometry.
    void validate() const;
};

/// U(t) and its time derivative V(t) = L U(t) + b.
struct EvolutionState {
    OperatorParams params;
    TorusGeometry geom;
    double t = 0.0;
    SpectralField field;
    SpectralField derivative;
};

SpectralField solve_field(const EvolutionProblem& problem, double t, unsigned threads = 1);
EvolutionState solve(const EvolutionProblem& problem, double t, unsigned threads = 1);

/// || (U(t+h) - U(t-h))/(2h) - L U(t) - b ||_{H^s}; requires 0 < h < t.
double residual(const EvolutionProblem& problem, double t, double h, double s = 0.0);

/// Truncated Gateaux sum  sum_k (1+|k|^2)^s |f_k|^2 ((e^{mh}-1)/h - m)^2 e^{2mt}.
double gateaux_difference_check(const SpectralField& f, const MultiplierTable& table, double t, double h,
                                double s);

}  // namespace nldiff
