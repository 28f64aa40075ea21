#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nldiff/hypergeom.hpp"
#include "nldiff/torus.hpp"

namespace nldiff {

/// Kernel parameters of the nonlocal Laplacian: dimension, horizon and exponent.
struct OperatorParams {
    int n = 1;
    double delta = 1.0;
    double beta = 1.0 / 3.0;

    /// n in {1,2,3}, delta > 0, beta < n+4.
    void validate() const;
    bool classical() const { return beta == n + 2; }
    bool operator==(const OperatorParams&) const = default;
};

enum class Branch { Hypergeometric, ExtendedHypergeometric, Quadrature, Asymptotic, ClassicalExact };

const char* to_string(Branch b);

struct MultiplierValue {
    double value = 0.0;
    Branch branch = Branch::Hypergeometric;
    double est_rel_error = 0.0;
};

struct DerivedConstants {
    double c_scaling = 0.0;
    double alpha = 0.0;  // NaN unless beta < n
};

double scaling_constant(const OperatorParams& p);

/// 2n(n+2-beta)/(delta^2 (n-beta)); throws InvalidParams when beta >= n.
double alpha_constant(const OperatorParams& p);

DerivedConstants derived_constants(const OperatorParams& p);

/// The multiplier leaves the double-precision series once it loses more than
/// this many digits, keeping its relative error near 1e-13.
inline constexpr double kMultiplierCancellation = 3.0;

/// Products X = |nu| delta above which the large-argument expansion is used.
inline constexpr double kDefaultCrossover = 30.0;

/// m(nu) for a frequency vector (only its Euclidean norm matters).
MultiplierValue multiplier(const OperatorParams& p, std::span<const double> nu,
                           double crossover = kDefaultCrossover);
MultiplierValue multiplier_radial(const OperatorParams& p, double nu_norm,
                                  double crossover = kDefaultCrossover);

/// Leading-order large-|nu| behaviour: the constant plus |nu|^(beta-n) term,
/// or the logarithmic form when beta = n.
double multiplier_asymptotic(const OperatorParams& p, double nu_norm);

/// Complete large-argument expansion: algebraic part plus optimally truncated
/// oscillatory series.  `est_abs_error` receives the size of the first
/// omitted oscillatory term.
double multiplier_expansion(const OperatorParams& p, double nu_norm, double* est_abs_error = nullptr);

/// Smallest X on the scan grid [x_min, x_max] beyond which the expansion and
/// the extended-precision series agree to `rel_tol` at every grid point.
double calibrate_crossover(const OperatorParams& p, double rel_tol = 1e-9, double x_min = 8.0,
                           double x_max = 200.0, double step = 0.5);

/// Radially reduced ball integral by adaptive Gauss-Kronrod quadrature.
/// Requires beta < n+2.  Throws QuadratureFailure when the tolerance is missed.
MultiplierValue multiplier_quadrature_oracle(const OperatorParams& p, std::span<const double> nu,
                                             double rel_tol = 1e-12);
MultiplierValue multiplier_quadrature_radial(const OperatorParams& p, double nu_norm,
                                             double rel_tol = 1e-12);

/// m(nu_k) over every stored lattice index, in the geometry's storage order.
struct MultiplierTable {
    OperatorParams params;
    TorusGeometry geom;
    std::vector<double> values;
    std::vector<Branch> branches;
    std::vector<double> est_rel_errors;

    double operator[](std::size_t idx) const { return values[idx]; }
};

MultiplierTable multiplier_table(const OperatorParams& p, const TorusGeometry& geom, unsigned threads = 1,
                                 double crossover = kDefaultCrossover);

/// Table with the classical multiplier -|nu_k|^2.
MultiplierTable classical_table(const TorusGeometry& geom);

}  // namespace nldiff
