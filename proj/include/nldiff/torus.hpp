#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace nldiff {

using Complex = std::complex<double>;
using Index = std::array<int, 3>;
using Point = std::array<double, 3>;

/// The torus prod_i [0, r_i) with Fourier modes |k|_inf <= K.
///
/// `origin` is the original-coordinate position of the torus point 0, so a
/// problem posed on (-10, 10) lives on [0, 20) with origin -10.  All library
/// functions take torus coordinates; to_torus / to_original convert.
struct TorusGeometry {
    int n = 1;
    Point periods{2.0 * 3.14159265358979323846, 1.0, 1.0};
    int K = 16;
    Point origin{0.0, 0.0, 0.0};

    /// Throws InvalidParams on n outside {1,2,3}, nonpositive periods or K < 1.
    void validate() const;

    std::size_t side() const { return static_cast<std::size_t>(2 * K + 1); }
    std::size_t size() const;

    /// Lexicographic storage: k_1 varies slowest.
    std::size_t index_of(const Index& k) const;
    Index index_to_k(std::size_t idx) const;

    double frequency(int axis, int k) const;
    Point nu(const Index& k) const;
    double nu_norm(const Index& k) const;
    double k_norm(const Index& k) const;

    /// Lattice comparison constants: A|k| <= |nu_k| <= B|k|.
    double lattice_lower() const;
    double lattice_upper() const;

    double to_torus(int axis, double x) const { return x - origin[axis]; }
    double to_original(int axis, double y) const { return y + origin[axis]; }

    bool operator==(const TorusGeometry& o) const;
};

/// Frequencies nu_k for every stored index, in storage order.
std::vector<Point> frequencies(const TorusGeometry& geom);

/// Truncated Fourier series sum_k c_k exp(i nu_k . y).
struct SpectralField {
    TorusGeometry geom;
    std::vector<Complex> coeffs;
    bool real = false;

    SpectralField() = default;
    explicit SpectralField(const TorusGeometry& g, bool is_real = false)
        : geom(g), coeffs(g.size()), real(is_real) {}

    Complex& at(const Index& k) { return coeffs[geom.index_of(k)]; }
    const Complex& at(const Index& k) const { return coeffs[geom.index_of(k)]; }

    /// Largest |c(-k) - conj(c(k))|.
    double conjugate_asymmetry() const;
};

/// Trapezoidal Fourier coefficients of samples on the uniform grid with
/// `points` nodes per axis (node j at j*r/points), stored lexicographically.
/// Throws GridTooCoarse when points < 2K+1.
SpectralField analyze(const TorusGeometry& geom, const std::vector<Complex>& samples, std::size_t points);

/// Direct evaluation at arbitrary torus points.
std::vector<Complex> synthesize(const SpectralField& field, const std::vector<Point>& points,
                                unsigned threads = 1);

/// Samples on the uniform grid with `points` nodes per axis (inverse FFT).
std::vector<Complex> synthesize_grid(const SpectralField& field, std::size_t points);

/// sqrt(sum (1+|k|^2)^s |c_k|^2), compensated, in storage order.
double sobolev_norm(const SpectralField& field, double s);

/// Built-in initial data / sources.
struct ProfileSpec {
    // sawtooth_pair, step, single_mode, cosine_mode, smooth_bump, constant
    std::string name = "sawtooth_pair";
    Index mode{1, 0, 0};
    double kappa = 1.0;      // smooth_bump concentration
    double amplitude = 1.0;  // constant / single_mode scale

    bool operator==(const ProfileSpec&) const = default;
};

/// Analytic Fourier coefficients of a built-in profile.  Throws UnknownProfile.
SpectralField builtin_profile(const ProfileSpec& spec, const TorusGeometry& geom);

/// Value and slope jumps of a piecewise profile in original coordinates.
struct Singularity {
    double x;            // original coordinate
    double value_jump;   // f(x+) - f(x-)
    double slope_jump;   // f'(x+) - f'(x-)
};
std::vector<Singularity> profile_singularities(const ProfileSpec& spec);

/// Pointwise value of a built-in profile at an original-coordinate point
/// (1-D piecewise profiles only; used for plotting the reference).
double profile_value(const ProfileSpec& spec, const TorusGeometry& geom, double x);

/// CSV with columns k1..kn,re,im.
void write_field_csv(std::ostream& os, const SpectralField& field);
SpectralField read_field_csv(std::istream& is, const TorusGeometry& geom);

}  // namespace nldiff
