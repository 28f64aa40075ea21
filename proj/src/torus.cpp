#include "nldiff/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nldiff/errors.hpp"
#include "nldiff/format.hpp"
#include "nldiff/parallel.hpp"

namespace nldiff {
namespace {

using std::numbers::pi;

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t count)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

void run_fft(int n, std::size_t points, fftw_complex* buf, int sign) {
    int dims[3] = {static_cast<int>(points), static_cast<int>(points), static_cast<int>(points)};
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(n, dims, buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Neumaier summation helper.
struct Compensated {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

void TorusGeometry::validate() const {
    std::ostringstream os;
    if (n < 1 || n > 3) {
        os << "torus dimension must be 1, 2 or 3, got " << n;
    } else if (K < 1) {
        os << "bandwidth must be at least 1, got " << K;
    } else {
        for (int i = 0; i < n; ++i) {
            if (!(periods[i] > 0.0) || !std::isfinite(periods[i])) {
                os << "period " << i << " must be positive, got " << periods[i];
                fail(ErrorKind::InvalidParams, os.str());
            }
        }
        return;
    }
    fail(ErrorKind::InvalidParams, os.str());
}

std::size_t TorusGeometry::size() const { return ipow(side(), n); }

std::size_t TorusGeometry::index_of(const Index& k) const {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * side() + static_cast<std::size_t>(k[i] + K);
    return idx;
}

Index TorusGeometry::index_to_k(std::size_t idx) const {
    Index k{0, 0, 0};
    for (int i = n - 1; i >= 0; --i) {
        k[i] = static_cast<int>(idx % side()) - K;
        idx /= side();
    }
    return k;
}

double TorusGeometry::frequency(int axis, int k) const { return 2.0 * pi * k / periods[axis]; }

Point TorusGeometry::nu(const Index& k) const {
    Point v{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) v[i] = frequency(i, k[i]);
    return v;
}

double TorusGeometry::nu_norm(const Index& k) const {
    const Point v = nu(k);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

double TorusGeometry::k_norm(const Index& k) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(k[i]) * k[i];
    return std::sqrt(s);
}

double TorusGeometry::lattice_lower() const {
    double a = 2.0 * pi / periods[0];
    for (int i = 1; i < n; ++i) a = std::min(a, 2.0 * pi / periods[i]);
    return a;
}

double TorusGeometry::lattice_upper() const {
    double b = 2.0 * pi / periods[0];
    for (int i = 1; i < n; ++i) b = std::max(b, 2.0 * pi / periods[i]);
    return b;
}

bool TorusGeometry::operator==(const TorusGeometry& o) const {
    if (n != o.n || K != o.K) return false;
    for (int i = 0; i < n; ++i) {
        if (periods[i] != o.periods[i] || origin[i] != o.origin[i]) return false;
    }
    return true;
}

std::vector<Point> frequencies(const TorusGeometry& geom) {
    geom.validate();
    std::vector<Point> out(geom.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = geom.nu(geom.index_to_k(i));
    return out;
}

double SpectralField::conjugate_asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Index k = geom.index_to_k(i);
        for (int a = 0; a < geom.n; ++a) k[a] = -k[a];
        worst = std::max(worst, std::abs(coeffs[geom.index_of(k)] - std::conj(coeffs[i])));
    }
    return worst;
}

SpectralField analyze(const TorusGeometry& geom, const std::vector<Complex>& samples, std::size_t points) {
    geom.validate();
    if (points < geom.side()) {
        std::ostringstream os;
        os << "grid has " << points << " points per axis, need at least " << geom.side();
        fail(ErrorKind::GridTooCoarse, os.str());
    }
    const std::size_t total = ipow(points, geom.n);
    if (samples.size() != total) fail(ErrorKind::InvalidParams, "sample count does not match grid size");

    FftwBuffer buf(total);
    bool real = true;
    for (std::size_t i = 0; i < total; ++i) {
        buf.data[i][0] = samples[i].real();
        buf.data[i][1] = samples[i].imag();
        if (samples[i].imag() != 0.0) real = false;
    }
    run_fft(geom.n, points, buf.data, FFTW_FORWARD);

    SpectralField field(geom, real);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const Index k = geom.index_to_k(i);
        std::size_t g = 0;
        for (int a = 0; a < geom.n; ++a) {
            const long m = k[a] < 0 ? static_cast<long>(points) + k[a] : k[a];
            g = g * points + static_cast<std::size_t>(m);
        }
        field.coeffs[i] = Complex(buf.data[g][0], buf.data[g][1]) * scale;
    }
    return field;
}

std::vector<Complex> synthesize(const SpectralField& field, const std::vector<Point>& points, unsigned threads) {
    const auto& g = field.geom;
    const int K = g.K;
    std::vector<Complex> out(points.size());
    parallel_for(points.size(), resolve_threads(threads), [&](std::size_t p) {
        // Per-axis phase tables exp(i nu_k y): exact every kResync modes,
        // short multiplicative runs in between.
        constexpr int kResync = 32;
        std::vector<Complex> phase[3];
        for (int a = 0; a < g.n; ++a) {
            phase[a].resize(g.side());
            const double y = points[p][a];
            const Complex step = std::polar(1.0, g.frequency(a, 1) * y);
            Complex e = 1.0;
            for (int k = 0; k <= K; ++k) {
                e = (k % kResync == 0) ? std::polar(1.0, g.frequency(a, k) * y) : e * step;
                phase[a][K + k] = e;
                phase[a][K - k] = std::conj(e);
            }
        }
        Complex sum = 0.0;
        for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
            if (field.coeffs[i] == Complex(0.0)) continue;
            const Index k = g.index_to_k(i);
            Complex e = phase[0][k[0] + K];
            for (int a = 1; a < g.n; ++a) e *= phase[a][k[a] + K];
            sum += field.coeffs[i] * e;
        }
        out[p] = sum;
    });
    return out;
}

std::vector<Complex> synthesize_grid(const SpectralField& field, std::size_t points) {
    const auto& g = field.geom;
    if (points < g.side()) {
        std::ostringstream os;
        os << "grid has " << points << " points per axis, need at least " << g.side();
        fail(ErrorKind::GridTooCoarse, os.str());
    }
    const std::size_t total = ipow(points, g.n);
    FftwBuffer buf(total);
    std::fill_n(&buf.data[0][0], 2 * total, 0.0);
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const Index k = g.index_to_k(i);
        std::size_t idx = 0;
        for (int a = 0; a < g.n; ++a) {
            const long m = k[a] < 0 ? static_cast<long>(points) + k[a] : k[a];
            idx = idx * points + static_cast<std::size_t>(m);
        }
        buf.data[idx][0] = field.coeffs[i].real();
        buf.data[idx][1] = field.coeffs[i].imag();
    }
    run_fft(g.n, points, buf.data, FFTW_BACKWARD);
    std::vector<Complex> out(total);
    for (std::size_t i = 0; i < total; ++i) out[i] = Complex(buf.data[i][0], field.real ? 0.0 : buf.data[i][1]);
    return out;
}

double sobolev_norm(const SpectralField& field, double s) {
    Compensated acc;
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const auto& c = field.coeffs[i];
        const double mag2 = std::norm(c);
        if (mag2 == 0.0) continue;
        const double kk = field.geom.k_norm(field.geom.index_to_k(i));
        acc.add(std::pow(1.0 + kk * kk, s) * mag2);
    }
    return std::sqrt(acc.value());
}

namespace {

void require_1d(const ProfileSpec& spec, const TorusGeometry& geom) {
    if (geom.n != 1) fail(ErrorKind::InvalidParams, "profile '" + spec.name + "' is one-dimensional");
}

// Original-coordinate coefficient of the two-ramp profile, period r.
Complex sawtooth_original(double w, double r) {
    if (w == 0.0) return 0.0;
    return Complex(0.0, 2.0 / r * (1.0 / w - std::sin(w) / (w * w)));
}

double log_bessel_i_estimate(int k, double kappa) {
    return k * std::log(kappa / 2) - std::lgamma(k + 1.0);
}

}  // namespace

SpectralField builtin_profile(const ProfileSpec& spec, const TorusGeometry& geom) {
    geom.validate();
    const std::string& name = spec.name;
    if (name == "sawtooth_pair") {
        require_1d(spec, geom);
        const double r = geom.periods[0];
        if (geom.origin[0] > -1.0 || geom.origin[0] + r < 1.0) {
            fail(ErrorKind::InvalidParams, "sawtooth_pair needs the fundamental domain to contain [-1, 1]");
        }
        SpectralField f(geom, true);
        for (int k = -geom.K; k <= geom.K; ++k) {
            const double w = geom.frequency(0, k);
            f.at({k, 0, 0}) = sawtooth_original(w, r) * std::polar(1.0, w * geom.origin[0]);
        }
        return f;
    }
    if (name == "step") {
        require_1d(spec, geom);
        SpectralField f(geom, true);
        for (int k = -geom.K; k <= geom.K; ++k) {
            if (k == 0) {
                f.at({0, 0, 0}) = 0.5;
            } else if (k % 2 != 0) {
                f.at({k, 0, 0}) = Complex(0.0, -1.0 / (pi * k));  // (1-(-1)^k)/(2 pi i k)
            }
        }
        return f;
    }
    if (name == "single_mode" || name == "cosine_mode") {
        for (int a = 0; a < geom.n; ++a) {
            if (std::abs(spec.mode[a]) > geom.K) fail(ErrorKind::InvalidParams, "mode lies outside the truncation");
        }
        Index neg = spec.mode;
        for (int a = 0; a < geom.n; ++a) neg[a] = -neg[a];
        const bool cosine = name == "cosine_mode";
        SpectralField f(geom, cosine);
        if (cosine) {
            f.at(spec.mode) += 0.5 * spec.amplitude;
            f.at(neg) += 0.5 * spec.amplitude;
        } else {
            f.at(spec.mode) = spec.amplitude;
            f.real = geom.index_of(spec.mode) == geom.index_of(neg);
        }
        return f;
    }
    if (name == "constant") {
        SpectralField f(geom, true);
        f.at({0, 0, 0}) = spec.amplitude;
        return f;
    }
    if (name == "smooth_bump") {
        // prod_a exp(kappa cos(2 pi y_a / r_a)) / I_0(kappa)
        if (!(spec.kappa > 0.0)) fail(ErrorKind::InvalidParams, "smooth_bump needs kappa > 0");
        std::vector<double> axis(geom.side());
        const double i0 = std::cyl_bessel_i(0.0, spec.kappa);
        for (int k = -geom.K; k <= geom.K; ++k) {
            const int m = std::abs(k);
            axis[k + geom.K] = (m > 0 && log_bessel_i_estimate(m, spec.kappa) < -700.0)
                                   ? 0.0
                                   : std::cyl_bessel_i(static_cast<double>(m), spec.kappa) / i0;
        }
        SpectralField f(geom, true);
        for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
            const Index k = geom.index_to_k(i);
            double v = 1.0;
            for (int a = 0; a < geom.n; ++a) v *= axis[k[a] + geom.K];
            f.coeffs[i] = v;
        }
        return f;
    }
    fail(ErrorKind::UnknownProfile, "unknown profile '" + name + "'");
}

std::vector<Singularity> profile_singularities(const ProfileSpec& spec) {
    if (spec.name == "sawtooth_pair") return {{-1.0, 0.0, 1.0}, {0.0, -2.0, 0.0}, {1.0, 0.0, -1.0}};
    return {};
}

double profile_value(const ProfileSpec& spec, const TorusGeometry& geom, double x) {
    if (spec.name == "sawtooth_pair") {
        if (x > -1.0 && x <= 0.0) return x + 1.0;
        if (x > 0.0 && x < 1.0) return x - 1.0;
        return 0.0;
    }
    if (spec.name == "step") {
        const double r = geom.periods[0];
        double y = std::fmod(geom.to_torus(0, x), r);
        if (y < 0) y += r;
        return y < r / 2 ? 1.0 : 0.0;
    }
    fail(ErrorKind::UnknownProfile, "no pointwise formula for profile '" + spec.name + "'");
}

void write_field_csv(std::ostream& os, const SpectralField& field) {
    for (int a = 0; a < field.geom.n; ++a) os << 'k' << (a + 1) << ',';
    os << "re,im\n";
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const Index k = field.geom.index_to_k(i);
        for (int a = 0; a < field.geom.n; ++a) os << k[a] << ',';
        os << format_double(field.coeffs[i].real()) << ',' << format_double(field.coeffs[i].imag()) << '\n';
    }
}

SpectralField read_field_csv(std::istream& is, const TorusGeometry& geom) {
    geom.validate();
    SpectralField field(geom);
    std::string line;
    if (!std::getline(is, line)) fail(ErrorKind::ConfigError, "field CSV is empty");
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != static_cast<std::size_t>(geom.n + 2)) {
            fail(ErrorKind::ConfigError, "field CSV row " + std::to_string(row) + " has the wrong column count");
        }
        try {
            Index k{0, 0, 0};
            for (int a = 0; a < geom.n; ++a) k[a] = std::stoi(cells[a]);
            for (int a = 0; a < geom.n; ++a) {
                if (std::abs(k[a]) > geom.K) fail(ErrorKind::ConfigError, "field CSV index exceeds bandwidth");
            }
            field.at(k) = Complex(std::stod(cells[geom.n]), std::stod(cells[geom.n + 1]));
        } catch (const std::logic_error&) {
            fail(ErrorKind::ConfigError, "field CSV row " + std::to_string(row) + " is malformed");
        }
    }
    field.real = field.conjugate_asymmetry() <= 1e-12;
    return field;
}

}  // namespace nldiff
