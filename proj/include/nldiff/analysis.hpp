#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nldiff/csv.hpp"
#include "nldiff/evolution.hpp"
#include "nldiff/multiplier.hpp"
#include "nldiff/torus.hpp"

namespace nldiff {

// ---------------------------------------------------------------- reports

struct Measurement {
    std::string quantity;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// One experiment: parameters, measured quantities with tolerances, notes.
/// The CSV form carries everything except the wall-clock runtime, so that
/// reruns produce identical bytes.
struct ExperimentReport {
    std::string id;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<Measurement> measurements;
    std::vector<std::string> notes;
    double runtime_seconds = 0.0;

    bool pass() const;
    void param(const std::string& key, const std::string& value) { parameters.emplace_back(key, value); }
    void param(const std::string& key, double value);
    /// Adds a measurement that passes when |value - expected| <= tolerance.
    Measurement& check_close(const std::string& quantity, double value, double expected, double tolerance);
    /// Adds a measurement that passes when value < bound.
    Measurement& check_below(const std::string& quantity, double value, double bound);
    Measurement& check_flag(const std::string& quantity, bool ok);

    CsvTable to_csv() const;
    static ExperimentReport from_csv(const CsvTable& table);
};

// ------------------------------------------------------------- regularity

struct ShellMax {
    int shell;     // round(|k|)
    double value;  // max |c_k| on the shell
};

/// Per-shell maxima of |c_k| for shells 1..K (shell 0 omitted).
std::vector<ShellMax> shell_maxima(const SpectralField& field);

/// Least-squares slope of log value against log shell over [lo, hi].
struct PowerFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct RegularityContext {
    OperatorParams params;
    double t = 0.0;
    bool sourced = false;
    double epsilon = 0.01;
};

/// Sobolev index promised by the regularity theorems for data in H^s.
/// Returns +inf for the H^infinity cases.
double theory_index(const RegularityContext& ctx, double s);

struct RegularityFit {
    double fitted_decay_exponent = 0.0;
    double implied_sobolev_index = 0.0;  // -exponent - n/2
    double theory_index = 0.0;           // NaN without a context
    double epsilon_used = 0.0;
    double fit_residual = 0.0;
    std::size_t shells_used = 0;
    bool superpolynomial = false;  // decay faster than any power; exponent not meaningful
};

inline constexpr std::size_t kMinFitShells = 64;
inline constexpr double kMaxFitResidual = 0.25;

/// Shell-maximum fit over |k| in [K/8, K/2].  Throws InsufficientData with
/// fewer than 64 usable shells and FitUnstable when the log residual is large.
RegularityFit regularity_fit(const SpectralField& field, double s_init,
                             const std::optional<RegularityContext>& ctx = std::nullopt);

// ------------------------------------------------------------ convergence

struct ConvergenceConfig {
    OperatorParams params;  // delta (beta) is replaced by each sweep value
    TorusGeometry geom;
    ProfileSpec profile;
    bool sourced = false;
    double t = 0.1;
    std::vector<double> sweep;
    std::vector<double> s_report{0.0};  // first entry drives the assertions
    double tolerance = 1e-3;
    unsigned threads = 1;
};

struct ConvergenceRow {
    double sweep_value;
    double s;
    double error;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    ExperimentReport report;
};

/// ||u^{delta,beta}(t) - u(t)||_{H^s} against the classical solution, per delta.
ConvergenceResult converge_delta(const ConvergenceConfig& cfg);
/// The same, per beta approaching n+2.
ConvergenceResult converge_beta(const ConvergenceConfig& cfg);

// ------------------------------------------------------- discontinuities

struct JumpDecomposition {
    double alpha = 0.0;
    double t = 0.0;
    double g_of_t = 1.0;  // e^{-alpha t}
    SpectralField f;      // initial data
    SpectralField u;      // e^{m t} f
    SpectralField v;      // continuous part
    SpectralField h;      // (m + alpha) f
    double v_residual = 0.0;
};

/// u = v + e^{-alpha t} f for beta < n.  The residual of
/// v_t = L v + e^{-alpha t} h is checked by central differences with step `h`.
JumpDecomposition jump_decomposition(const SpectralField& f, const MultiplierTable& table, double t,
                                     double h = 1e-5);

struct ContinuityResult {
    double max_jump = 0.0;  // largest |v(x+eps) - v(x-eps)| over the candidates
    double at = 0.0;        // torus coordinate of that maximum
    double certificate = 0.0;  // sum over |k| > K/2 of |c_k|
    std::vector<Complex> differences;  // c(y+eps) - c(y-eps) per candidate
};

/// One-sided differences at torus points y +- eps_side (n = 1).
ContinuityResult continuity_check(const SpectralField& field, const std::vector<double>& candidates,
                                  double eps_side, unsigned threads = 1);

struct JumpDecayConfig {
    OperatorParams params{1, 1.0, 1.0 / 3.0};
    double interval_lo = -10.0;
    double interval_hi = 10.0;
    int K = 131072;
    ProfileSpec profile;  // sawtooth_pair
    std::vector<double> times{0.0, 0.05, 0.1, 0.2};
    int plot_intervals = 1024;
    int scan_points = 200;
    double jump_tolerance = 1e-3;
    double certificate_tolerance = 1e-4;
    unsigned threads = 1;

    TorusGeometry geometry() const;
};

struct ProfileRow {
    double t;
    double x;  // original coordinate
    std::optional<double> left, right;
    double envelope;  // e^{-alpha t}
};

struct JumpDecayResult {
    ExperimentReport report;
    std::vector<ProfileRow> profile;
    double alpha = 0.0;
};

JumpDecayResult jump_decay_experiment(const JumpDecayConfig& cfg);

// ------------------------------------------------------ m + alpha decay

struct ExponentFitConfig {
    OperatorParams params;
    double x_min = 200.0;   // window centres in X = |nu| delta
    double x_max = 20000.0;
    int windows = 30;
    int samples_per_window = 32;  // across one 2 pi period in X
    double tolerance = 0.05;      // relative, on the exponent
};

/// Expected decay exponent of |m + alpha|: beta - n above (n-1)/2, else -(n+1)/2.
double expected_m_plus_alpha_exponent(const OperatorParams& p);

/// Log-log fit of the windowed RMS of |m(nu) + alpha|.  Throws FitUnstable.
ExperimentReport m_plus_alpha_exponent_fit(const ExponentFitConfig& cfg);

}  // namespace nldiff
