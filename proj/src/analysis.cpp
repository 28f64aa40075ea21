#include "nldiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nldiff/errors.hpp"
#include "nldiff/format.hpp"
#include "nldiff/parallel.hpp"

namespace nldiff {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(const std::string& s) {
    if (s.empty()) return kNaN;
    try {
        return std::stod(s);
    } catch (const std::logic_error&) {
        fail(ErrorKind::ConfigError, "report cell '" + s + "' is not a number");
    }
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_double(v[i]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- reports

bool ExperimentReport::pass() const {
    return std::all_of(measurements.begin(), measurements.end(), [](const Measurement& m) { return m.pass; });
}

void ExperimentReport::param(const std::string& key, double value) { param(key, format_double(value)); }

Measurement& ExperimentReport::check_close(const std::string& quantity, double value, double expected,
                                           double tolerance) {
    measurements.push_back({quantity, value, expected, tolerance, std::abs(value - expected) <= tolerance});
    return measurements.back();
}

Measurement& ExperimentReport::check_below(const std::string& quantity, double value, double bound) {
    measurements.push_back({quantity, value, 0.0, bound, value < bound});
    return measurements.back();
}

Measurement& ExperimentReport::check_flag(const std::string& quantity, bool ok) {
    measurements.push_back({quantity, ok ? 1.0 : 0.0, 1.0, 0.0, ok});
    return measurements.back();
}

CsvTable ExperimentReport::to_csv() const {
    CsvTable t;
    t.header = {"experiment", "kind", "name", "value", "expected", "tolerance", "pass"};
    for (const auto& [k, v] : parameters) t.add_row({id, "param", k, v, "", "", ""});
    for (const auto& m : measurements) {
        t.add_row({id, "measure", m.quantity, format_double(m.value), format_double(m.expected),
                   format_double(m.tolerance), m.pass ? "1" : "0"});
    }
    for (const auto& n : notes) t.add_row({id, "note", "", n, "", "", ""});
    t.add_row({id, "summary", "pass", pass() ? "1" : "0", "", "", ""});
    return t;
}

ExperimentReport ExperimentReport::from_csv(const CsvTable& table) {
    ExperimentReport r;
    if (table.header.size() != 7 || table.header[0] != "experiment") {
        fail(ErrorKind::ConfigError, "not an experiment report table");
    }
    for (const auto& row : table.rows) {
        r.id = row[0];
        if (row[1] == "param") {
            r.parameters.emplace_back(row[2], row[3]);
        } else if (row[1] == "measure") {
            r.measurements.push_back(
                {row[2], parse_number(row[3]), parse_number(row[4]), parse_number(row[5]), row[6] == "1"});
        } else if (row[1] == "note") {
            r.notes.push_back(row[3]);
        } else if (row[1] != "summary") {
            fail(ErrorKind::ConfigError, "unknown report row kind '" + row[1] + "'");
        }
    }
    return r;
}

// ------------------------------------------------------------- regularity

std::vector<ShellMax> shell_maxima(const SpectralField& field) {
    const auto& g = field.geom;
    std::vector<double> best(static_cast<std::size_t>(g.K) + 1, 0.0);
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const long shell = std::lround(g.k_norm(g.index_to_k(i)));
        if (shell < 1 || shell > g.K) continue;
        best[shell] = std::max(best[shell], std::abs(field.coeffs[i]));
    }
    std::vector<ShellMax> out;
    for (int s = 1; s <= g.K; ++s) out.push_back({s, best[s]});
    return out;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    PowerFit f;
    f.points = x.size();
    if (x.size() < 2 || x.size() != y.size()) fail(ErrorKind::InsufficientData, "power-law fit needs two or more points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) fail(ErrorKind::FitUnstable, "power-law fit abscissae coincide");
    f.exponent = sxy / sxx;
    f.log_prefactor = my - f.exponent * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::log(y[i]) - (f.log_prefactor + f.exponent * std::log(x[i]));
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / x.size());
    return f;
}

double theory_index(const RegularityContext& ctx, double s) {
    const auto& p = ctx.params;
    if (ctx.sourced) return p.beta > p.n ? s + p.beta - p.n : s;
    if (p.beta < p.n) return s;
    if (p.beta == p.n) return s + 4.0 * p.n * ctx.t * (1 - ctx.epsilon) / (p.delta * p.delta);
    return ctx.t > 0 ? kInf : s;
}

RegularityFit regularity_fit(const SpectralField& field, double s_init, const std::optional<RegularityContext>& ctx) {
    const int K = field.geom.K;
    const int lo = std::max(1, K / 8), hi = K / 2;
    if (hi - lo + 1 < static_cast<int>(kMinFitShells)) {
        std::ostringstream os;
        os << "fit band [" << lo << ", " << hi << "] has fewer than " << kMinFitShells << " shells";
        fail(ErrorKind::InsufficientData, os.str());
    }
    const auto shells = shell_maxima(field);
    std::vector<double> x, y;
    for (int s = lo; s <= hi; ++s) {
        const double v = shells[s - 1].value;
        if (v > 1e-300 && std::isfinite(v)) {
            x.push_back(s);
            y.push_back(v);
        }
    }
    RegularityFit r;
    r.epsilon_used = ctx ? ctx->epsilon : kNaN;
    r.theory_index = ctx ? theory_index(*ctx, s_init) : kNaN;
    if (x.size() < kMinFitShells) {
        // Nonzero shells at the bottom of the band that vanish above it mean
        // the coefficients underflowed: decay is faster than any power.
        if (shells[lo - 1].value > 0.0) {
            r.superpolynomial = true;
            r.fitted_decay_exponent = -kInf;
            r.implied_sobolev_index = kInf;
            r.shells_used = x.size();
            return r;
        }
        fail(ErrorKind::InsufficientData, "too few nonzero shells in the fit band");
    }
    const auto all = fit_power_law(x, y);
    const std::size_t half = x.size() / 2;
    const auto lower = fit_power_law({x.begin(), x.begin() + half}, {y.begin(), y.begin() + half});
    const auto upper = fit_power_law({x.begin() + half, x.end()}, {y.begin() + half, y.end()});
    r.fitted_decay_exponent = all.exponent;
    r.fit_residual = all.rms_residual;
    r.shells_used = x.size();
    r.implied_sobolev_index = -all.exponent - field.geom.n / 2.0;
    // A steepening log-log slope marks decay faster than any power.
    if (upper.exponent < lower.exponent - std::max(0.5, 0.25 * std::abs(lower.exponent))) {
        r.superpolynomial = true;
        r.implied_sobolev_index = kInf;
        return r;
    }
    if (all.rms_residual > kMaxFitResidual) {
        std::ostringstream os;
        os << "log-log fit residual " << all.rms_residual << " exceeds " << kMaxFitResidual;
        fail(ErrorKind::FitUnstable, os.str());
    }
    return r;
}

// ------------------------------------------------------------ convergence

namespace {

ConvergenceResult run_convergence(const ConvergenceConfig& cfg, bool sweep_delta) {
    cfg.params.validate();
    cfg.geom.validate();
    if (!(cfg.t > 0.0)) fail(ErrorKind::InvalidParams, "convergence study needs t > 0");
    if (cfg.sweep.empty()) fail(ErrorKind::InvalidParams, "empty sweep");
    if (cfg.s_report.empty()) fail(ErrorKind::InvalidParams, "no Sobolev index to report");
    const int n = cfg.params.n;

    std::vector<double> sweep = cfg.sweep;
    if (sweep_delta) {
        std::sort(sweep.begin(), sweep.end(), std::greater<>());
        for (double d : sweep) {
            if (!(d > 0.0)) fail(ErrorKind::InvalidParams, "horizon sweep values must be positive");
        }
        if (!(cfg.params.beta <= n + 2)) fail(ErrorKind::InvalidParams, "horizon sweep needs beta <= n+2");
    } else {
        std::sort(sweep.begin(), sweep.end());
        for (double b : sweep) {
            if (!(b > n && b <= n + 2)) fail(ErrorKind::InvalidParams, "exponent sweep values must lie in (n, n+2]");
        }
        if (sweep.back() != n + 2) sweep.push_back(n + 2);  // the classical endpoint
    }

    const SpectralField data = builtin_profile(cfg.profile, cfg.geom);
    const MultiplierTable classical = classical_table(cfg.geom);
    const SpectralField reference =
        cfg.sourced ? evolve_sourced(data, classical, cfg.t) : evolve_homogeneous(data, classical, cfg.t);

    std::vector<std::vector<double>> errors(sweep.size());
    parallel_for(sweep.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
        OperatorParams p = cfg.params;
        (sweep_delta ? p.delta : p.beta) = sweep[i];
        const MultiplierTable table = multiplier_table(p, cfg.geom);
        const SpectralField u = cfg.sourced ? evolve_sourced(data, table, cfg.t) : evolve_homogeneous(data, table, cfg.t);
        SpectralField diff(cfg.geom);
        for (std::size_t j = 0; j < diff.coeffs.size(); ++j) diff.coeffs[j] = u.coeffs[j] - reference.coeffs[j];
        for (double s : cfg.s_report) errors[i].push_back(sobolev_norm(diff, s));
    });

    ConvergenceResult res;
    auto& rep = res.report;
    rep.id = sweep_delta ? "converge-delta" : "converge-beta";
    rep.param("n", n);
    rep.param(sweep_delta ? "beta" : "delta", sweep_delta ? cfg.params.beta : cfg.params.delta);
    rep.param("t", cfg.t);
    rep.param("K", cfg.geom.K);
    rep.param("profile", cfg.profile.name);
    rep.param("problem", cfg.sourced ? "sourced" : "homogeneous");
    rep.param("sweep", join(sweep));
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        for (std::size_t j = 0; j < cfg.s_report.size(); ++j) res.rows.push_back({sweep[i], cfg.s_report[j], errors[i][j]});
    }

    bool decreasing = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (!(errors[i][0] < errors[i - 1][0] + 1e-12) || (errors[i - 1][0] > 0.0 && !(errors[i][0] < errors[i - 1][0]))) {
            decreasing = false;
        }
    }
    rep.check_flag("error_decreasing", decreasing);
    if (sweep_delta) {
        rep.check_below("final_error", errors.back()[0], cfg.tolerance);
        if (cfg.params.classical()) {
            double worst = 0.0;
            for (const auto& e : errors) worst = std::max(worst, e[0]);
            rep.check_close("classical_error", worst, 0.0, 0.0);
        }
    } else {
        // last swept value before the appended endpoint
        const std::size_t last = errors.size() >= 2 ? errors.size() - 2 : 0;
        rep.check_below("final_error", errors[last][0], cfg.tolerance);
        rep.check_close("endpoint_error", errors.back()[0], 0.0, 0.0);
    }
    return res;
}

}  // namespace

ConvergenceResult converge_delta(const ConvergenceConfig& cfg) { return run_convergence(cfg, true); }
ConvergenceResult converge_beta(const ConvergenceConfig& cfg) { return run_convergence(cfg, false); }

// ------------------------------------------------------- discontinuities

JumpDecomposition jump_decomposition(const SpectralField& f, const MultiplierTable& table, double t, double h) {
    if (!(f.geom == table.geom)) fail(ErrorKind::InvalidParams, "field geometry does not match the multiplier table");
    if (!(t >= 0.0)) fail(ErrorKind::InvalidParams, "time must be nonnegative");
    const double alpha = alpha_constant(table.params);
    JumpDecomposition d;
    d.alpha = alpha;
    d.t = t;
    d.g_of_t = std::exp(-alpha * t);
    d.f = f;
    d.u = SpectralField(f.geom, f.real);
    d.v = SpectralField(f.geom, f.real);
    d.h = SpectralField(f.geom, f.real);
    auto v_at = [&](std::size_t i, double tau) {
        const double m = table.values[i];
        return f.coeffs[i] * (-std::expm1(-(m + alpha) * tau) * std::exp(m * tau));
    };
    SpectralField res(f.geom);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        const double m = table.values[i];
        d.u.coeffs[i] = f.coeffs[i] * std::exp(m * t);
        d.v.coeffs[i] = v_at(i, t);
        d.h.coeffs[i] = f.coeffs[i] * (m + alpha);
        const Complex dv = (v_at(i, t + h) - v_at(i, t - h)) / (2 * h);
        res.coeffs[i] = dv - m * d.v.coeffs[i] - d.g_of_t * d.h.coeffs[i];
    }
    d.v_residual = sobolev_norm(res, 0.0);
    return d;
}

ContinuityResult continuity_check(const SpectralField& field, const std::vector<double>& candidates, double eps_side,
                                  unsigned threads) {
    if (field.geom.n != 1) fail(ErrorKind::InvalidParams, "continuity check is one-dimensional");
    std::vector<Point> pts;
    for (double y : candidates) {
        pts.push_back({y - eps_side, 0.0, 0.0});
        pts.push_back({y + eps_side, 0.0, 0.0});
    }
    const auto vals = synthesize(field, pts, threads);
    ContinuityResult r;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        r.differences.push_back(vals[2 * i + 1] - vals[2 * i]);
        const double jump = std::abs(r.differences.back());
        if (jump > r.max_jump) {
            r.max_jump = jump;
            r.at = candidates[i];
        }
    }
    const int K = field.geom.K;
    for (int k = -K; k <= K; ++k) {
        if (2 * std::abs(k) > K) r.certificate += std::abs(field.at({k, 0, 0}));
    }
    return r;
}

TorusGeometry JumpDecayConfig::geometry() const {
    TorusGeometry g;
    g.n = 1;
    g.periods = {interval_hi - interval_lo, 1.0, 1.0};
    g.K = K;
    g.origin = {interval_lo, 0.0, 0.0};
    return g;
}

JumpDecayResult jump_decay_experiment(const JumpDecayConfig& cfg) {
    if (cfg.params.n != 1) fail(ErrorKind::InvalidParams, "jump-decay experiment is one-dimensional");
    if (!(cfg.interval_hi > cfg.interval_lo)) fail(ErrorKind::InvalidParams, "empty interval");
    if (cfg.plot_intervals < 2 || cfg.scan_points < 1) fail(ErrorKind::InvalidParams, "too few plot or scan points");
    const TorusGeometry geom = cfg.geometry();
    geom.validate();
    const unsigned threads = resolve_threads(cfg.threads);
    const MultiplierTable table = multiplier_table(cfg.params, geom, threads);
    const SpectralField f = builtin_profile(cfg.profile, geom);
    const auto sing = profile_singularities(cfg.profile);
    const double period = geom.periods[0];

    JumpDecayResult out;
    auto& rep = out.report;
    rep.id = "jump-decay";
    rep.param("n", 1.0);
    rep.param("delta", cfg.params.delta);
    rep.param("beta", cfg.params.beta);
    rep.param("interval_lo", cfg.interval_lo);
    rep.param("interval_hi", cfg.interval_hi);
    rep.param("K", cfg.K);
    rep.param("profile", cfg.profile.name);
    rep.param("times", join(cfg.times));

    const double alpha = alpha_constant(cfg.params);
    out.alpha = alpha;
    const auto& p = cfg.params;
    const double alpha_formula = 2.0 * p.n * (p.n + 2 - p.beta) / (p.delta * p.delta * (p.n - p.beta));
    rep.check_close("alpha", alpha, alpha_formula, 1e-12 * alpha_formula);

    // One-sided offsets well inside the resolution scale of the series.
    const double nu_max = 2.0 * std::numbers::pi * cfg.K / period;
    const double eps = 0.01 / nu_max;
    rep.param("eps_side", eps);

    std::vector<double> scan;  // original coordinates
    for (int j = 0; j < cfg.scan_points; ++j) {
        scan.push_back(cfg.interval_lo + (j + 0.5) * period / cfg.scan_points);
    }
    std::vector<double> candidates = scan;
    for (const auto& s : sing) candidates.push_back(s.x);
    std::vector<double> candidates_torus;
    for (double x : candidates) candidates_torus.push_back(geom.to_torus(0, x));

    // Plot grid: a power-of-two multiple of the plot resolution above 2K+1.
    std::size_t stride = 1;
    while (stride * cfg.plot_intervals < geom.side()) stride *= 2;
    const std::size_t grid_n = stride * static_cast<std::size_t>(cfg.plot_intervals);
    const double split = sing.empty() ? 0.0 : [&] {
        for (const auto& s : sing) {
            if (s.value_jump != 0.0) return s.x;
        }
        return 0.0;
    }();

    std::vector<double> baseline_locations;
    bool locations_stable = true;
    auto tag = [](const std::string& q, double t) { return q + "@t=" + format_double(t); };
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        const double t = cfg.times[ti];
        const auto dec = jump_decomposition(f, table, t);
        const double g = dec.g_of_t;

        double identity_err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
            identity_err = std::max(identity_err, std::abs(dec.u.coeffs[i] - (dec.v.coeffs[i] + g * f.coeffs[i])));
            scale = std::max(scale, std::abs(f.coeffs[i]));
        }
        rep.check_below(tag("decomposition_identity", t), identity_err, 1e-13 * std::max(1.0, scale));
        rep.check_below(tag("v_residual", t), dec.v_residual, 1e-8);

        const auto cont = continuity_check(dec.v, candidates_torus, eps, threads);
        rep.check_below(tag("v_jump_max", t), cont.max_jump, cfg.jump_tolerance);
        rep.check_below(tag("v_certificate", t), cont.certificate, cfg.certificate_tolerance);

        // Jumps of u at every candidate: [v] + e^{-alpha t} [f].
        std::vector<double> located;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double x = candidates[c];
            const double fj = profile_value(cfg.profile, geom, x + eps) - profile_value(cfg.profile, geom, x - eps);
            const double uj = cont.differences[c].real() + g * fj;
            if (std::abs(uj) > 10 * cfg.jump_tolerance) located.push_back(x);
            if (c >= scan.size()) {
                const auto& s = sing[c - scan.size()];
                rep.check_close(tag("jump@x=" + format_double(s.x), t), uj, s.value_jump * std::exp(-alpha * t),
                                cfg.jump_tolerance);
            }
        }
        std::sort(located.begin(), located.end());
        if (ti == 0) {
            baseline_locations = located;
        } else if (located != baseline_locations) {
            locations_stable = false;
        }

        // Profile rows: v from the grid, f exactly.
        const auto grid = synthesize_grid(dec.v, grid_n);
        for (int j = 0; j <= cfg.plot_intervals; ++j) {
            const double x = cfg.interval_lo + j * period / cfg.plot_intervals;
            const double v = grid[(static_cast<std::size_t>(j) * stride) % grid_n].real();
            ProfileRow row{t, x, std::nullopt, std::nullopt, g};
            if (x <= split) row.left = v + g * (x == split ? profile_value(cfg.profile, geom, x - eps)
                                                          : profile_value(cfg.profile, geom, x));
            if (x >= split) row.right = v + g * (x == split ? profile_value(cfg.profile, geom, x + eps)
                                                           : profile_value(cfg.profile, geom, x));
            out.profile.push_back(row);
        }
    }
    std::string where;
    for (double x : baseline_locations) where += (where.empty() ? "" : ";") + format_double(x);
    rep.param("jump_locations", where);
    rep.check_flag("jump_locations_unchanged", locations_stable);
    rep.notes.push_back("jump sizes follow exp(-alpha t) with alpha = " + format_double(alpha) +
                        "; a jump halves after ln2/alpha = " + format_double(std::log(2.0) / alpha) +
                        " time units, fast relative to the plotted times");
    rep.notes.push_back("points -1 and 1 are kinks of the initial data (slope jumps), with no value jump");
    return out;
}

// ------------------------------------------------------ m + alpha decay

double expected_m_plus_alpha_exponent(const OperatorParams& p) {
    return p.beta > (p.n - 1) / 2.0 ? p.beta - p.n : -(p.n + 1) / 2.0;
}

ExperimentReport m_plus_alpha_exponent_fit(const ExponentFitConfig& cfg) {
    const auto& p = cfg.params;
    const double alpha = alpha_constant(p);
    if (!(cfg.x_max > cfg.x_min && cfg.x_min > 0.0) || cfg.windows < 3 || cfg.samples_per_window < 4) {
        fail(ErrorKind::InvalidParams, "bad exponent-fit grid");
    }
    std::vector<double> centres, rms;
    for (int w = 0; w < cfg.windows; ++w) {
        const double X = cfg.x_min * std::pow(cfg.x_max / cfg.x_min, static_cast<double>(w) / (cfg.windows - 1));
        double acc = 0.0;
        for (int j = 0; j < cfg.samples_per_window; ++j) {
            const double Xj = X + 2.0 * std::numbers::pi * (j + 0.5) / cfg.samples_per_window;
            const double d = multiplier_radial(p, Xj / p.delta).value + alpha;
            acc += d * d;
        }
        centres.push_back(X / p.delta);
        rms.push_back(std::sqrt(acc / cfg.samples_per_window));
    }
    const auto fit = fit_power_law(centres, rms);
    if (fit.rms_residual > 0.2) {
        std::ostringstream os;
        os << "windowed fit of |m + alpha| has log residual " << fit.rms_residual;
        fail(ErrorKind::FitUnstable, os.str());
    }
    ExperimentReport rep;
    rep.id = "m-plus-alpha";
    rep.param("n", p.n);
    rep.param("delta", p.delta);
    rep.param("beta", p.beta);
    rep.param("x_min", cfg.x_min);
    rep.param("x_max", cfg.x_max);
    rep.param("windows", cfg.windows);
    const double expected = expected_m_plus_alpha_exponent(p);
    rep.check_close("exponent", fit.exponent, expected, cfg.tolerance * std::abs(expected));
    rep.param("prefactor", std::exp(fit.log_prefactor));
    rep.param("fit_residual", fit.rms_residual);
    return rep;
}

}  // namespace nldiff
