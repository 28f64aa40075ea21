#include "nldiff/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "nldiff/errors.hpp"
#include "nldiff/evolution.hpp"
#include "nldiff/format.hpp"
#include "nldiff/parallel.hpp"
#include "nldiff/svg.hpp"

namespace nldiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return format_double(v); }

void describe(ExperimentReport& rep, const RunConfig& cfg) {
    rep.param("n", cfg.params.n);
    rep.param("delta", cfg.params.delta);
    rep.param("beta", cfg.params.beta);
}

SpectralField initial_field(const RunConfig& cfg, const TorusGeometry& g) {
    if (cfg.input_field.empty()) return builtin_profile(cfg.profile, g);
    std::ifstream in(cfg.input_field);
    if (!in) fail(ErrorKind::ConfigError, "cannot open input field '" + cfg.input_field + "'");
    return read_field_csv(in, g);
}

SpectralField zero_field(const TorusGeometry& g) {
    ProfileSpec z;
    z.name = "constant";
    z.amplitude = 0.0;
    return builtin_profile(z, g);
}

void require_builtin(const RunConfig& cfg) {
    if (!cfg.input_field.empty())
        fail(ErrorKind::ConfigError, "command '" + cfg.command + "' takes a built-in profile, not input_field");
}

PlotSeries curve(std::string label, bool dashed = false) {
    PlotSeries s;
    s.label = std::move(label);
    s.dashed = dashed;
    return s;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-30); }

}  // namespace

CommandOutput cmd_multiplier(const RunConfig& cfg) {
    cfg.validate();
    const auto& p = cfg.params;
    const unsigned threads = resolve_threads(cfg.threads);
    const double tol = cfg.tolerance.value_or(1e-8);
    const std::size_t count = static_cast<std::size_t>(cfg.nu_points);

    struct Row {
        double nu, hyper, quad, asym;
        Branch branch;
    };
    std::vector<Row> rows(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const double nu = count == 1 ? cfg.nu_max : cfg.nu_max * static_cast<double>(i) / (count - 1);
        const auto h = multiplier_radial(p, nu);
        Row r{nu, h.value, kNaN, kNaN, h.branch};
        if (nu == 0.0) {
            r.quad = r.asym = 0.0;
        } else if (p.classical()) {
            r.quad = r.asym = -nu * nu;
        } else {
            if (p.beta < p.n + 2) r.quad = multiplier_quadrature_radial(p, nu).value;
            try {
                r.asym = multiplier_asymptotic(p, nu);
            } catch (const Error&) {
                // no leading-order form at beta = n+4, n+6, ...
            }
        }
        rows[i] = r;
    });

    CommandOutput out;
    out.name = "multiplier";
    out.table.header = {"nu_norm", "m_hyper", "m_quadrature", "m_asymptotic", "branch", "rel_disagreement"};
    double worst = 0.0;
    double classical_worst = 0.0;
    PlotSeries sh = curve("hypergeometric"), sq = curve("quadrature", true), sa = curve("asymptotic", true);
    for (const auto& r : rows) {
        const double d = std::isnan(r.quad) ? kNaN : rel_diff(r.hyper, r.quad);
        if (p.beta < p.n + 2 && !std::isnan(d)) worst = std::max(worst, d);
        if (p.classical()) classical_worst = std::max(classical_worst, rel_diff(r.hyper, -r.nu * r.nu));
        out.table.add_row({fmt(r.nu), fmt(r.hyper), fmt(r.quad), fmt(r.asym), to_string(r.branch), fmt(d)});
        for (auto* s : {&sh, &sq, &sa}) s->x.push_back(r.nu);
        sh.y.push_back(r.hyper);
        sq.y.push_back(r.quad);
        sa.y.push_back(r.asym);
    }
    out.report.id = "multiplier";
    describe(out.report, cfg);
    out.report.param("nu_max", cfg.nu_max);
    out.report.param("points", static_cast<double>(count));
    if (p.classical()) {
        out.report.check_close("classical_identity", classical_worst, 0.0, 1e-12);
    } else if (p.beta < p.n + 2) {
        out.report.check_below("max_rel_disagreement", worst, tol);
    } else {
        out.report.notes.push_back("no quadrature oracle for beta > n+2");
    }
    PlotPanel panel{"multiplier", "|nu|", "m", false, false, {sh, sq, sa}};
    out.svg = render_svg({panel});
    return out;
}

CommandOutput cmd_solve(const RunConfig& cfg) {
    cfg.validate();
    const auto g = cfg.geometry();
    const unsigned threads = resolve_threads(cfg.threads);
    const double tol = cfg.tolerance.value_or(1e-10);
    const auto table = multiplier_table(cfg.params, g, threads);
    const auto data = initial_field(cfg, g);
    EvolutionProblem prob{table, cfg.sourced ? zero_field(g) : data, std::nullopt};
    if (cfg.sourced) prob.source = data;

    std::vector<Point> pts(static_cast<std::size_t>(cfg.plot_intervals) + 1, Point{0, 0, 0});
    std::vector<double> xs(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double frac = static_cast<double>(j) / cfg.plot_intervals;
        xs[j] = cfg.lo[0] + (cfg.hi[0] - cfg.lo[0]) * frac;
        pts[j][0] = g.periods[0] * frac;
    }

    CommandOutput out;
    out.name = "solve";
    out.table.header = {"t", "x", "u"};
    out.report.id = "solve";
    describe(out.report, cfg);
    out.report.param("K", static_cast<double>(cfg.K));
    out.report.param("profile", cfg.input_field.empty() ? cfg.profile.name : cfg.input_field);
    out.report.param("sourced", cfg.sourced ? "true" : "false");
    PlotPanel panel{"solution profiles", "x", "u", false, false, {}};
    double imag = 0.0;
    bool finite = true;
    for (double t : cfg.times) {
        const auto u = synthesize(solve_field(prob, t), pts, threads);
        PlotSeries s = curve("t=" + fmt(t));
        for (std::size_t j = 0; j < u.size(); ++j) {
            out.table.add_row({fmt(t), fmt(xs[j]), fmt(u[j].real())});
            imag = std::max(imag, std::abs(u[j].imag()));
            finite = finite && std::isfinite(u[j].real());
            s.x.push_back(xs[j]);
            s.y.push_back(u[j].real());
        }
        panel.series.push_back(std::move(s));
    }
    out.report.check_flag("finite_values", finite);
    if (data.real) {
        out.report.check_below("max_imaginary_part", imag, tol);
    } else {
        out.report.notes.push_back("complex data: the u column is the real part");
    }
    out.svg = render_svg({panel});
    return out;
}

CommandOutput cmd_converge(const RunConfig& cfg, bool beta_sweep) {
    cfg.validate();
    require_builtin(cfg);
    ConvergenceConfig cc;
    cc.params = cfg.params;
    cc.geom = cfg.geometry();
    cc.profile = cfg.profile;
    cc.sourced = cfg.sourced;
    cc.t = cfg.times.back();
    cc.sweep = beta_sweep ? cfg.beta_values() : cfg.delta_sweep;
    cc.s_report = cfg.sobolev;
    cc.tolerance = cfg.tolerance.value_or(1e-3);
    cc.threads = resolve_threads(cfg.threads);
    const auto res = beta_sweep ? converge_beta(cc) : converge_delta(cc);

    CommandOutput out;
    out.name = beta_sweep ? "converge-beta" : "converge-delta";
    out.report = res.report;
    out.table.header = {"sweep_value", "h_s_error", "s_report"};
    PlotPanel panel{beta_sweep ? "error against n+2-beta" : "error against delta",
                    beta_sweep ? "n+2-beta" : "delta", "H^s error", true, true, {}};
    for (double s : cfg.sobolev) panel.series.push_back(curve("s=" + fmt(s)));
    for (const auto& r : res.rows) {
        out.table.add_row({fmt(r.sweep_value), fmt(r.error), fmt(r.s)});
        for (std::size_t i = 0; i < cfg.sobolev.size(); ++i) {
            if (cfg.sobolev[i] != r.s) continue;
            panel.series[i].x.push_back(beta_sweep ? cfg.params.n + 2 - r.sweep_value : r.sweep_value);
            panel.series[i].y.push_back(r.error);
        }
    }
    out.svg = render_svg({panel});
    return out;
}

CommandOutput cmd_jump_decay(const RunConfig& cfg) {
    cfg.validate();
    require_builtin(cfg);
    if (cfg.params.n != 1) fail(ErrorKind::ConfigError, "jump-decay needs n = 1");
    JumpDecayConfig jc;
    jc.params = cfg.params;
    jc.interval_lo = cfg.lo[0];
    jc.interval_hi = cfg.hi[0];
    jc.K = cfg.K;
    jc.profile = cfg.profile;
    jc.times = cfg.times;
    jc.plot_intervals = cfg.plot_intervals;
    jc.scan_points = cfg.scan_points;
    jc.jump_tolerance = cfg.tolerance.value_or(1e-3);
    jc.certificate_tolerance = cfg.certificate_tolerance;
    jc.threads = resolve_threads(cfg.threads);
    const auto res = jump_decay_experiment(jc);

    CommandOutput out;
    out.name = "jump-decay";
    out.report = res.report;
    out.table.header = {"t", "x", "u_left", "u_right", "envelope_plus", "envelope_minus"};
    std::vector<PlotPanel> panels;
    for (const auto& r : res.profile) {
        out.table.add_row({fmt(r.t), fmt(r.x), r.left ? fmt(*r.left) : "", r.right ? fmt(*r.right) : "",
                           fmt(r.envelope), fmt(-r.envelope)});
        if (panels.empty() || panels.back().title != "t = " + fmt(r.t)) {
            panels.push_back({"t = " + fmt(r.t), "x", "u", false, false,
                              {curve("x < 0"), curve("x > 0"), curve("+envelope", true), curve("-envelope", true)}});
        }
        auto& s = panels.back().series;
        s[0].x.push_back(r.x);
        s[0].y.push_back(r.left.value_or(kNaN));
        s[1].x.push_back(r.x);
        s[1].y.push_back(r.right.value_or(kNaN));
        s[2].x.push_back(r.x);
        s[2].y.push_back(r.envelope);
        s[3].x.push_back(r.x);
        s[3].y.push_back(-r.envelope);
    }
    out.svg = render_svg(panels, 2);
    return out;
}

CommandOutput cmd_regularity(const RunConfig& cfg) {
    cfg.validate();
    const auto g = cfg.geometry();
    const unsigned threads = resolve_threads(cfg.threads);
    const double tol = cfg.tolerance.value_or(0.05);
    const auto data = initial_field(cfg, g);
    const auto base = regularity_fit(data, 0.0);
    const double s0 = base.implied_sobolev_index;
    const std::vector<double> betas = cfg.beta_sweep.empty() ? std::vector<double>{cfg.params.beta} : cfg.beta_sweep;

    CommandOutput out;
    out.name = "regularity";
    out.report.id = "regularity";
    describe(out.report, cfg);
    out.report.param("K", static_cast<double>(cfg.K));
    out.report.param("sourced", cfg.sourced ? "true" : "false");
    out.report.param("data_sobolev_index", s0);
    out.table.header = {"beta", "t", "fitted_exponent", "implied_s", "theory_s", "pass"};
    for (double beta : betas) {
        OperatorParams p = cfg.params;
        p.beta = beta;
        const auto table = multiplier_table(p, g, threads);
        for (double t : cfg.times) {
            const auto u = cfg.sourced ? evolve_sourced(data, table, t) : evolve_homogeneous(data, table, t);
            const auto r = regularity_fit(u, s0, RegularityContext{p, t, cfg.sourced, 0.01});
            const bool ok = std::isinf(r.theory_index) ? r.superpolynomial
                                                       : std::abs(r.implied_sobolev_index - r.theory_index) <= tol;
            out.table.add_row({fmt(beta), fmt(t), fmt(r.fitted_decay_exponent), fmt(r.implied_sobolev_index),
                               fmt(r.theory_index), ok ? "true" : "false"});
            out.report.check_flag("beta=" + fmt(beta) + ",t=" + fmt(t), ok);
        }
    }
    return out;
}

CommandOutput cmd_selftest(const RunConfig& cfg) {
    const unsigned threads = resolve_threads(cfg.threads);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CommandOutput out;
    out.name = "selftest";
    out.report.id = "selftest";
    out.report.param("seed", std::to_string(cfg.seed));

    double classical = 0.0;
    for (int n = 1; n <= 3; ++n) {
        for (int i = 0; i < 50; ++i) {
            const double nu = 0.5 + 10.0 * i;
            classical = std::max(classical, rel_diff(multiplier_radial({n, 0.7, n + 2.0}, nu).value, -nu * nu));
        }
    }
    out.report.check_below("classical_identity", classical, 1e-12);

    double scaling = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 1 + static_cast<int>(unit(rng) * 3);
        const double delta = 0.25 + 2.0 * unit(rng);
        const double beta = -1.0 + (n + 2.9) * unit(rng);
        const double nu = 50.0 * unit(rng);
        const double lhs = multiplier_radial({n, delta, beta}, nu).value;
        const double rhs = multiplier_radial({n, 1.0, beta}, delta * nu).value / (delta * delta);
        scaling = std::max(scaling, rel_diff(lhs, rhs));
    }
    out.report.check_below("scaling_identity", scaling, 1e-10);

    int violations = 0;
    for (int n = 1; n <= 3; ++n) {
        for (double nu : {0.5, 3.0, 40.0}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int j = 0; j <= 10; ++j) {
                const double m = multiplier_radial({n, 1.0, -1.0 + (n + 3.0) * j / 10}, nu).value;
                if (!(m < prev)) ++violations;
                prev = m;
            }
        }
    }
    out.report.check_close("beta_monotonicity_violations", violations, 0, 0);

    double oracle = 0.0;
    for (double nu : {0.7, 7.0, 70.0}) {
        const OperatorParams p{2, 1.0, 0.5};
        oracle = std::max(oracle, rel_diff(multiplier_radial(p, nu).value, multiplier_quadrature_radial(p, nu).value));
    }
    out.report.check_below("oracle_agreement", oracle, 1e-8);

    TorusGeometry g;
    g.periods = {20.0, 1.0, 1.0};
    g.origin = {-10.0, 0.0, 0.0};
    g.K = 256;
    const OperatorParams p{1, 1.0, 1.0 / 3.0};
    const auto table = multiplier_table(p, g, threads);
    ProfileSpec mode;
    mode.name = "single_mode";
    mode.mode = {7, 0, 0};
    const double m7 = multiplier_radial(p, g.frequency(0, 7)).value;
    const auto u = evolve_homogeneous(builtin_profile(mode, g), table, 0.3);
    out.report.check_below("single_mode_exactness", std::abs(u.at({7, 0, 0}) - std::exp(m7 * 0.3)) / std::exp(m7 * 0.3),
                           1e-13);
    const auto f = builtin_profile({}, g);
    const auto a = evolve_homogeneous(f, table, 0.3);
    const auto b = evolve_homogeneous(evolve_homogeneous(f, table, 0.1), table, 0.2);
    double semigroup = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) semigroup = std::max(semigroup, std::abs(a.coeffs[i] - b.coeffs[i]));
    out.report.check_below("semigroup", semigroup, 1e-12);

    out.table = out.report.to_csv();
    return out;
}

CommandOutput run_command(const RunConfig& cfg) {
    const auto& c = cfg.command;
    if (c == "multiplier") return cmd_multiplier(cfg);
    if (c == "solve") return cmd_solve(cfg);
    if (c == "converge-delta") return cmd_converge(cfg, false);
    if (c == "converge-beta") return cmd_converge(cfg, true);
    if (c == "jump-decay") return cmd_jump_decay(cfg);
    if (c == "regularity") return cmd_regularity(cfg);
    if (c == "selftest") return cmd_selftest(cfg);
    fail(ErrorKind::ConfigError, "unknown command '" + c + "'");
}

void write_outputs(const CommandOutput& out, const std::string& dir, bool svg) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::ConfigError, "cannot create output directory '" + dir + "': " + ec.message());
    auto write = [&](const std::string& file, const std::string& text) {
        const auto path = std::filesystem::path(dir) / file;
        std::ofstream os(path, std::ios::binary);
        if (!os) fail(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
        os << text;
    };
    write(out.name + ".csv", out.table.str());
    write(out.name + "_report.csv", out.report.to_csv().str());
    if (svg && out.svg) write(out.name + ".svg", *out.svg);
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::InvalidParams:
        case ErrorKind::UnknownProfile:
            return 2;
        default:
            return 3;
    }
}

}  // namespace nldiff
