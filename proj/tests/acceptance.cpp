// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nldiff/analysis.hpp"
#include "nldiff/commands.hpp"
#include "nldiff/evolution.hpp"
#include "nldiff/multiplier.hpp"

using namespace nldiff;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-30); }

TorusGeometry figure_line(int K) {
    TorusGeometry g;
    g.n = 1;
    g.periods = {20.0, 1.0, 1.0};
    g.K = K;
    g.origin = {-10.0, 0.0, 0.0};
    return g;
}

struct Outcome {
    bool pass;
    std::string detail;
};

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

// 1. multiplier against the quadrature oracle on 200 fixed points
Outcome oracle_grid() {
    const auto t0 = Clock::now();
    const double deltas[] = {0.5, 1.0, 2.0};
    double worst = 0.0;
    std::string where;
    int count = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + i % 3;
        const double delta = deltas[(i / 3) % 3];
        const double betas[] = {-1.0, 0.0, n / 2.0, double(n), n + 1.0, n + 1.9};
        const double beta = betas[(i / 9) % 6];
        // golden-ratio sequence over [0, 500]; every 25th point is nu = 0
        const double nu = i % 25 == 0 ? 0.0 : 500.0 * std::fmod(0.5 + i * 0.6180339887498949, 1.0);
        const OperatorParams p{n, delta, beta};
        const double h = multiplier_radial(p, nu).value;
        const double q = nu == 0.0 ? 0.0 : multiplier_quadrature_radial(p, nu).value;
        const double e = std::abs(h - q) / std::max(std::abs(q), 1e-30);
        if (e > worst) {
            worst = e;
            where = fmt("n=%d delta=%g beta=%g nu=%g", n, delta, beta, nu);
        }
        ++count;
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-8 && secs < 60.0 && count == 200,
            fmt("%d points, max rel %.2e at %s, %.1f s", count, worst, where.c_str(), secs)};
}

// 2. beta = n+2 gives -|nu|^2
Outcome classical_identity() {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        for (int j = 0; j < 50; ++j) {
            const double nu = 0.05 * std::pow(1.2, j);  // 0.05 .. about 390
            worst = std::max(worst, rel(multiplier_radial({n, 0.8, n + 2.0}, nu).value, -nu * nu));
        }
    }
    return {worst <= 1e-12, fmt("150 points, max rel %.2e", worst)};
}

// 3. ratio to the leading-order form at |nu| delta = 1e4
Outcome asymptotic_ratio() {
    double lo = 1e300, hi = -1e300;
    for (int n = 1; n <= 3; ++n) {
        for (double beta : {n - 0.5, double(n), n + 1.0}) {
            for (double delta : {0.5, 1.0, 2.0}) {
                const OperatorParams p{n, delta, beta};
                const double nu = 1e4 / delta;
                const double r = multiplier_radial(p, nu).value / multiplier_asymptotic(p, nu);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        }
    }
    return {lo >= 0.99 && hi <= 1.01, fmt("ratios in [%.6f, %.6f]", lo, hi)};
}

// 4. m^{delta,beta}(nu) = delta^-2 m^{1,beta}(delta nu)
Outcome scaling_identity() {
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(3 * u(rng));
        const double delta = std::exp(std::log(0.25) + std::log(16.0) * u(rng));
        const double beta = -1.0 + (n + 3.0) * u(rng);
        const double nu = 200.0 * u(rng);
        const double lhs = multiplier_radial({n, delta, beta}, nu).value;
        const double rhs = multiplier_radial({n, 1.0, beta}, delta * nu).value / (delta * delta);
        worst = std::max(worst, rel(lhs, rhs));
    }
    return {worst <= 1e-10, fmt("100 random points, max rel %.2e", worst)};
}

// 5. strict decrease in beta over a 20 x 20 grid at 10 frequencies
Outcome beta_monotonicity() {
    int violations = 0, checks = 0;
    for (int n = 1; n <= 3; ++n) {
        std::vector<double> betas;
        for (int j = 0; j < 20; ++j) betas.push_back(-1.0 + (n + 3.0) * j / 19.0);
        for (int f = 0; f < 10; ++f) {
            const double nu = 0.3 * std::pow(2.0, f);  // 0.3 .. 154
            std::vector<double> m;
            for (double b : betas) m.push_back(multiplier_radial({n, 1.0, b}, nu).value);
            for (int a = 0; a < 20; ++a) {
                for (int b = 0; b < 20; ++b) {
                    if (a == b) continue;
                    ++checks;
                    if ((betas[a] < betas[b]) != (m[a] > m[b])) ++violations;
                }
            }
        }
    }
    return {violations == 0, fmt("%d ordered pairs, %d violations", checks, violations)};
}

// 6. single mode, semigroup, constant source
Outcome evolution_exactness() {
    const auto g = figure_line(256);
    const OperatorParams p{1, 1.0, 1.0 / 3};
    const auto table = multiplier_table(p, g);
    double single = 0.0;
    for (int k : {1, 17, 200}) {
        ProfileSpec s;
        s.name = "single_mode";
        s.mode = {k, 0, 0};
        const double m = multiplier_radial(p, g.frequency(0, k)).value;
        for (double t : {0.05, 0.5, 3.0}) {
            const auto u = evolve_homogeneous(builtin_profile(s, g), table, t);
            single = std::max(single, std::abs(u.at({k, 0, 0}) - std::exp(m * t)) / std::exp(m * t));
        }
    }
    const auto f = builtin_profile({}, g);
    const auto a = evolve_homogeneous(f, table, 0.35);
    const auto b = evolve_homogeneous(evolve_homogeneous(f, table, 0.15), table, 0.2);
    double semigroup = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) semigroup = std::max(semigroup, std::abs(a.coeffs[i] - b.coeffs[i]));
    ProfileSpec c;
    c.name = "constant";
    c.amplitude = 0.75;
    double source = 0.0;
    for (double t : {0.1, 1.0, 7.0}) {
        const auto u = evolve_sourced(builtin_profile(c, g), table, t);
        source = std::max(source, std::abs(u.at({0, 0, 0}) - 0.75 * t) / (0.75 * t));
    }
    return {single < 1e-13 && semigroup <= 1e-12 && source <= 1e-13,
            fmt("single-mode %.2e, semigroup %.2e, constant source %.2e", single, semigroup, source)};
}

// 7. central-difference residual is second order
Outcome residual_order() {
    const auto g = figure_line(4096);
    EvolutionProblem prob{multiplier_table({1, 1.0, 1.0 / 3}, g), builtin_profile({}, g), std::nullopt};
    const double r1 = residual(prob, 0.1, 1e-3), r2 = residual(prob, 0.1, 5e-4), r3 = residual(prob, 0.1, 2.5e-4);
    const double o1 = std::log2(r1 / r2), o2 = std::log2(r2 / r3);
    const bool ok = o1 >= 1.9 && o1 <= 2.1 && o2 >= 1.9 && o2 <= 2.1;
    return {ok, fmt("residuals %.3e %.3e %.3e, orders %.4f %.4f", r1, r2, r3, o1, o2)};
}

// 8. regularity gains at K = 4096
Outcome regularity_gains() {
    const auto g = figure_line(4096);
    const auto f = builtin_profile({}, g);
    const double ef = regularity_fit(f, 0.0).fitted_decay_exponent;
    double slowest = 0.0;
    auto timed_fit = [&](const OperatorParams& p, double t, bool sourced) {
        const auto t0 = Clock::now();
        const auto table = multiplier_table(p, g);
        const auto u = sourced ? evolve_sourced(f, table, t) : evolve_homogeneous(f, table, t);
        const double e = regularity_fit(u, 0.0).fitted_decay_exponent;
        slowest = std::max(slowest, seconds_since(t0));
        return e;
    };
    double worst_a = 0.0;
    for (double t : {0.05, 0.1, 0.2}) worst_a = std::max(worst_a, std::abs(timed_fit({1, 1.0, 1.0 / 3}, t, false) / ef - 1));
    const double gain_b = ef - timed_fit({1, 1.0, 1.0}, 0.25, false);
    const double gain_c = ef - timed_fit({1, 1.0, 2.0}, 0.1, true);
    const bool ok = worst_a <= 0.03 && std::abs(gain_b - 1) <= 0.05 && std::abs(gain_c - 1) <= 0.05 && slowest < 5.0;
    return {ok, fmt("beta<n rel change %.4f, beta=n gain %.4f, sourced beta=2 gain %.4f, slowest fit %.2f s", worst_a,
                    gain_b, gain_c, slowest)};
}

// 9. delta and beta sweeps
Outcome convergence_sweeps() {
    auto decreasing = [](const ConvergenceResult& r, double s, std::vector<double>& errs) {
        errs.clear();
        for (const auto& row : r.rows)
            if (row.s == s) errs.push_back(row.error);
        for (std::size_t i = 1; i < errs.size(); ++i)
            if (!(errs[i] < errs[i - 1])) return false;
        return true;
    };
    ConvergenceConfig d;
    d.params = {1, 1.0, 0.5};
    d.geom = figure_line(4096);
    d.t = 0.1;
    d.sweep = {1, 0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    std::vector<double> de;
    const bool d_ok = decreasing(converge_delta(d), 0.0, de) && de.size() == 7 && de.back() < 1e-3;

    bool b_ok = true;
    std::string detail = fmt("delta sweep final %.2e", de.back());
    for (bool sourced : {false, true}) {
        ConvergenceConfig b;
        b.params = {1, 1.0, 2.0};
        b.geom = figure_line(4096);
        b.t = 0.1;
        b.sourced = sourced;
        b.sweep = {2.0, 2.5, 2.9, 2.99};
        std::vector<double> be;
        b_ok = b_ok && decreasing(converge_beta(b), 0.0, be) && be.size() == 5 && be[3] < 1e-3 && be[4] == 0.0;
        detail += fmt(", beta sweep (%s) at n+1.99 %.2e, at n+2 %g", sourced ? "sourced" : "homogeneous", be[3], be[4]);
    }
    return {d_ok && b_ok, detail};
}

// 10. the jump-decay figure
Outcome figure_reproduction() {
    const auto t0 = Clock::now();
    const JumpDecayConfig cfg;
    const auto res = jump_decay_experiment(cfg);
    const double secs = seconds_since(t0);
    bool alpha_ok = std::abs(res.alpha - 8.0) <= 1e-12;
    double worst_jump = 0.0, worst_cert = 0.0;
    for (const auto& m : res.report.measurements) {
        if (m.quantity.rfind("jump@x=0@t=", 0) == 0 && m.quantity != "jump@x=0@t=0") {
            const double t = std::stod(m.quantity.substr(11));
            worst_jump = std::max(worst_jump, std::abs(m.value + 2 * std::exp(-8 * t)));
        }
        if (m.quantity.rfind("v_certificate", 0) == 0) worst_cert = std::max(worst_cert, m.value);
    }
    const bool ok = alpha_ok && res.report.pass() && worst_jump <= 1e-3 && worst_cert < 1e-4 && secs < 30.0;
    return {ok, fmt("alpha %.15g, max |jump + 2e^{-8t}| %.2e, max certificate %.2e, report %s, %.1f s", res.alpha,
                    worst_jump, worst_cert, res.report.pass() ? "pass" : "fail", secs)};
}

// 11. |m + alpha| decay exponents
Outcome exponent_fits() {
    struct Case {
        int n;
        double beta;
    };
    bool ok = true;
    std::string detail;
    for (const Case c : {Case{1, 1.0 / 3}, Case{3, 0.0}, Case{1, -1.0}}) {
        ExponentFitConfig cfg;
        cfg.params = {c.n, 1.0, c.beta};
        const auto rep = m_plus_alpha_exponent_fit(cfg);
        ok = ok && rep.pass();
        for (const auto& m : rep.measurements) {
            if (m.quantity == "exponent")
                detail += fmt("%s(n=%d, beta=%.3g) %.4f vs %.4f", detail.empty() ? "" : ", ", c.n, c.beta, m.value,
                              m.expected);
        }
    }
    return {ok, detail};
}

// 12. byte-identical jump-decay CSV
Outcome determinism() {
    std::string first;
    int identical = 0, runs = 0;
    for (int rep = 0; rep < 2; ++rep) {
        for (unsigned threads : {1u, 4u}) {
            RunConfig cfg;
            cfg.threads = threads;
            const auto out = cmd_jump_decay(cfg);
            const std::string text = out.table.str() + out.report.to_csv().str();
            if (first.empty()) first = text;
            identical += text == first;
            ++runs;
        }
    }
    return {identical == runs, fmt("%d of %d runs identical, %zu bytes", identical, runs, first.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"multiplier oracle agreement", oracle_grid},
        {"classical identity", classical_identity},
        {"large-argument asymptotics", asymptotic_ratio},
        {"scaling identity", scaling_identity},
        {"monotonicity in beta", beta_monotonicity},
        {"evolution exactness", evolution_exactness},
        {"residual order", residual_order},
        {"regularity gains", regularity_gains},
        {"convergence sweeps", convergence_sweeps},
        {"jump-decay figure", figure_reproduction},
        {"m + alpha exponents", exponent_fits},
        {"jump-decay determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
