#include "nldiff/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nldiff/errors.hpp"

namespace nldiff {

using json = nlohmann::json;

namespace {

const std::set<std::string> kCommands{"multiplier",  "solve",      "converge-delta", "converge-beta",
                                      "jump-decay", "regularity", "selftest"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) fail(ErrorKind::ConfigError, where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) fail(ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

TorusGeometry RunConfig::geometry() const {
    TorusGeometry g;
    g.n = params.n;
    g.K = K;
    for (int a = 0; a < params.n; ++a) {
        const double l = lo.size() == 1 ? lo[0] : lo.at(a);
        const double h = hi.size() == 1 ? hi[0] : hi.at(a);
        g.periods[a] = h - l;
        g.origin[a] = l;
    }
    return g;
}

std::vector<double> RunConfig::beta_values() const {
    if (!beta_sweep.empty()) return beta_sweep;
    const double n = params.n;
    return {n + 1, n + 1.5, n + 1.9, n + 1.99};
}

void RunConfig::validate() const {
    auto bad = [](const std::string& msg) { fail(ErrorKind::ConfigError, msg); };
    if (!kCommands.count(command)) bad("unknown command '" + command + "'");
    try {
        params.validate();
    } catch (const Error& e) {
        bad(e.what());
    }
    const auto n = static_cast<std::size_t>(params.n);
    auto sized = [n](const std::vector<double>& v) { return v.size() == 1 || v.size() == n; };
    if (!sized(lo) || !sized(hi)) bad("domain lo and hi need one entry or one per axis");
    const auto g = geometry();
    for (std::size_t a = 0; a < n; ++a) {
        if (!(g.periods[a] > 0.0) || !std::isfinite(g.periods[a]))
            bad("domain upper bound must exceed the lower bound");
    }
    if (K < 1) bad("K must be at least 1");
    if (times.empty()) bad("times must not be empty");
    for (double t : times)
        if (!(t >= 0.0) || !std::isfinite(t)) bad("times must be finite and non-negative");
    for (double d : delta_sweep)
        if (!(d > 0.0)) bad("delta_sweep entries must be positive");
    for (double b : beta_sweep)
        if (!(b < params.n + 4)) bad("beta_sweep entries must lie below n+4");
    if (sobolev.empty()) bad("sobolev must list at least one index");
    if (tolerance && !(*tolerance > 0.0)) bad("tolerance must be positive");
    if (!(certificate_tolerance > 0.0)) bad("certificate_tolerance must be positive");
    if (!(nu_max >= 0.0) || nu_points < 1) bad("multiplier grid needs nu_max >= 0 and points >= 1");
    if (plot_intervals < 1 || scan_points < 1) bad("plot_intervals and scan_points must be positive");
    if (output_dir.empty()) bad("output_dir must not be empty");
}

std::string to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["operator"] = {{"n", c.params.n}, {"delta", c.params.delta}, {"beta", c.params.beta}};
    j["domain"] = {{"lo", c.lo}, {"hi", c.hi}, {"K", c.K}};
    j["profile"] = {{"name", c.profile.name},
                    {"mode", c.profile.mode},
                    {"kappa", c.profile.kappa},
                    {"amplitude", c.profile.amplitude}};
    j["input_field"] = c.input_field;
    j["sourced"] = c.sourced;
    j["times"] = c.times;
    j["delta_sweep"] = c.delta_sweep;
    j["beta_sweep"] = c.beta_sweep;
    j["sobolev"] = c.sobolev;
    j["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
    j["certificate_tolerance"] = c.certificate_tolerance;
    j["multiplier_grid"] = {{"nu_max", c.nu_max}, {"points", c.nu_points}};
    j["plot_intervals"] = c.plot_intervals;
    j["scan_points"] = c.scan_points;
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["svg"] = c.svg;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    RunConfig c;
    try {
        const json j = json::parse(text);
        reject_unknown(j,
                       {"command", "operator", "domain", "profile", "input_field", "sourced", "times",
                        "delta_sweep", "beta_sweep", "sobolev", "tolerance", "certificate_tolerance",
                        "multiplier_grid", "plot_intervals", "scan_points", "output_dir", "threads", "seed",
                        "svg"},
                       "config");
        read(j, "command", c.command);
        if (j.contains("operator")) {
            const auto& o = j.at("operator");
            reject_unknown(o, {"n", "delta", "beta"}, "operator");
            read(o, "n", c.params.n);
            read(o, "delta", c.params.delta);
            read(o, "beta", c.params.beta);
        }
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            reject_unknown(d, {"lo", "hi", "K"}, "domain");
            read(d, "lo", c.lo);
            read(d, "hi", c.hi);
            read(d, "K", c.K);
        }
        if (j.contains("profile")) {
            const auto& p = j.at("profile");
            reject_unknown(p, {"name", "mode", "kappa", "amplitude"}, "profile");
            read(p, "name", c.profile.name);
            if (p.contains("mode")) {
                const auto mode = p.at("mode").get<std::vector<int>>();
                if (mode.empty() || mode.size() > 3) fail(ErrorKind::ConfigError, "profile.mode needs 1 to 3 entries");
                c.profile.mode = {0, 0, 0};
                std::copy(mode.begin(), mode.end(), c.profile.mode.begin());
            }
            read(p, "kappa", c.profile.kappa);
            read(p, "amplitude", c.profile.amplitude);
        }
        read(j, "input_field", c.input_field);
        read(j, "sourced", c.sourced);
        read(j, "times", c.times);
        read(j, "delta_sweep", c.delta_sweep);
        read(j, "beta_sweep", c.beta_sweep);
        read(j, "sobolev", c.sobolev);
        if (j.contains("tolerance")) {
            const auto& t = j.at("tolerance");
            c.tolerance = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
        }
        read(j, "certificate_tolerance", c.certificate_tolerance);
        if (j.contains("multiplier_grid")) {
            const auto& g = j.at("multiplier_grid");
            reject_unknown(g, {"nu_max", "points"}, "multiplier_grid");
            read(g, "nu_max", c.nu_max);
            read(g, "points", c.nu_points);
        }
        read(j, "plot_intervals", c.plot_intervals);
        read(j, "scan_points", c.scan_points);
        read(j, "output_dir", c.output_dir);
        read(j, "threads", c.threads);
        read(j, "seed", c.seed);
        read(j, "svg", c.svg);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace nldiff
