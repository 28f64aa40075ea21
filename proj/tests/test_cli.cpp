#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "nldiff/commands.hpp"
#include "nldiff/errors.hpp"

using namespace nldiff;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nldiff_cli_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NLDIFF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double cell(const CsvTable& t, std::size_t row, const std::string& col) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == col) return std::stod(t.rows[row][c]);
    FAIL("missing column " << col);
    return 0;
}

}  // namespace

TEST_CASE("config JSON round trip and validation") {
    RunConfig c;
    c.command = "converge-beta";
    c.params = {2, 0.75, 1.0 / 7};
    c.lo = {-1.5, 0};
    c.hi = {2.5, 3};
    c.K = 33;
    c.profile.name = "smooth_bump";
    c.profile.mode = {2, -3, 0};
    c.profile.kappa = 2.5;
    c.times = {0.1, 1.0 / 3};
    c.beta_sweep = {3.1, 3.9};
    c.sobolev = {0, 0.5};
    c.tolerance = 2e-4;
    c.threads = 3;
    c.seed = 99;
    c.svg = false;
    CHECK(config_from_json(to_json(c)) == c);
    CHECK(config_from_json(to_json(RunConfig{})) == RunConfig{});
    CHECK(config_from_json("{}") == RunConfig{});

    auto kind_of = [](const std::string& text) {
        try {
            config_from_json(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidParams;
    };
    CHECK(kind_of(R"({"unknown": 1})") == ErrorKind::ConfigError);
    CHECK(kind_of(R"({"operator": {"n": 1, "gamma": 2}})") == ErrorKind::ConfigError);
    CHECK(kind_of(R"({"command": "plot"})") == ErrorKind::ConfigError);
    CHECK(kind_of(R"({"operator": {"delta": -1}})") == ErrorKind::ConfigError);
    CHECK(kind_of(R"({"times": "soon"})") == ErrorKind::ConfigError);
    CHECK(kind_of(R"({"domain": {"lo": [1], "hi": [0]}})") == ErrorKind::ConfigError);
    CHECK(kind_of("{ not json") == ErrorKind::ConfigError);
}

TEST_CASE("default config is the jump-decay figure") {
    const RunConfig c;
    const JumpDecayConfig j;
    CHECK(c.command == "jump-decay");
    CHECK(c.params == j.params);
    CHECK(c.lo[0] == j.interval_lo);
    CHECK(c.hi[0] == j.interval_hi);
    CHECK(c.K == j.K);
    CHECK(c.profile == j.profile);
    CHECK(c.times == j.times);
    CHECK(c.plot_intervals == j.plot_intervals);
    CHECK(c.scan_points == j.scan_points);
    CHECK(c.certificate_tolerance == j.certificate_tolerance);
    CHECK(c.geometry() == j.geometry());
}

TEST_CASE("multiplier command") {
    RunConfig c;
    c.command = "multiplier";
    c.params = {2, 1.0, 0.5};
    c.nu_max = 120;
    c.nu_points = 7;
    auto out = run_command(c);
    REQUIRE(out.table.rows.size() == 7);
    CHECK(out.table.header.size() == 6);
    CHECK(out.table.rows[0][1] == "0");
    CHECK(out.table.rows[0][2] == "0");
    CHECK(out.table.rows[0][3] == "0");
    for (std::size_t i = 0; i < 7; ++i) CHECK(cell(out.table, i, "rel_disagreement") < 1e-8);
    CHECK(out.pass());

    c.params.beta = 4.0;
    out = run_command(c);
    for (std::size_t i = 0; i < 7; ++i) {
        const double nu = cell(out.table, i, "nu_norm");
        CHECK(cell(out.table, i, "m_hyper") == -nu * nu);
    }
    CHECK(out.pass());
}

TEST_CASE("solve command closed forms") {
    RunConfig c;
    c.command = "solve";
    c.K = 32;
    c.plot_intervals = 16;
    c.times = {0.0, 0.4};

    SUBCASE("cosine mode") {
        c.profile.name = "cosine_mode";
        c.profile.mode = {3, 0, 0};
        const auto out = run_command(c);
        const double nu = 2 * std::numbers::pi * 3 / 20;
        const double m = multiplier_radial(c.params, nu).value;
        REQUIRE(out.table.rows.size() == 34);
        for (std::size_t r = 0; r < out.table.rows.size(); ++r) {
            const double t = cell(out.table, r, "t"), x = cell(out.table, r, "x");
            // cosine_mode has coefficients 1/2 at +-k, so u = e^{mt} cos(nu (x - lo))
            CHECK(cell(out.table, r, "u") == doctest::Approx(std::exp(m * t) * std::cos(nu * (x + 10))).epsilon(1e-12).scale(1));
        }
        CHECK(out.pass());
    }
    SUBCASE("constant source grows linearly") {
        c.profile.name = "constant";
        c.profile.amplitude = 0.3;
        c.sourced = true;
        c.times = {0.0, 0.5, 2.0};
        const auto out = run_command(c);
        for (std::size_t r = 0; r < out.table.rows.size(); ++r)
            CHECK(std::abs(cell(out.table, r, "u") - 0.3 * cell(out.table, r, "t")) <= 1e-13);
    }
    SUBCASE("t = 0 reproduces the data") {
        c.profile.name = "smooth_bump";
        const auto out = run_command(c);
        const auto f = builtin_profile(c.profile, c.geometry());
        std::vector<Point> pts;
        for (int j = 0; j <= 16; ++j) pts.push_back({20.0 * j / 16, 0, 0});
        const auto ref = synthesize(f, pts);
        for (int j = 0; j <= 16; ++j) CHECK(cell(out.table, j, "u") == doctest::Approx(ref[j].real()).epsilon(1e-14));
    }
}

TEST_CASE("convergence and regularity commands") {
    RunConfig c;
    c.K = 4096;
    c.times = {0.1};
    c.params.beta = 0.5;
    c.command = "converge-delta";
    auto out = run_command(c);
    CHECK(out.table.header == std::vector<std::string>{"sweep_value", "h_s_error", "s_report"});
    CHECK(out.table.rows.size() == 7);
    CHECK(out.pass());
    CHECK(out.svg->find("<polyline") != std::string::npos);

    c.command = "converge-beta";
    c.sourced = true;
    out = run_command(c);
    CHECK(out.table.rows.size() == 5);
    CHECK(out.table.rows.back()[0] == "3");
    CHECK(out.table.rows.back()[1] == "0");
    CHECK(out.pass());

    c.command = "regularity";
    c.sourced = false;
    c.beta_sweep = {1.0};
    c.times = {0.25};
    out = run_command(c);
    REQUIRE(out.table.rows.size() == 1);
    CHECK(out.table.rows[0][5] == "true");
    CHECK(out.pass());
    c.tolerance = 1e-6;
    CHECK_FALSE(run_command(c).pass());
}

TEST_CASE("jump-decay CSV is byte-identical across runs and thread counts") {
    RunConfig c;
    c.K = 4096;  // the determinism contract does not depend on resolution
    c.svg = true;
    std::string first;
    for (unsigned threads : {1u, 4u, 1u, 4u}) {
        c.threads = threads;
        const auto out = run_command(c);
        const auto dir = scratch("jd" + std::to_string(threads));
        write_outputs(out, dir.string(), true);
        const auto text = slurp(dir / "jump-decay.csv") + slurp(dir / "jump-decay_report.csv");
        if (first.empty()) first = text;
        CHECK(text == first);
        const auto svg = slurp(dir / "jump-decay.svg");
        CHECK(svg.rfind("<?xml", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("href") == std::string::npos);
    }
    const auto table = CsvTable::parse(first.substr(0, first.find("experiment,kind")));
    CHECK(table.header ==
          std::vector<std::string>{"t", "x", "u_left", "u_right", "envelope_plus", "envelope_minus"});
    for (const auto& row : table.rows) {
        const double t = std::stod(row[0]);
        CHECK(std::stod(row[4]) == doctest::Approx(std::exp(-8 * t)).epsilon(1e-14));
        CHECK(std::stod(row[5]) == -std::stod(row[4]));
    }
}

TEST_CASE("selftest command") {
    RunConfig c;
    c.command = "selftest";
    const auto out = run_command(c);
    CHECK(out.pass());
    CHECK(out.report.measurements.size() >= 6);
}

TEST_CASE("CLI exit codes") {
    const auto dir = scratch("exit");
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << R"({"command": "multiplier", "colour": "red"})";
    CHECK(run_cli("--config " + bad.string()) == 2);
    CHECK(run_cli("nonsense --out " + dir.string()) == 2);

    const auto good = dir / "good.json";
    std::ofstream(good) << R"({"command": "multiplier", "multiplier_grid": {"nu_max": 50, "points": 5}})";
    CHECK(run_cli("--config " + good.string() + " --out " + (dir / "a").string()) == 0);
    CHECK(std::filesystem::exists(dir / "a" / "multiplier.csv"));
    CHECK(std::filesystem::exists(dir / "a" / "multiplier.svg"));
    CHECK(run_cli("--config " + good.string() + " --svg off --out " + (dir / "b").string()) == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "b" / "multiplier.svg"));
    CHECK(run_cli("--config " + good.string() + " --tolerance 1e-30 --out " + (dir / "c").string()) == 1);

    const auto coarse = dir / "coarse.json";
    std::ofstream(coarse) << R"({"command": "regularity", "domain": {"K": 32}})";
    CHECK(run_cli("--config " + coarse.string() + " --out " + (dir / "d").string()) == 3);
}
