// nldiff: run spectral experiments for the nonlocal diffusion equation.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nldiff/commands.hpp"
#include "nldiff/errors.hpp"

namespace {

int report_error(const std::string& kind, const std::string& message, int code) {
    nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver and verification toolkit for nonlocal diffusion on the torus"};
    std::string command, config_path, out_dir, svg_flag;
    std::optional<unsigned> threads;
    std::optional<double> tolerance;
    bool dump_config = false;
    app.add_option("command", command,
                   "multiplier | solve | converge-delta | converge-beta | jump-decay | regularity | selftest");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (default: NLDIFF_THREADS or 1)");
    app.add_option("--tolerance", tolerance, "override the command's main tolerance");
    app.add_option("--svg", svg_flag, "write SVG plots")->check(CLI::IsMember({"on", "off"}));
    app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("ConfigError", e.what(), 2);
    }

    using namespace nldiff;
    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!command.empty()) cfg.command = command;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (threads) cfg.threads = *threads;
        if (tolerance) cfg.tolerance = *tolerance;
        if (!svg_flag.empty()) cfg.svg = svg_flag == "on";
        cfg.validate();
        if (dump_config) {
            std::cout << to_json(cfg);
            return 0;
        }

        const auto out = run_command(cfg);
        write_outputs(out, cfg.output_dir, cfg.svg);
        for (const auto& m : out.report.measurements) {
            if (!m.pass) {
                std::cout << "FAIL " << m.quantity << " value=" << m.value << " expected=" << m.expected
                          << " tolerance=" << m.tolerance << "\n";
            }
        }
        std::cout << out.name << ": " << (out.pass() ? "PASS" : "FAIL") << " (" << out.report.measurements.size()
                  << " checks, output in " << cfg.output_dir << ")\n";
        return out.pass() ? 0 : 1;
    } catch (const Error& e) {
        return report_error(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        return report_error("NumericalFailure", e.what(), 3);
    }
}
