#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "billiards/export.hpp"
#include "billiards/presets.hpp"
#include "billiards/runner.hpp"
#include "billiards/verify.hpp"

namespace fs = std::filesystem;
using namespace billiards;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<Scenario> resolve(const std::string& config, const std::vector<std::string>& preset_names) {
    std::vector<Scenario> out;
    if (!config.empty()) out = load_scenarios(config);
    for (const auto& name : preset_names) {
        auto p = find_preset(name);
        if (!p) throw ConfigError("unknown preset '" + name + "' (see 'presets')");
        out.push_back(*p);
    }
    if (out.empty()) throw ConfigError("nothing to run: give a config file or --preset");
    return out;
}

void print_result(const RunResult& r) {
    if (r.config_error) {
        std::printf("ERROR %s: %s\n", r.scenario.name.c_str(), r.diagnostic.c_str());
        return;
    }
    if (r.numerical_failure) {
        std::printf("NUMERICAL-FAILURE %s: %s\n", r.scenario.name.c_str(), r.diagnostic.c_str());
        return;
    }
    std::printf("%s %s\n", r.report.ok() ? "PASS" : "FAIL", r.scenario.name.c_str());
    for (const auto& c : r.report.checks)
        std::printf("  %-4s %-32s %-10s value=%.3e threshold=%.3e%s\n", c.ok() ? "ok" : "BAD", c.name.c_str(),
                    c.mode == CheckMode::Max ? "(max)" : "(min)", c.value, c.threshold,
                    c.expect_fail ? " expect=fail" : "");
}

int exit_code(const std::vector<RunResult>& results) {
    int code = 0;
    for (const auto& r : results) {
        if (r.config_error) return kExitConfig;
        if (r.numerical_failure) code = kExitNumerical;
        else if (!r.report.ok() && code == 0) code = kExitChecksFailed;
    }
    return code;
}

int cmd_run(const std::string& config, const std::vector<std::string>& preset_names, const fs::path& out,
            unsigned threads, bool plot_only) {
    const std::vector<Scenario> batch = resolve(config, preset_names);
    const std::vector<RunResult> results = run_batch(batch, threads);
    for (const auto& r : results) {
        print_result(r);
        if (r.config_error) continue;
        if (plot_only) {
            const fs::path stem = out / r.scenario.name;
            fs::create_directories(out);
            if (r.plane) export_plotdata(*r.plane, stem);
            if (r.curved) export_plotdata(*r.curved, stem);
        } else {
            write_run_outputs(r, out);
        }
    }
    if (plot_only) {
        for (const auto& r : results)
            if (r.config_error) return kExitConfig;
        for (const auto& r : results)
            if (r.numerical_failure) return kExitNumerical;
        return 0;
    }
    return exit_code(results);
}

int cmd_presets(const std::string& dump) {
    for (const auto& s : presets()) {
        std::printf("%-34s %-16s %s\n", s.name.c_str(), to_string(s.kind), s.description.c_str());
        if (!dump.empty()) {
            fs::create_directories(dump);
            write_text(fs::path(dump) / (s.name + ".json"), scenario_to_json(s) + "\n");
        }
    }
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
    std::vector<Report> reports;
    if (suite == "projective" || suite == "all") reports.push_back(verify_projective(seed));
    if (suite == "conformal" || suite == "all") reports.push_back(verify_conformal());
    bool ok = true;
    for (const auto& rep : reports) {
        std::printf("%s %s\n", rep.ok() ? "PASS" : "FAIL", rep.name.c_str());
        for (const auto& c : rep.checks)
            std::printf("  %-4s %-56s value=%.3e threshold=%.3e %s\n", c.ok() ? "ok" : "BAD", c.name.c_str(), c.value,
                        c.threshold, c.note.c_str());
        ok = ok && rep.ok();
    }
    if (!out.empty()) {
        fs::create_directories(out);
        write_text(fs::path(out) / ("verify-" + suite + ".json"), reports_to_json(reports) + "\n");
    }
    return ok ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrange billiards simulation and verification lab"};
    app.require_subcommand(1);

    std::string config, out = "out", dump, suite;
    std::vector<std::string> preset_names;
    unsigned threads = 0;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Run a scenario or batch file and write CSVs plus a report");
    run->add_option("config", config, "Scenario JSON (single scenario or {\"scenarios\": [...]})");
    run->add_option("--preset", preset_names, "Preset name (repeatable)");
    run->add_option("-o,--out", out, "Output directory")->capture_default_str();
    run->add_option("-j,--threads", threads, "Worker threads for batches (0 = hardware)");

    auto* exp = app.add_subcommand("export", "Simulate and write plot CSVs only");
    exp->add_option("config", config, "Scenario JSON");
    exp->add_option("--preset", preset_names, "Preset name (repeatable)");
    exp->add_option("-o,--out", out, "Output directory")->capture_default_str();
    exp->add_option("-j,--threads", threads, "Worker threads for batches (0 = hardware)");

    auto* pre = app.add_subcommand("presets", "List shipped presets");
    pre->add_option("--dump", dump, "Also write each preset as JSON into this directory");

    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    ver->add_option("suite", suite, "projective | conformal | all")
        ->required()
        ->check(CLI::IsMember({"projective", "conformal", "all"}));
    ver->add_option("--seed", seed, "Seed for random states")->capture_default_str();
    ver->add_option("-o,--out", dump, "Directory for the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(config, preset_names, out, threads, false);
        if (*exp) return cmd_run(config, preset_names, out, threads, true);
        if (*pre) return cmd_presets(dump);
        if (*ver) return cmd_verify(suite, seed, dump);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
