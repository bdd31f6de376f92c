#include "kinchain/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int run_scenario(const std::string& forced_scenario, const std::string& config_path,
                 const std::string& out_dir, const std::vector<std::string>& overrides) {
    using namespace kinchain;
    try {
        std::vector<std::string> all = overrides;
        all.push_back("scenario=" + forced_scenario);
        if (!out_dir.empty()) all.push_back("output=" + out_dir);
        RunConfig cfg = parse_config_file(config_path, all);
        std::vector<std::filesystem::path> written = run(cfg);
        for (const auto& p : written) std::cout << p.string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space kinetic chains: states, evolution, residual checks, reports"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--override", overrides, "KEY=VALUE config override (repeatable)");
    };
    add_common(app.add_subcommand("state", "generate and dump the configured state"));
    add_common(app.add_subcommand("evolve", "advance the state, write snapshots and a series"));
    add_common(app.add_subcommand("check", "evaluate the requested residual equations"));
    add_common(app.add_subcommand("report", "write the H / f0 / f0_minus / <Q> series"));

    CLI11_PARSE(app, argc, argv);
    return run_scenario(app.get_subcommands().front()->get_name(), config_path, out_dir,
                        overrides);
}
