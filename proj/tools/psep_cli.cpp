#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "psep/artifacts.hpp"
#include "psep/config.hpp"
#include "psep/pipeline.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_usage = 2;

}  // namespace

int main(int argc, char** argv)
{
    using namespace psep;
    CLI::App app{"Segregated two-component ground states: layer profiles, limit problem, ansatz, "
                 "linearized estimate and full-system continuation"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path, out_dir, eps_list;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "flat section.key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, std::string("output directory (default: $") + io::output_dir_env + " or ./psep-out)");
    app.add_option("--seed", seed, "random seed for the estimate ensemble");
    app.add_option("--threads", threads, "worker threads for the estimate ensemble")->check(CLI::PositiveNumber);
    app.add_option("--eps-list", eps_list, "comma-separated eps values, e.g. 0.1,0.05,0.025");

    const std::pair<const char*, const char*> verbs[] = {
        {"profiles", "layer profiles, correction W and hat profiles"},
        {"limit", "scalar limit problem, interface and nondegeneracy"},
        {"ansatz", "composite approximate solution for each eps"},
        {"estimate", "ensemble measurement of ||phi||_0 / ||g||_1 against eps"},
        {"continue", "full-system continuation in beta"},
        {"verify-all", "every acceptance check"}};
    for (const auto& [name, help] : verbs) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    io::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = io::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (!eps_list.empty()) {
            try {
                cfg.eps_list = io::parse_number_list(eps_list);
            } catch (const std::exception& e) {
                throw io::ConfigError({std::string("--eps-list: ") + e.what()});
            }
        }
        io::validate(cfg);
    } catch (const io::ConfigError& e) {
        std::cerr << "configuration error:\n" << e.what() << "\n";
        return exit_usage;
    }

    std::filesystem::path dir = !out_dir.empty() ? std::filesystem::path(out_dir)
                                : !cfg.out_dir.empty() ? std::filesystem::path(cfg.out_dir)
                                                       : io::default_output_dir();
    try {
        const pipeline::RunResult r = pipeline::run_pipeline(cfg, verb, dir);
        for (const auto& c : r.checks)
            std::cout << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << c.summary << "\n";
        std::cout << "artifacts: " << r.dir.string() << "\n";
        return r.pass ? exit_pass : exit_check_failed;
    } catch (const pipeline::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_check_failed;
    }
}
