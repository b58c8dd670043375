// aracusum: threshold calibration, Monte Carlo evaluation, allocation
// behaviour studies and data replay for adaptive-allocation CUSUM monitoring.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aracusum/commands.hpp"
#include "aracusum/error.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::vector<std::string> overrides;
    std::optional<std::string> data;
    int verbose = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Base seed (overrides simulation.base_seed)");
    cmd->add_option("--threads", args.threads, "Worker threads, 0 = all cores (results do not depend on it)");
    cmd->add_option("--out", args.out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--format", args.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--set", args.overrides, "Override a config field, e.g. --set prior.decay=0.6");
    cmd->add_flag("-v,--verbose", args.verbose, "Report progress on stderr");
}

aracusum::CliConfig load(const CommonArgs& args) {
    using namespace aracusum;
    nlohmann::json doc = read_config_file(args.config_path);
    for (const auto& o : args.overrides) apply_override(doc, o);
    if (args.seed) doc["simulation"]["base_seed"] = *args.seed;
    if (args.threads) doc["simulation"]["threads"] = *args.threads;
    if (args.out_dir) doc["output"]["dir"] = *args.out_dir;
    if (args.format) doc["output"]["format"] = *args.format;
    if (args.data) doc["replay"]["data"] = *args.data;
    if (args.verbose > 0) doc["output"]["verbosity"] = args.verbose;
    return parse_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive resource allocation CUSUM for multi-region binomial count monitoring"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate thresholds to a target in-control ARL");
    auto* simulate = app.add_subcommand("simulate", "Estimate ARL1, detection precision and SDRL");
    auto* behavior = app.add_subcommand("behavior", "Summarise test allocations in and out of control");
    auto* replay = app.add_subcommand("replay", "Replay monitoring against a daily rate matrix");
    for (auto* cmd : {calibrate, simulate, behavior, replay}) add_common(cmd, args);
    replay->add_option("--data", args.data, "Rate matrix CSV (overrides replay.data)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : aracusum::kExitConfig;
    }

    try {
        const aracusum::CliConfig config = load(args);
        if (*calibrate) aracusum::cmd_calibrate(config, std::cerr);
        if (*simulate) aracusum::cmd_simulate(config, std::cerr);
        if (*behavior) aracusum::cmd_behavior(config, std::cerr);
        if (*replay) aracusum::cmd_replay(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "aracusum: " << e.what() << '\n';
        return aracusum::exit_code_for(e);
    }
    return aracusum::kExitOk;
}
