// chaingraph: Bitcoin block data -> temporal graph ETL, sampling, statistics.
//
// Subcommands: build | append | sample | profile | config
// Configuration: flat key=value file (--config), CHAINGRAPH_* environment
// overrides, then per-key --set flags; precedence low to high in that order.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chaingraph/config.hpp"
#include "chaingraph/errors.hpp"
#include "chaingraph/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_file, "flat key=value config file");
    cmd->add_option("-D,--set", args.sets, "override a config key, e.g. -D range.hi=100")
        ->take_all();
}

chaingraph::RunConfig resolve_config(const CommonArgs& args) {
    chaingraph::RunConfig cfg;
    if (!args.config_file.empty()) chaingraph::load_config_file(cfg, args.config_file);
    chaingraph::apply_env_overrides(cfg);
    for (const std::string& kv : args.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw chaingraph::ParseError("--set expects key=value, got '" + kv + "'");
        }
        chaingraph::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bitcoin blockchain to temporal-graph ETL toolkit"};
    app.require_subcommand(1);

    CommonArgs build_args, append_args, sample_args, profile_args, config_args;
    std::string dump_mode = "dump";

    CLI::App* build = app.add_subcommand("build", "fetch blocks, build graphs, write TSV batches");
    add_common(build, build_args);
    CLI::App* append = app.add_subcommand("append", "extend an existing layout with new blocks");
    add_common(append, append_args);
    CLI::App* sample = app.add_subcommand("sample", "sample subgraphs and encode feature vectors");
    add_common(sample, sample_args);
    CLI::App* profile = app.add_subcommand("profile", "compute per-block and whole-graph statistics");
    add_common(profile, profile_args);
    CLI::App* config = app.add_subcommand("config", "configuration helpers");
    add_common(config, config_args);
    config->add_option("action", dump_mode, "'dump' prints every key with its effective value");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return chaingraph::cmd_build(resolve_config(build_args));
        if (append->parsed()) return chaingraph::cmd_append(resolve_config(append_args));
        if (sample->parsed()) return chaingraph::cmd_sample(resolve_config(sample_args));
        if (profile->parsed()) return chaingraph::cmd_profile(resolve_config(profile_args));
        if (config->parsed()) {
            if (dump_mode != "dump") {
                std::cerr << "error: unknown config action '" << dump_mode << "'\n";
                return 1;
            }
            for (const auto& [key, value] : chaingraph::dump_config(resolve_config(config_args))) {
                std::cout << key << " = " << value << "\n";
            }
            return 0;
        }
    } catch (const chaingraph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
