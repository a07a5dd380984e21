#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "handles.hpp"

namespace {

enum Exit { kOk = 0, kSolver = 1, kConfig = 2 };

struct Overrides {
    std::string config;
    int n = 0;
    int m = 0;
    std::string side;
    std::string out;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("config", o.config, "TOML run configuration (default: built-in reference setup)");
    sub->add_option("--n", o.n, "half node count; replaces the configured meshes");
    sub->add_option("--m", o.m, "time steps; replaces the configured meshes");
    sub->add_option("--side", o.side, "bid, ask or both");
    sub->add_option("--out", o.out, "output directory");
}

cli::RunConfig resolve(const Overrides& o)
{
    cli::RunConfig cfg = o.config.empty() ? cli::default_config() : cli::load_config(o.config);
    if (o.n > 0 || o.m > 0) {
        cli::Mesh base = cfg.meshes.back();
        cfg.meshes = {{o.n > 0 ? o.n : base.n, o.m > 0 ? o.m : base.m}};
    }
    if (!o.side.empty()) cfg.side = cli::parse_side(o.side);
    if (!o.out.empty()) cfg.out_dir = o.out;
    cli::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"American call pricer for the gamma equation with variable transaction costs"};
    app.set_version_flag("--version", gp_version());
    app.require_subcommand(1);

    Overrides o;
    struct {
        const char* name;
        const char* help;
        int (*run)(const cli::RunConfig&);
    } commands[] = {
        {"price", "print model prices for the configured S values", cli::run_price},
        {"table", "write table_{side}_{n}x{m}.csv with binomial bounds", cli::run_table},
        {"boundary", "write early-exercise boundary curves", cli::run_boundary},
        {"curves", "write price, cost and beta curves", cli::run_curves},
        {"validate", "run the built-in consistency checks", cli::run_validate},
    };
    for (auto& c : commands) add_common(app.add_subcommand(c.name, c.help), o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        cli::RunConfig cfg = resolve(o);
        for (auto& c : commands)
            if (app.got_subcommand(c.name)) return c.run(cfg);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const cli::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kOk;
}
