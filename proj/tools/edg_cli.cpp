#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "edg/config.hpp"
#include "edg/errors.hpp"
#include "edg/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Exchange-driven growth: mean-field solver, particle simulator and finite-system audits"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;

    const char* cmds[][2] = {
        {"solve", "integrate the mean-field system and audit the EDF"},
        {"simulate", "run the lifted particle chain"},
        {"chaos", "propagation-of-chaos table over an L schedule"},
        {"condense", "condensation witness for a WeightDriven kernel"},
        {"gamma", "normalized entropy table against its limit"},
        {"edp", "finite-system EDF audit on enumerated state spaces"},
        {"contraction", "net-flux contraction oracle"},
        {"validate-kernel", "report kernel assumptions and detailed balance"},
    };
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);

    try {
        edg::RunContext ctx;
        ctx.cfg = edg::Config::load(config_path);
        ctx.seed = ctx.cfg.has("run", "seed") && app.get_subcommands().front()->count("--seed") == 0
                       ? static_cast<std::uint64_t>(ctx.cfg.integer("run", "seed"))
                       : seed;
        ctx.out_dir = out_dir;
        ctx.threads = threads;
        ctx.command = app.get_subcommands().front()->get_name();
        return edg::run_command(ctx);
    } catch (const edg::ConfigError& e) {
        std::cerr << "config error: " << e.what();
        if (!e.field().empty()) std::cerr << " [field " << e.field() << "]";
        std::cerr << '\n';
        return 2;
    } catch (const edg::SizeError& e) {
        std::cerr << "size error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
