#include <CLI11.hpp>
#include <cstdio>

#include "currod/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"currod: one-dimensional limit models of thin curved elastic beams"};
    app.require_subcommand(1);

    currod::RunOptions opt;
    std::string quadrature = "normal";
    app.add_option("--config", opt.config_path, "JSON configuration file")->required();
    app.add_option("--out", opt.out_dir, "output directory (default: out)");
    app.add_option("--seed", opt.seed, "override the config seed (0 keeps it)");
    app.add_option("--threads", opt.threads, "worker threads for multi-h studies");
    app.add_option("--quadrature", quadrature, "normal | check (doubled-order self check)")
        ->check(CLI::IsMember({"normal", "check"}));

    for (const char* name : {"section", "cell", "reduce", "gamma", "ring"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    opt.quadrature_check = quadrature == "check";

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return currod::run_subcommand(cmd, opt);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
