#include <iostream>

#include "CLI11.hpp"
#include "recipes.hpp"

int main(int argc, char** argv) {
    using namespace qpg::cli;
    CLI::App app{"Spectral Galerkin solver for quasi-periodic multilayer gratings"};
    std::string recipe, config_path;
    RunOptions opt;
    app.add_option("recipe", recipe, "solve | convergence | greens-check | validate-flat | validate-ghost | "
                                     "validate-regularity | field-grid")
        ->required();
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--dump-matrix", opt.dump_matrix, "write the assembled system to system.bin");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const qpg::Error& e) {
        std::cerr << "qpgrating: " << e.what() << "\n";
        const int code = exit_code_for(e);
        write_failure_manifest(opt.out_dir, recipe, e.what(), code);
        return code;
    }
    return run(recipe, config, opt);
}
