#include "amber/errors.hpp"
#include "amber/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"amber: ambient-backscatter BER experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool have_seed = false;
    bool have_out = false;
    bool have_threads = false;

    std::vector<CLI::App*> subs;
    for (const char* name :
         {"pdf_compare", "ber_vs_n", "ber_vs_snr", "threshold_table", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file (key = value lines)")
            ->required();
        sub->add_option("--out", out_dir, "output directory for CSV artifacts");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker threads (or env AMBER_THREADS)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    for (CLI::App* s : subs) {
        if (s == sub) {
            have_out = s->count("--out") > 0;
            have_seed = s->count("--seed") > 0;
            have_threads = s->count("--threads") > 0;
        }
    }

    try {
        amber::ExperimentConfig cfg = amber::load_config_file(config_path);
        amber::ExperimentKind cli_kind = amber::experiment_from_string(sub->get_name());
        cfg.experiment = cli_kind;
        if (have_out) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed;
        if (have_threads) {
            cfg.threads = threads;
        } else if (const char* env = std::getenv("AMBER_THREADS")) {
            cfg.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        }
        if (cfg.threads == 0) cfg.threads = 1;

        bool ok = amber::run_experiment(cfg, std::cout);
        return ok ? 0 : 1;
    } catch (const amber::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
