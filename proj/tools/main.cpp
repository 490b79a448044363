#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lowlying/config.hpp"
#include "lowlying/errors.hpp"
#include "lowlying/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"one-level densities and rank statistics for twisted elliptic-curve L-functions"};
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON experiment description");

    // per-flag overrides of the config document
    std::string mode, weight, family, cache_dir, output_path;
    int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0, conductor = 0, prime_cap = 0;
    int l = 0, known_rank = -1;
    double X = 0, sigma = 0;
    std::size_t coefficient_cap = 0;
    unsigned threads = 0;
    auto* o_mode = app.add_option("--mode", mode, "ap|chars|density-cyclic|density-cubic|ranks|fields|bound|theta");
    auto* o_a1 = app.add_option("--a1", a1);
    auto* o_a2 = app.add_option("--a2", a2);
    auto* o_a3 = app.add_option("--a3", a3);
    auto* o_a4 = app.add_option("--a4", a4);
    auto* o_a6 = app.add_option("--a6", a6);
    auto* o_cond = app.add_option("--conductor", conductor);
    auto* o_rank = app.add_option("--known-rank", known_rank);
    auto* o_l = app.add_option("--l", l, "character order (odd prime)");
    auto* o_X = app.add_option("--X", X, "family bound");
    auto* o_sigma = app.add_option("--sigma", sigma, "test-function support parameter");
    auto* o_weight = app.add_option("--weight", weight, "bump|sharp");
    auto* o_family = app.add_option("--family", family, "bound mode: cyclic|s3");
    auto* o_pcap = app.add_option("--prime-cap", prime_cap);
    auto* o_ccap = app.add_option("--coefficient-cap", coefficient_cap);
    auto* o_threads = app.add_option("--threads", threads);
    auto* o_cache = app.add_option("--cache-dir", cache_dir)->envname("LOWLYING_CACHE_DIR");
    auto* o_out = app.add_option("--output", output_path);

    // subcommands mirror the mode names
    for (const char* m : {"ap", "chars", "density-cyclic", "density-cubic", "ranks", "fields",
                          "bound", "theta"})
        app.add_subcommand(m, std::string("run the ") + m + " mode");

    CLI11_PARSE(app, argc, argv);

    lowlying::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = lowlying::config_from_file(config_path);

        for (auto* sub : app.get_subcommands()) cfg.mode = sub->get_name();
        if (*o_mode) cfg.mode = mode;
        if (*o_a1) cfg.a1 = a1;
        if (*o_a2) cfg.a2 = a2;
        if (*o_a3) cfg.a3 = a3;
        if (*o_a4) cfg.a4 = a4;
        if (*o_a6) cfg.a6 = a6;
        if (*o_cond) cfg.conductor = conductor;
        if (*o_rank) cfg.known_rank = known_rank;
        if (*o_l) cfg.l = l;
        if (*o_X) cfg.X = X;
        if (*o_sigma) cfg.sigma = sigma;
        if (*o_weight) cfg.weight = weight;
        if (*o_family) cfg.family = family;
        if (*o_pcap) cfg.prime_cap = prime_cap;
        if (*o_ccap) cfg.coefficient_cap = coefficient_cap;
        if (*o_threads) cfg.thread_count = threads;
        if (*o_cache) cfg.cache_dir = cache_dir;
        if (*o_out) cfg.output_path = output_path;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": {\"type\": \"" << lowlying::error_type_name(e)
                  << "\", \"message\": \"" << e.what() << "\"}}\n";
        return 2;
    }

    return lowlying::run(cfg);
}
