#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "driftpp/cli.hpp"

int main(int argc, char** argv)
{
    namespace cli = driftpp::cli;

    CLI::App app{"driftpp: adaptive Learn++ classification over data-stream chunks"};
    app.require_subcommand(1);

    cli::RunOptions run_opts;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "pre-train on the initial chunk, then test-then-train every chunk");
    run->add_option("--config", run_opts.config_path, "key=value experiment config")->required();
    run->add_option("--out", run_opts.output_dir, "output directory")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");

    cli::GenerateOptions gen_opts;
    auto* generate = app.add_subcommand("generate", "write a synthetic chunk stream");
    generate->add_option("--config", gen_opts.config_path, "key=value stream config")->required();
    generate->add_option("--out", gen_opts.output_dir, "output directory")->required();

    cli::ReportOptions report_opts;
    auto* report = app.add_subcommand("report", "recompute the per-chunk table from records.jsonl");
    report->add_option("records", report_opts.records_path, "records.jsonl from a run")->required();
    report->add_option("--drift-f1-drop", report_opts.drift_f1_drop, "alarm threshold below the F1 baseline");
    report->add_option("--drift-baseline-window", report_opts.drift_baseline_window,
                       "number of earlier chunks in the F1 baseline");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        if (*seed_opt)
            run_opts.seed = seed;
        return cli::cmd_run(run_opts, std::cout, std::cerr);
    }
    if (*generate)
        return cli::cmd_generate(gen_opts, std::cout, std::cerr);
    return cli::cmd_report(report_opts, std::cout, std::cerr);
}
