// Generates a drifting stream in memory and runs the adaptive Learn++ harness on it.

#include <cstdio>
#include <span>

#include "driftpp/driftpp.hpp"

int main()
{
    using namespace driftpp;

    StreamSpec stream;
    stream.n_chunks = 6;
    stream.chunk_size = 2000;
    stream.dimensionality = 20;
    stream.noise = 0.05;
    stream.seed = 42;
    stream.drift = {DriftKind::sudden, 5, 1.0, 1};
    const auto chunks = generate_stream(stream);

    RunConfig config;
    config.pc_count = 10;
    config.learnpp.window_size = 100;
    config.learnpp.seed = 42;

    const auto result = run_experiment(chunks.front(), std::span(chunks).subspan(1), config);
    std::printf("%-10s %7s %7s %7s %9s  %s\n", "chunk", "F1", "AUC", "FNR", "correct", "alarm");
    for (const auto& r : result.reports) {
        std::printf("%-10s %7.4f %7.4f %7.4f %8.2f%%  %s\n", r.chunk_id.c_str(), r.f1, r.auc.value_or(0.0), r.fnr,
                    100.0 * r.percent_correct, r.drift_alarm ? "DRIFT" : "");
    }
    return 0;
}
