// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driftpp/driftpp.hpp"
#include "oracles.hpp"

using namespace driftpp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

std::vector<double> as_vector(const WeightDistribution& d)
{
    return {d.weights().begin(), d.weights().end()};
}

/// Labels from a noisy random hyperplane, so learners have something to find.
std::vector<LabeledInstance> noisy_linear(std::mt19937_64& rng, std::size_t n, std::size_t d, double noise)
{
    auto pts = oracle::random_instances(rng, n, d);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> w(d);
    for (auto& v : w)
        v = g(rng);
    std::bernoulli_distribution flip(noise);
    for (auto& p : pts) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            s += w[j] * p.features[j];
        p.label = (s > 0.0) != flip(rng) ? ClassLabel::up() : ClassLabel::down();
    }
    return pts;
}

Outcome equation_conformance()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::size_t exact = 0, checks = 0;
    double worst = 0.0;
    auto record = [&](double got, double want) {
        ++checks;
        exact += got == want ? 1 : 0;
        worst = std::max(worst, std::abs(got - want));
    };
    std::uniform_int_distribution<std::size_t> size(2, 60), dim(1, 6);
    for (int c = 0; c < 1000; ++c) {
        const std::size_t n = size(rng);
        const auto window = oracle::random_instances(rng, n, dim(rng));
        const auto weights = oracle::random_distribution(rng, n);
        const auto dist = WeightDistribution::from_raw(weights);
        const auto train = oracle::random_instances(rng, 1 + rng() % 20, window[0].features.size());
        const KnnConfig kc{1 + rng() % 5, rng() % 2 == 0 ? 2.0 : 1.0};
        const auto model = knn_fit(kc, train);

        std::vector<ClassLabel> predicted;
        for (const auto& x : window)
            predicted.push_back(oracle::knn(train, x.features, kc.k, kc.p).first);
        const double e = hypothesis_error(model, window, dist);
        const double e_oracle = oracle::weighted_error(predicted, window, as_vector(dist));
        record(e, e_oracle);
        if (e_oracle < 0.5)
            record(normalize_error(e), std::max(oracle::normalized(e_oracle), kBetaFloor));

        // A two-voter composite on the same window.
        const auto train2 = oracle::random_instances(rng, 1 + rng() % 20, window[0].features.size());
        const double b1 = 0.05 + 0.9 * std::generate_canonical<double, 53>(rng);
        const double b2 = 0.05 + 0.9 * std::generate_canonical<double, 53>(rng);
        const std::vector<WeakHypothesis> hs{{model, 0.0, b1, std::log(1.0 / b1), 0},
                                             {knn_fit(kc, train2), 0.0, b2, std::log(1.0 / b2), 0}};
        std::vector<ClassLabel> composite;
        for (const auto& x : window) {
            const std::vector<ClassLabel> labels{oracle::knn(train, x.features, kc.k, kc.p).first,
                                                 oracle::knn(train2, x.features, kc.k, kc.p).first};
            composite.push_back(oracle::vote(labels, {b1, b2}).first);
        }
        const double big_e = composite_error(hs, window, dist);
        const double big_e_oracle = oracle::weighted_error(composite, window, as_vector(dist));
        record(big_e, big_e_oracle);
        const auto big_b = normalize_composite_error(big_e);
        const bool in_range = big_e_oracle > 0.0 && big_e_oracle < 0.5;
        if (big_b.has_value() != in_range)
            return {false, fmt("case %d: normalize_composite_error range mismatch at E=%.17g", c, big_e)};
        if (big_b) {
            record(*big_b, oracle::normalized(big_e_oracle));
            std::vector<bool> correct(n);
            for (std::size_t i = 0; i < n; ++i)
                correct[i] = composite[i] == window[i].label;
            const auto updated = update_weights(dist, correct, *big_b);
            const auto want = oracle::update(as_vector(dist), correct, oracle::normalized(big_e_oracle));
            for (std::size_t i = 0; i < n; ++i)
                record(updated[i], want[i]);
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = worst <= 1e-12 && secs < 10.0;
    return {pass, fmt("1000 cases, %zu comparisons, %zu bit-exact, max |diff| %.3g, %.2f s", checks, exact, worst,
                      secs)};
}

Outcome vote_oracle()
{
    std::mt19937_64 rng(1002);
    std::size_t mismatches = 0, queries = 0;
    for (std::size_t size = 1; size <= 5; ++size) {
        for (int ensemble = 0; ensemble < 20; ++ensemble) {
            const std::size_t d = 1 + rng() % 4;
            std::vector<WeakHypothesis> hs;
            std::vector<std::vector<LabeledInstance>> training;
            std::vector<double> betas;
            for (std::size_t t = 0; t < size; ++t) {
                training.push_back(oracle::random_instances(rng, 1 + rng() % 15, d));
                // Mix floored, tied and ordinary betas.
                const int kind = static_cast<int>(rng() % 4);
                const double b = kind == 0 ? kBetaFloor
                                 : kind == 1 ? 0.25
                                             : 0.01 + 0.98 * std::generate_canonical<double, 53>(rng);
                betas.push_back(b);
                hs.push_back({knn_fit({1 + rng() % 3, 2.0}, training.back()), 0.0, b, std::log(1.0 / b), 0});
            }
            for (const auto& q : oracle::random_instances(rng, 200, d)) {
                std::vector<ClassLabel> labels;
                for (std::size_t t = 0; t < size; ++t)
                    labels.push_back(oracle::knn(training[t], q.features, hs[t].model.config().k, 2.0).first);
                const auto want = oracle::vote(labels, betas);
                const auto got = composite_vote(hs, q.features);
                ++queries;
                if (!(got.label == want.first) || std::abs(got.score - want.second) > 1e-12)
                    ++mismatches;
            }
        }
    }
    return {mismatches == 0, fmt("100 ensembles (sizes 1-5) x 200 inputs, %zu queries, %zu mismatches", queries,
                                 mismatches)};
}

Outcome knn_oracle()
{
    std::mt19937_64 rng(1003);
    std::size_t mismatches = 0, queries = 0;
    for (int set = 0; set < 100; ++set) {
        const std::size_t n = 1 + rng() % 200;
        const std::size_t d = 1 + rng() % 10;
        auto pts = oracle::random_instances(rng, n, d);
        const bool grid = set % 3 == 0; // integer coordinates force distance ties
        if (grid)
            for (auto& p : pts)
                for (auto& v : p.features)
                    v = std::round(v * 2.0);
        const KnnConfig kc{1 + rng() % 9, set % 2 == 0 ? 2.0 : (set % 4 == 1 ? 1.0 : 3.0)};
        const auto model = knn_fit(kc, pts);
        auto qs = oracle::random_instances(rng, 20, d);
        for (auto& q : qs) {
            if (grid)
                for (auto& v : q.features)
                    v = std::round(v * 2.0);
            const auto got = knn_predict(model, q.features);
            const auto want = oracle::knn(pts, q.features, kc.k, kc.p);
            ++queries;
            if (!(got.label == want.first) || got.score != want.second)
                ++mismatches;
        }
    }
    return {mismatches == 0, fmt("100 datasets, %zu queries, %zu mismatches", queries, mismatches)};
}

Outcome auc_oracle()
{
    std::mt19937_64 rng(1004);
    double worst = 0.0;
    for (int set = 0; set < 50; ++set) {
        const std::size_t n = 2 + rng() % 499;
        const int levels = 1 + static_cast<int>(rng() % 30);
        std::vector<PredictionRecord> recs;
        for (std::size_t i = 0; i < n; ++i) {
            const auto truth = rng() % 2 == 0 ? ClassLabel::up() : ClassLabel::down();
            recs.push_back({"c", i, truth, truth, static_cast<double>(rng() % levels) / levels});
        }
        recs[0].truth = ClassLabel::up();
        recs[1].truth = ClassLabel::down();
        worst = std::max(worst, std::abs(auc(recs) - oracle::auc_pairwise(recs)));
    }
    return {worst <= 1e-9, fmt("50 record sets, max |diff| %.3g", worst)};
}

Outcome pca_oracle()
{
    std::mt19937_64 rng(1005);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0, worst_total = 0.0, worst_prefix = 0.0;
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{{50, 8}, {80, 12}, {100, 20}, {150, 30}, {200, 40}};
    for (const auto& [n, d] : shapes) {
        for (int rep = 0; rep < 4; ++rep) {
            // Correlated columns: a random mixing of independent scaled normals.
            std::vector<std::vector<double>> mix(d, std::vector<double>(d));
            for (auto& r : mix)
                for (auto& v : r)
                    v = g(rng);
            Chunk c{"p", {}, d};
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> z(d), x(d, 0.0);
                for (std::size_t j = 0; j < d; ++j)
                    z[j] = g(rng) * std::pow(0.85, static_cast<double>(j));
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b)
                        x[a] += mix[a][b] * z[b];
                rows.push_back(x);
                c.instances.push_back({x, ClassLabel::down(), i});
            }
            const auto model = pca_fit(c, d);
            const auto want = oracle::variance_ratios(rows);
            for (std::size_t j = 0; j < d; ++j)
                worst = std::max(worst, std::abs(model.explained_variance_ratio(static_cast<Eigen::Index>(j)) - want[j]));
            worst_total = std::max(worst_total, std::abs(tevr(model, d) - 1.0));

            const std::size_t k = 1 + rng() % d;
            const auto full = pca_transform(model, c, d);
            const auto part = pca_transform(pca_fit(c, k), c, k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    worst_prefix =
                        std::max(worst_prefix, std::abs(full.instances[i].features[j] - part.instances[i].features[j]));
        }
    }
    const bool pass = worst <= 1e-8 && worst_total <= 1e-9 && worst_prefix <= 1e-8;
    return {pass, fmt("20 matrices 50x8..200x40, ratio diff %.3g, |tevr-1| %.3g, prefix diff %.3g", worst, worst_total,
                      worst_prefix)};
}

Outcome invariant_suite()
{
    std::mt19937_64 rng(1006);
    std::size_t rounds = 0, hypotheses = 0, early_stops = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 10 + rng() % 90;
        const auto window = noisy_linear(rng, n, 1 + rng() % 5, 0.1 * (trial % 3));
        if (!trainable_window(window))
            continue;
        LearnPPConfig cfg;
        cfg.n_estimators = 1 + rng() % 6;
        cfg.max_retries = 100;
        cfg.knn.k = 1 + rng() % 5;
        std::mt19937_64 r(trial);
        const auto start = trial % 2 == 0 ? init_weights(n) : WeightDistribution::from_raw(oracle::random_distribution(rng, n));
        RoundResult res;
        try {
            res = run_round(window, start, {}, cfg, r);
        } catch (const RoundFailed&) {
            continue;
        }
        ++rounds;
        if (std::abs(res.final_weights.sum() - 1.0) > 1e-9)
            return {false, fmt("trial %d: final weight sum %.17g", trial, res.final_weights.sum())};
        for (std::size_t s = 0; s < res.steps.size(); ++s) {
            const auto& st = res.steps[s];
            if (std::abs(st.weight_sum - 1.0) > 1e-9)
                return {false, fmt("trial %d step %zu: weight sum %.17g", trial, s, st.weight_sum)};
            if (st.composite_misclassified == 0 && s + 1 != res.steps.size())
                return {false, fmt("trial %d: zero composite error at step %zu did not stop the round", trial, s)};
        }
        if (!res.steps.empty() && res.steps.back().composite_misclassified == 0 &&
            res.hypotheses.size() < cfg.n_estimators) {
            if (!res.stopped_early)
                return {false, fmt("trial %d: early stop not reported", trial)};
            ++early_stops;
        }
        for (const auto& h : res.hypotheses) {
            ++hypotheses;
            if (!(h.error < 0.5) || !(h.beta > 0.0 && h.beta < 1.0))
                return {false, fmt("trial %d: accepted hypothesis e=%.17g beta=%.17g", trial, h.error, h.beta)};
        }
    }

    // Determinism of a whole seeded run, compared as serialized bytes.
    StreamSpec s;
    s.n_chunks = 4;
    s.chunk_size = 300;
    s.dimensionality = 8;
    s.noise = 0.05;
    s.seed = 5;
    const auto chunks = generate_stream(s);
    RunConfig rc;
    rc.pc_count = 5;
    rc.learnpp.window_size = 60;
    rc.learnpp.seed = 11;
    auto serialize = [&] {
        const auto r = run_experiment(chunks[0], std::span(chunks).subspan(1), rc);
        std::ostringstream out;
        format_records_jsonl(r.records, out);
        format_reports_csv(r.reports, out);
        return out.str();
    };
    const bool same = serialize() == serialize();
    return {same && rounds > 100, fmt("%zu rounds, %zu hypotheses, %zu early stops, seeded runs identical: %s", rounds,
                                      hypotheses, early_stops, same ? "yes" : "no")};
}

Outcome sudden_drift_pattern()
{
    const auto t0 = Clock::now();
    StreamSpec s;
    s.n_chunks = 6;
    s.chunk_size = 2000;
    s.dimensionality = 20;
    s.noise = 0.05;
    s.seed = 42;
    s.drift = {DriftKind::sudden, 5, 1.0, 1};
    const auto chunks = generate_stream(s);
    RunConfig rc;
    rc.pc_count = 10;
    rc.learnpp.window_size = 100;
    rc.learnpp.seed = 42;
    const auto r = run_experiment(chunks[0], std::span(chunks).subspan(1), rc);
    const double secs = seconds_since(t0);
    if (r.error || r.reports.size() != 6)
        return {false, "run did not complete: " + r.error.value_or("missing reports")};

    double mean = 0.0;
    bool early_ok = true;
    std::string f1s;
    for (std::size_t i = 1; i <= 4; ++i) {
        mean += r.reports[i].f1 / 4.0;
        early_ok = early_ok && r.reports[i].f1 >= 0.90;
        f1s += fmt("%.4f ", r.reports[i].f1);
    }
    const double last = r.reports[5].f1;
    std::size_t alarms = 0;
    for (const auto& rep : r.reports)
        alarms += rep.drift_alarm ? 1 : 0;
    const bool pass = early_ok && last <= mean - 0.20 && alarms == 1 && r.reports[5].drift_alarm && secs < 120.0;
    return {pass, fmt("F1 chunks 1-4: %s-> chunk 5: %.4f (%.1f%% correct), alarms %zu, %.1f s", f1s.c_str(), last,
                      100.0 * r.reports[5].percent_correct, alarms, secs)};
}

Outcome finite_memory()
{
    StreamSpec s;
    s.n_chunks = 51;
    s.chunk_size = 200;
    s.dimensionality = 20;
    s.noise = 0.05;
    s.seed = 3;
    s.drift = {DriftKind::gradual, 10, 1.0, 30};
    const auto chunks = generate_stream(s);
    RunConfig rc;
    rc.pc_count = 10;
    rc.learnpp.window_size = 50;
    rc.learnpp.max_window_ensembles = 4;
    rc.learnpp.seed = 3;
    const std::size_t cap = 4 * rc.learnpp.n_estimators;

    auto pre = pretrain(chunks[0], rc);
    LearnPPModel& model = pre.model;
    std::size_t worst_h = model.hypotheses().size(), worst_b = 0;
    for (std::size_t c = 1; c < chunks.size(); ++c) {
        const auto prepared = prepare_chunk(chunks[c], rc);
        for (const auto& inst : prepared.instances) {
            const auto p = model.predict(inst.features);
            model.partial_fit(inst, p.label == inst.label);
            worst_h = std::max(worst_h, model.hypotheses().size());
            worst_b = std::max(worst_b, model.buffer().size());
        }
    }
    worst_b = std::max(worst_b, model.peak_buffer());
    const bool pass = worst_h <= cap && worst_b <= *rc.learnpp.window_size;
    return {pass, fmt("50 chunks, %zu windows, max hypotheses %zu (cap %zu), peak buffer %zu (window %zu)",
                      model.windows_completed(), worst_h, cap, worst_b, *rc.learnpp.window_size)};
}

Outcome sentinel_integrity()
{
    StreamSpec s;
    s.n_chunks = 2;
    s.chunk_size = 300;
    s.dimensionality = 10;
    s.noise = 0.05;
    s.seed = 8;
    const auto chunks = generate_stream(s);
    RunConfig rc;
    rc.pc_count = 6;
    rc.learnpp.window_size = 40;
    rc.learnpp.seed = 8;
    const auto pre = pretrain(chunks[0], rc);

    std::size_t checked = 0, later_changes = 0;
    for (std::size_t j : {0u, 17u, 39u, 40u, 41u, 150u, 279u, 299u}) {
        Chunk flipped = chunks[1];
        flipped.instances[j].label = flipped.instances[j].label.flipped();
        LearnPPModel a = pre.model, b = pre.model;
        const auto base = process_chunk(a, chunks[1], rc);
        const auto alt = process_chunk(b, flipped, rc);
        for (std::size_t i = 0; i <= j; ++i) {
            if (base.records[i].predicted != alt.records[i].predicted || base.records[i].score != alt.records[i].score)
                return {false, fmt("sentinel %zu changed the prediction of instance %zu", j, i)};
        }
        for (std::size_t i = j + 1; i < base.records.size(); ++i)
            later_changes += base.records[i].score != alt.records[i].score ? 1 : 0;
        ++checked;
    }
    return {true, fmt("%zu sentinels, own and earlier predictions unchanged, %zu later scores moved", checked,
                      later_changes)};
}

} // namespace

int main()
{
    log::logger().set_level(spdlog::level::err);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"equation conformance", equation_conformance},
        {"vote oracle", vote_oracle},
        {"knn oracle", knn_oracle},
        {"auc oracle", auc_oracle},
        {"pca oracle", pca_oracle},
        {"invariant suite", invariant_suite},
        {"sudden drift pattern", sudden_drift_pattern},
        {"finite memory", finite_memory},
        {"test-then-train integrity", sentinel_integrity},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
