#ifndef BENCH_ORCHESTRATOR_ORCHESTRATOR_HPP
#define BENCH_ORCHESTRATOR_ORCHESTRATOR_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "../datastore/checkpoint.hpp"
#include "../datastore/dataset.hpp"
#include "../datastore/prediction_record.hpp"
#include "../datastore/split.hpp"
#include "../error.hpp"
#include "../learners/models.hpp"
#include "../learners/registry.hpp"
#include "../learners/tuning.hpp"
#include "../metrics/metrics.hpp"
#include "../random.hpp"

namespace bench {

struct RunConfig {
    fs::path collection_dir;
    std::vector<std::string> strategy_ids;  // empty: every registered strategy
    double split_ratio = 2.0 / 3.0;
    std::uint64_t master_seed = 0;
    std::size_t parallelism = 1;
    bool paper_standardize = false;  // standardize each full dataset before splitting
    std::size_t cv_folds = 5;
    std::map<std::string, Grid> grid_overrides;
    bool record_timing = true;  // false stores 0 s, making records byte-reproducible
    // Stop dispatching after this many newly completed jobs (simulated interruption).
    std::optional<std::size_t> stop_after;
    std::ostream* progress = &std::cerr;
};

struct JobFailure {
    JobKey key;
    std::string error;
};

struct RunSummary {
    std::size_t completed = 0;  // newly completed in this invocation
    std::size_t skipped = 0;    // already completed before this invocation
    std::size_t failed = 0;
    std::size_t pending = 0;    // not attempted (interrupted)
    std::vector<JobFailure> failures;
    double wall_time = 0.0;
};

/// Seed of one (dataset, strategy) job; independent of execution order.
inline std::uint64_t job_seed(std::uint64_t master, const std::string& dataset_id,
                              const std::string& strategy_id) {
    return derive_seed(master, dataset_id, strategy_id);
}

inline std::uint64_t split_seed(std::uint64_t master, const std::string& dataset_id) {
    return derive_seed(master, "split", dataset_id);
}

/// Digest of the configuration fields that determine results. Strategy selection,
/// parallelism and interruption do not change any individual job's output.
inline std::string config_digest(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["master_seed"] = c.master_seed;
    j["split_ratio"] = c.split_ratio;
    j["paper_standardize"] = c.paper_standardize;
    j["cv_folds"] = c.cv_folds;
    j["record_timing"] = c.record_timing;
    auto g = nlohmann::ordered_json::object();
    for (const auto& [id, grid] : c.grid_overrides) {
        auto e = nlohmann::ordered_json::object();
        for (const auto& [name, values] : grid) e[name] = values;
        g[id] = std::move(e);
    }
    j["grid_overrides"] = std::move(g);
    return digest_of(j.dump());
}

/// Generates a split for every dataset that has none, seeded from `master_seed`.
inline void ensure_splits(const fs::path& collection, double ratio, std::uint64_t master_seed) {
    for (const auto& id : list_datasets(collection)) {
        if (has_split(collection, id)) continue;
        const auto ds = load_dataset(collection, id);
        save_split(collection, generate_split(ds, ratio, split_seed(master_seed, id)));
    }
}

/// Tune (when the grid has a choice to make), fit on the training rows only,
/// and predict the test rows. Test rows never reach tune or fit.
inline PredictionRecord run_job(const Dataset& ds, const SplitSpec& split,
                                const StrategyDescriptor& strategy, const RunConfig& config) {
    const auto seed = job_seed(config.master_seed, ds.id, strategy.id);
    Matrix all = ds.features;
    FitOptions fit_options;
    if (config.paper_standardize) {
        all = standardize_apply(standardize_fit(all), all);
        fit_options.standardize = false;
    }
    const auto train_x = all.select_rows(split.train_indices);
    const auto train_y = select(std::span<const double>(ds.labels),
                                std::span<const std::size_t>(split.train_indices));
    const auto test_x = all.select_rows(split.test_indices);

    PredictionRecord rec;
    rec.dataset_id = ds.id;
    rec.strategy_id = strategy.id;
    const auto start = std::chrono::steady_clock::now();
    const auto grid = effective_grid(strategy, config.grid_overrides);
    const auto points = expand_grid(grid);
    rec.tuning_report.cv_seed = derive_seed(seed, "cv");
    if (points.size() > 1) {
        rec.tuning_report = tune(strategy, grid, train_x, train_y, config.cv_folds,
                                 rec.tuning_report.cv_seed, fit_options);
    } else {
        rec.tuning_report.winner = points.front();
    }
    const auto model = fit(strategy, rec.tuning_report.winner, train_x, train_y, seed, fit_options);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.training_time = config.record_timing ? elapsed : 0.0;
    rec.predicted_labels = predict(model, test_x);
    rec.model_summary = model_summary(model);
    return rec;
}

/// Runs every (dataset, strategy) pair of the collection that is not yet
/// completed, persisting a prediction record and a checkpoint after each one.
/// Job failures are recorded and do not stop the run.
inline RunSummary run(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& dir = config.collection_dir;
    std::vector<StrategyDescriptor> strategies =
        config.strategy_ids.empty() ? registry_lookup()
                                    : registry_lookup({.task = {}, .family = {}, .ids = config.strategy_ids});
    if (config.parallelism == 0) throw Error(Errc::DomainError, "parallelism must be positive");

    const auto dataset_ids = list_datasets(dir);
    if (dataset_ids.empty()) throw Error(Errc::EmptyInput, "no datasets in " + dir.string());
    ensure_splits(dir, config.split_ratio, config.master_seed);

    RunState state;
    const auto cfg_digest = config_digest(config);
    if (auto previous = checkpoint_read(dir)) {
        if (previous->config_digest != cfg_digest)
            throw Error(Errc::ConfigDigestMismatch,
                        "run configuration differs from the checkpointed one; use a fresh collection "
                        "directory or the original settings");
        state = std::move(*previous);
    } else {
        state.collection_digest = collection_digest(dir);
        state.config_digest = cfg_digest;
    }

    std::map<std::string, Dataset> datasets;
    std::map<std::string, SplitSpec> splits;
    for (const auto& id : dataset_ids) {
        datasets.emplace(id, load_dataset(dir, id));
        splits.emplace(id, load_split(dir, id));
    }

    RunSummary summary;
    std::vector<std::pair<const Dataset*, const StrategyDescriptor*>> jobs;
    for (const auto& id : dataset_ids) {
        for (const auto& s : strategies) {
            if (state.completed.contains({id, s.id})) {
                ++summary.skipped;
                continue;
            }
            jobs.emplace_back(&datasets.at(id), &s);
        }
    }
    std::size_t budget = config.stop_after.value_or(jobs.size());
    if (budget < jobs.size()) {
        summary.pending = jobs.size() - budget;
        jobs.resize(budget);
    }

    struct Outcome {
        JobKey key;
        std::optional<PredictionRecord> record;
        std::string error;
    };
    std::mutex mu;
    std::condition_variable cv;
    std::queue<Outcome> outcomes;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto& [ds, strategy] = jobs[i];
            Outcome o{{ds->id, strategy->id}, std::nullopt, {}};
            try {
                o.record = run_job(*ds, splits.at(ds->id), *strategy, config);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
            {
                std::lock_guard lock(mu);
                outcomes.push(std::move(o));
            }
            cv.notify_one();
        }
    };

    std::vector<std::jthread> pool;
    const std::size_t n_workers = std::min(config.parallelism, std::max<std::size_t>(jobs.size(), 1));
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    // Single writer: this thread persists every record and checkpoint.
    for (std::size_t done = 0; done < jobs.size(); ++done) {
        Outcome o;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return !outcomes.empty(); });
            o = std::move(outcomes.front());
            outcomes.pop();
        }
        if (o.record) {
            state.record_digests[o.key] = save_prediction_record(dir, *o.record);
            state.completed.insert(o.key);
            state.failed.erase(o.key);
            ++summary.completed;
            if (config.progress)
                *config.progress << o.key.strategy_id << " trained on dataset "
                                 << datasets.at(o.key.dataset_id).name << "\n";
        } else {
            state.failed[o.key] = o.error;
            summary.failures.push_back({o.key, o.error});
            ++summary.failed;
            if (config.progress)
                *config.progress << o.key.strategy_id << " failed on dataset "
                                 << datasets.at(o.key.dataset_id).name << ": " << o.error << "\n";
        }
        state.in_progress.reset();
        checkpoint_write(dir, state);
    }
    pool.clear();
    if (jobs.empty()) checkpoint_write(dir, state);
    summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

// ---------------------------------------------------------------------------
// Loading finished runs for evaluation

struct LoadedRun {
    EvaluationInputs inputs;
    std::vector<std::string> dataset_ids;
    std::vector<std::string> strategy_ids;
    std::set<JobKey> failed;  // pairs whose jobs failed; tolerated as missing
    std::map<JobKey, double> training_times;
};

/// Loads datasets, splits and every available prediction record. Strategies
/// default to those with a predictions directory.
inline LoadedRun load_run(const fs::path& collection, std::vector<std::string> strategy_ids = {}) {
    LoadedRun r;
    r.dataset_ids = list_datasets(collection);
    if (r.dataset_ids.empty()) throw Error(Errc::EmptyInput, "no datasets in " + collection.string());
    if (strategy_ids.empty()) {
        const auto pred_dir = collection / "predictions";
        if (fs::exists(pred_dir))
            for (const auto& e : fs::directory_iterator(pred_dir))
                if (e.is_directory()) strategy_ids.push_back(e.path().filename().string());
        std::sort(strategy_ids.begin(), strategy_ids.end());
    }
    r.strategy_ids = std::move(strategy_ids);
    if (auto state = checkpoint_read(collection))
        for (const auto& [k, msg] : state->failed) r.failed.insert(k);
    for (const auto& id : r.dataset_ids) {
        r.inputs.datasets.emplace(id, load_dataset(collection, id));
        if (has_split(collection, id)) r.inputs.splits.emplace(id, load_split(collection, id));
        for (const auto& s : r.strategy_ids) {
            const auto p = prediction_path(collection, s, id);
            if (!fs::exists(p)) continue;
            auto rec = parse_prediction_record(read_file(p));
            r.training_times[{id, s}] = rec.training_time;
            r.inputs.records.emplace(JobKey{id, s}, std::move(rec));
        }
    }
    return r;
}

} // namespace bench

#endif // BENCH_ORCHESTRATOR_ORCHESTRATOR_HPP
