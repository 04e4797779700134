#ifndef BENCH_CLI_CLI_HPP
#define BENCH_CLI_CLI_HPP

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../comparison/comparison.hpp"
#include "../datastore/checkpoint.hpp"
#include "../datastore/dataset.hpp"
#include "../datastore/split.hpp"
#include "../error.hpp"
#include "../learners/registry.hpp"
#include "../metrics/metrics.hpp"
#include "../orchestrator/orchestrator.hpp"
#include "../orchestrator/synth.hpp"
#include "../report/report.hpp"

namespace bench::cli {

/// Parsed command line: the subcommand plus every option it may use.
struct CommandConfig {
    std::string subcommand;
    std::string collection_dir;
    std::uint64_t seed = 0;
    double ratio = 2.0 / 3.0;
    std::string strategies = "all";
    std::string loss = "mmce";
    std::string aggregate;
    double confidence = 0.95;
    std::string test = "t";
    std::string alternative = "two";
    std::string correction = "holm";
    double alpha = 0.05;
    std::size_t parallelism = 1;
    bool paper_standardize = false;
    bool paper_rmse = false;
    bool pinball_convention = false;
    std::size_t top = 0;
    // run
    std::string grids;
    bool no_timing = false;
    std::size_t max_jobs = 0;
    std::size_t folds = 5;
    // ingest
    std::string csv_path;
    std::string target;
    std::string id;
    std::string name;
    std::string source;
    std::string task = "classification";
    bool one_hot = false;
    // split
    bool force = false;
    // synth
    std::size_t n_datasets = 5;
    std::size_t n_points = 200;
    std::size_t n_features = 4;
    std::size_t n_classes = 2;
    double separation = 3.0;
    // report
    std::string out_dir;
};

inline Measure parse_measure(const CommandConfig& c) {
    if (!c.aggregate.empty()) {
        ScoreSpec s;
        s.paper_rmse = c.paper_rmse;
        if (c.aggregate == "sens") s.score = Score::Sensitivity;
        else if (c.aggregate == "spec") s.score = Score::Specificity;
        else if (c.aggregate == "prec") s.score = Score::Precision;
        else if (c.aggregate == "f1") s.score = Score::F1;
        else if (c.aggregate == "rmse") s.score = Score::RMSE;
        else throw CLI::ValidationError("--aggregate", "unknown score '" + c.aggregate + "'");
        return {s};
    }
    LossSpec l;
    l.pinball_convention = c.pinball_convention;
    if (c.loss == "mmce") l.loss = Loss::MMCE;
    else if (c.loss == "squared") l.loss = Loss::Squared;
    else if (c.loss == "absolute") l.loss = Loss::Absolute;
    else if (c.loss.starts_with("q:")) {
        l.loss = Loss::Quantile;
        auto a = csv::parse_real(std::string_view(c.loss).substr(2));
        if (!a) throw CLI::ValidationError("--loss", "bad quantile level in '" + c.loss + "'");
        l.alpha = *a;
    } else {
        throw CLI::ValidationError("--loss", "unknown loss '" + c.loss + "'");
    }
    return {l};
}

inline Alternative parse_alternative(const std::string& s) {
    if (s == "two") return Alternative::TwoSided;
    if (s == "less") return Alternative::Less;
    if (s == "greater") return Alternative::Greater;
    throw CLI::ValidationError("--alternative", "expected two, less or greater");
}

inline Correction parse_correction(const std::string& s) {
    if (s == "none") return Correction::None;
    if (s == "bonferroni") return Correction::Bonferroni;
    if (s == "holm") return Correction::Holm;
    throw CLI::ValidationError("--correction", "expected none, bonferroni or holm");
}

inline TestKind parse_test(const std::string& s) {
    if (s == "t") return TestKind::PairedT;
    if (s == "wilcoxon") return TestKind::WilcoxonSignedRank;
    if (s == "sign") return TestKind::SignTest;
    if (s == "friedman") return TestKind::Friedman;
    throw CLI::ValidationError("--test", "expected t, wilcoxon, sign or friedman");
}

inline std::vector<std::string> parse_strategy_list(const std::string& s) {
    if (s == "all" || s.empty()) return {};
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

/// Loss tensor + timings for the strategies that have been run.
inline BenchmarkResults load_results(const CommandConfig& c) {
    const fs::path dir = c.collection_dir;
    if (!fs::is_directory(dir / "predictions"))
        throw Error(Errc::MissingPair, "no prediction records in " + dir.string() + "; run `bench run` first");
    auto ids = parse_strategy_list(c.strategies);
    if (!ids.empty()) registry_lookup({.task = {}, .family = {}, .ids = ids});
    auto loaded = load_run(dir, ids);
    if (loaded.strategy_ids.empty())
        throw Error(Errc::MissingPair, "no prediction records in " + dir.string() + "; run `bench run` first");
    for (const auto& d : loaded.dataset_ids)
        if (!loaded.inputs.splits.contains(d))
            throw Error(Errc::MissingPair, "dataset '" + d + "' has no split; run `bench run` first");
    BenchmarkResults r;
    r.tensor = build_loss_tensor(loaded.inputs, parse_measure(c), loaded.dataset_ids,
                                 loaded.strategy_ids, loaded.failed);
    r.training_times = std::move(loaded.training_times);
    return r;
}

inline fs::path reports_dir(const CommandConfig& c) {
    return c.out_dir.empty() ? fs::path(c.collection_dir) / "reports" : fs::path(c.out_dir);
}

inline int execute(const CommandConfig& c, std::ostream& out, std::ostream& err) {
    const fs::path dir = c.collection_dir;
    if (c.subcommand == "ingest") {
        DatasetMetadata meta;
        meta.target_column = c.target;
        meta.id = c.id.empty() ? fs::path(c.csv_path).stem().string() : c.id;
        meta.name = c.name.empty() ? meta.id : c.name;
        meta.source = c.source.empty() ? c.csv_path : c.source;
        meta.task = parse_task(c.task);
        IngestOptions opt;
        opt.encoding = c.one_hot ? CategoricalEncoding::OneHot : CategoricalEncoding::Integer;
        const auto ds = ingest_dataset(c.csv_path, meta, dir, opt);
        out << "ingested " << ds.id << ": " << ds.size() << " rows, " << ds.features.cols() << " features\n";
        for (const auto& col : ds.constant_columns)
            err << "warning: column '" << col << "' is constant\n";
        return 0;
    }
    if (c.subcommand == "split") {
        for (const auto& id : list_datasets(dir)) {
            if (has_split(dir, id) && !c.force) {
                out << id << ": split exists\n";
                continue;
            }
            const auto ds = load_dataset(dir, id);
            const auto s = generate_split(ds, c.ratio, split_seed(c.seed, id));
            save_split(dir, s);
            out << id << ": " << s.train_indices.size() << " train / " << s.test_indices.size() << " test\n";
        }
        return 0;
    }
    if (c.subcommand == "synth") {
        SynthSpec spec{c.n_datasets, c.n_points, c.n_features, c.n_classes, c.separation, c.seed};
        const auto ids = synth_collection(spec, dir);
        out << "wrote " << ids.size() << " datasets to " << dir.string() << "\n";
        return 0;
    }
    if (c.subcommand == "run") {
        RunConfig rc;
        rc.collection_dir = dir;
        rc.strategy_ids = parse_strategy_list(c.strategies);
        rc.split_ratio = c.ratio;
        rc.master_seed = c.seed;
        rc.parallelism = c.parallelism;
        rc.paper_standardize = c.paper_standardize;
        rc.cv_folds = c.folds;
        rc.record_timing = !c.no_timing;
        if (c.max_jobs > 0) rc.stop_after = c.max_jobs;
        if (!c.grids.empty()) rc.grid_overrides = parse_grid_overrides(read_file(c.grids));
        rc.progress = &err;
        const auto s = run(rc);
        err << "completed " << s.completed << ", skipped " << s.skipped << ", failed " << s.failed
            << ", pending " << s.pending << "\n";
        return 0;
    }
    if (c.subcommand == "resume-status") {
        const auto state = checkpoint_read(dir);
        if (!state) {
            out << "no checkpoint\n";
            return 0;
        }
        const auto datasets = list_datasets(dir);
        out << "completed " << state->completed.size() << "\n";
        out << "failed " << state->failed.size() << "\n";
        for (const auto& [k, msg] : state->failed)
            out << "  " << k.dataset_id << " / " << k.strategy_id << ": " << msg << "\n";
        return 0;
    }

    // Evaluation subcommands.
    const auto results = load_results(c);
    for (const auto& w : results.tensor.warnings) err << "warning: " << w << "\n";
    for (const auto& k : results.tensor.missing)
        err << "warning: missing pair (" << k.dataset_id << ", " << k.strategy_id << ")\n";
    const auto out_dir = reports_dir(c);
    if (c.subcommand == "evaluate") {
        write_file_atomic(out_dir / "estimates.csv",
                          estimates_csv(compute_estimates(results.tensor, c.confidence)));
        write_file_atomic(out_dir / "losses_long.csv", loss_tensor_csv(results.tensor));
        for (const auto& row : summary_table(results)) out << format_summary_row(row) << "\n";
        return 0;
    }
    if (c.subcommand == "compare") {
        const auto test = parse_test(c.test);
        if (test == TestKind::Friedman) {
            const auto f = friedman_report(results.tensor, c.alpha);
            write_file_atomic(out_dir / "friedman.csv", friedman_csv(f, results.tensor.strategy_ids));
            out << "Friedman F = " << format_fixed(f.friedman.statistic, 4)
                << ", p = " << format_real(f.friedman.p_value) << ", CD = " << format_fixed(f.cd, 4) << "\n";
            return 0;
        }
        const auto pm = all_pairs(results.tensor, test, parse_correction(c.correction),
                                  parse_alternative(c.alternative));
        const std::string name(test_name(test));
        write_file_atomic(out_dir / ("pairwise_" + name + ".csv"), pairwise_wide_csv(pm));
        write_file_atomic(out_dir / ("pairwise_" + name + "_long.csv"), pairwise_long_csv(pm));
        out << pairwise_long_csv(pm);
        return 0;
    }
    if (c.subcommand == "report") {
        ReportOptions opt;
        opt.confidence = c.confidence;
        opt.alpha = c.alpha;
        opt.correction = parse_correction(c.correction);
        opt.alternative = parse_alternative(c.alternative);
        opt.top = c.top;
        const auto manifest = export_all(results, out_dir, opt);
        for (const auto& f : manifest.files) out << f.file << " " << f.digest << "\n";
        for (const auto& n : manifest.notes) err << "note: " << n << "\n";
        return 0;
    }
    throw CLI::ValidationError("subcommand", "unknown subcommand " + c.subcommand);
}

/// Builds the argument grammar into `app`, binding every option to `c`.
inline void build_app(CLI::App& app, CommandConfig& c) {
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto collection = [&](CLI::App* s) {
        s->add_option("--collection", c.collection_dir, "Collection directory")
            ->envname("BENCH_COLLECTION")
            ->required();
    };
    auto seed = [&](CLI::App* s, const char* what) { s->add_option("--seed", c.seed, what); };
    const CLI::Validator loss_validator(
        [](std::string& v) -> std::string {
            if (v == "mmce" || v == "squared" || v == "absolute") return {};
            if (v.starts_with("q:")) {
                auto a = csv::parse_real(std::string_view(v).substr(2));
                if (a && *a > 0.0 && *a < 1.0) return {};
            }
            return "expected mmce, squared, absolute or q:ALPHA with 0 < ALPHA < 1";
        },
        "LOSS");
    const auto alternatives = CLI::IsMember({"two", "less", "greater"});
    const auto corrections = CLI::IsMember({"none", "bonferroni", "holm"});
    auto measure = [&, loss_validator](CLI::App* s) {
        s->add_option("--strategies", c.strategies, "Comma-separated strategy ids, or all");
        s->add_option("--loss", c.loss, "Pointwise loss: mmce|squared|absolute|q:ALPHA")
            ->check(loss_validator);
        s->add_option("--aggregate", c.aggregate,
                      "Aggregate score instead of a pointwise loss")
            ->check(CLI::IsMember({"sens", "spec", "prec", "f1", "rmse"}));
        s->add_flag("--paper-rmse", c.paper_rmse, "Un-normalized RMSE |y - yhat|_2");
        s->add_flag("--pinball-convention", c.pinball_convention,
                    "Report the Q-loss as the non-negative pinball loss");
        s->add_option("--confidence", c.confidence, "Confidence level of the intervals")
            ->check(CLI::Range(0.0, 1.0));
    };

    auto* ingest = app.add_subcommand("ingest", "Ingest a CSV file into the collection");
    collection(ingest);
    ingest->add_option("--csv", c.csv_path, "Input CSV with a header row")->required();
    ingest->add_option("--target", c.target, "Target column")->required();
    ingest->add_option("--id", c.id, "Dataset id (default: file stem)");
    ingest->add_option("--name", c.name, "Dataset name (default: id)");
    ingest->add_option("--source", c.source, "Provenance note (default: CSV path)");
    ingest->add_option("--task", c.task, "Learning task")
        ->check(CLI::IsMember({"classification", "regression"}));
    ingest->add_flag("--one-hot", c.one_hot, "One-hot encode categorical features");

    auto* split = app.add_subcommand("split", "Generate train/test splits for every dataset");
    collection(split);
    seed(split, "Master seed");
    split->add_option("--ratio", c.ratio, "Training fraction")->check(CLI::Range(0.0, 1.0));
    split->add_flag("--force", c.force, "Regenerate existing splits");

    auto* synth = app.add_subcommand("synth", "Write a synthetic Gaussian-blob collection");
    collection(synth);
    seed(synth, "Generator seed");
    synth->add_option("--datasets", c.n_datasets, "Number of datasets");
    synth->add_option("--points", c.n_points, "Points per dataset");
    synth->add_option("--features", c.n_features, "Features per dataset");
    synth->add_option("--classes", c.n_classes, "Classes per dataset");
    synth->add_option("--separation", c.separation, "Distance scale between class centres");

    auto* run_cmd = app.add_subcommand("run", "Train every strategy on every dataset (resumable)");
    collection(run_cmd);
    seed(run_cmd, "Master seed for splits, tuning and fitting");
    run_cmd->add_option("--ratio", c.ratio, "Training fraction for generated splits")
        ->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--strategies", c.strategies, "Comma-separated strategy ids, or all");
    run_cmd->add_option("--parallelism", c.parallelism, "Concurrent jobs")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--paper-standardize", c.paper_standardize,
                      "Standardize each full dataset before splitting");
    run_cmd->add_option("--grids", c.grids, "JSON file overriding tuning grids per strategy");
    run_cmd->add_option("--folds", c.folds, "Cross-validation folds for tuning");
    run_cmd->add_flag("--no-timing", c.no_timing, "Record training time as 0 for reproducible records");
    run_cmd->add_option("--max-jobs", c.max_jobs, "Stop after this many jobs (0: no limit)");

    auto* evaluate = app.add_subcommand("evaluate", "Write estimates with confidence intervals");
    collection(evaluate);
    measure(evaluate);
    evaluate->add_option("--out", c.out_dir, "Output directory (default: <collection>/reports)");

    auto* compare = app.add_subcommand("compare", "Run a comparison test across strategies");
    collection(compare);
    measure(compare);
    compare->add_option("--test", c.test, "Comparison test")
        ->check(CLI::IsMember({"t", "wilcoxon", "sign", "friedman"}));
    compare->add_option("--alternative", c.alternative, "Alternative hypothesis")->check(alternatives);
    compare->add_option("--correction", c.correction, "Multiple-testing correction")->check(corrections);
    compare->add_option("--alpha", c.alpha, "Significance level for the critical difference");
    compare->add_option("--out", c.out_dir, "Output directory (default: <collection>/reports)");

    auto* report = app.add_subcommand("report", "Export all tables and the CD diagram");
    collection(report);
    measure(report);
    report->add_option("--alternative", c.alternative, "Alternative hypothesis")->check(alternatives);
    report->add_option("--correction", c.correction, "Multiple-testing correction")->check(corrections);
    report->add_option("--alpha", c.alpha, "Significance level for the critical difference");
    report->add_option("--top", c.top, "Show only the N best strategies in the CD diagram (0: all)");
    report->add_option("--out", c.out_dir, "Output directory (default: <collection>/reports)");

    auto* status = app.add_subcommand("resume-status", "Show checkpoint progress");
    collection(status);

    for (auto* s : app.get_subcommands({})) {
        s->callback([&c, s] { c.subcommand = s->get_name(); });
    }
}

/// Entry point. Exit codes: 0 success, 1 usage error, 2 runtime error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CommandConfig config;
    CLI::App app{"Benchmark orchestration and statistical evaluation of classifiers", "bench"};
    build_app(app, config);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }
    try {
        return execute(config, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace bench::cli

#endif // BENCH_CLI_CLI_HPP
