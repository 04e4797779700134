#ifndef BENCH_REPORT_REPORT_HPP
#define BENCH_REPORT_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "../comparison/comparison.hpp"
#include "../datastore/checkpoint.hpp"
#include "../estimation/estimation.hpp"
#include "../io.hpp"
#include "../metrics/metrics.hpp"
#include "cd_diagram.hpp"

namespace bench {

/// Everything the reports are computed from.
struct BenchmarkResults {
    LossTensor tensor;
    std::map<JobKey, double> training_times;
};

struct ReportOptions {
    double confidence = 0.95;
    double alpha = 0.05;
    Correction correction = Correction::Holm;
    Alternative alternative = Alternative::TwoSided;
    std::size_t top = 0;
};

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

/// Per-dataset performance used for summaries: accuracy (1 - mean MMCE) for the
/// misclassification loss, the tensor value otherwise.
inline double performance(const LossTensor& t, double value) {
    if (auto* l = std::get_if<LossSpec>(&t.kind.spec); l && l->loss == Loss::MMCE) return 1.0 - value;
    return value;
}

/// Datasets on which every strategy has a defined value.
inline std::vector<std::string> complete_datasets(const LossTensor& t) {
    std::vector<std::string> out;
    for (const auto& d : t.dataset_ids) {
        bool ok = true;
        for (const auto& s : t.strategy_ids) {
            auto v = t.value(d, s);
            ok = ok && v && !std::isnan(*v);
        }
        if (ok) out.push_back(d);
    }
    return out;
}

/// Rank matrix over the complete datasets (rows) and all strategies (columns).
inline RankSummary rank_summary(const LossTensor& t) {
    const auto rows = complete_datasets(t);
    Matrix values(rows.size(), t.strategy_ids.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < t.strategy_ids.size(); ++k)
            values(i, k) = *t.value(rows[i], t.strategy_ids[k]);
    auto s = rank_matrix(values, t.kind.direction());
    if (s.d >= 2) return average_ranks(std::move(s));
    s.avg_ranks.assign(s.k, nan_value);
    s.avg_rank_se.assign(s.k, nan_value);
    for (std::size_t k = 0; k < s.k && s.d == 1; ++k) s.avg_ranks[k] = s.rank_matrix(0, k);
    return s;
}

// ---------------------------------------------------------------------------
// Summary table

struct SummaryRow {
    std::string strategy_id;
    double avg_rank = 0.0;
    double avg_score = 0.0;
    double std_error = 0.0;
    double avg_training_time = 0.0;
};

inline std::vector<SummaryRow> summary_table(const BenchmarkResults& r) {
    const auto& t = r.tensor;
    const auto ranks = rank_summary(t);
    std::vector<SummaryRow> rows;
    for (std::size_t k = 0; k < t.strategy_ids.size(); ++k) {
        const auto& s = t.strategy_ids[k];
        SummaryRow row;
        row.strategy_id = s;
        row.avg_rank = ranks.avg_ranks.empty() ? nan_value : ranks.avg_ranks[k];
        std::vector<double> perf;
        double time_sum = 0.0;
        std::size_t time_n = 0;
        for (const auto& d : t.dataset_ids) {
            if (auto v = t.value(d, s); v && !std::isnan(*v)) perf.push_back(performance(t, *v));
            if (auto it = r.training_times.find({d, s}); it != r.training_times.end()) {
                time_sum += it->second;
                ++time_n;
            }
        }
        if (perf.size() >= 2) {
            const auto e = epsilon_star(perf);
            row.avg_score = e.point;
            row.std_error = e.std_error;
        } else {
            row.avg_score = perf.empty() ? nan_value : perf.front();
            row.std_error = nan_value;
        }
        row.avg_training_time = time_n ? time_sum / static_cast<double>(time_n) : nan_value;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.avg_rank != b.avg_rank) return a.avg_rank < b.avg_rank;
        return a.strategy_id < b.strategy_id;
    });
    return rows;
}

/// One line in the style `Name, 4.3, 0.831, 0.013, 14.277`.
inline std::string format_summary_row(const SummaryRow& r) {
    return r.strategy_id + ", " + format_fixed(r.avg_rank, 1) + ", " + format_fixed(r.avg_score, 3) +
           ", " + format_fixed(r.std_error, 3) + ", " + format_fixed(r.avg_training_time, 3);
}

inline std::string summary_markdown(const std::vector<SummaryRow>& rows) {
    std::string s = "| strategy | avg_rank | avg_score | std_error | avg training time (in sec) |\n";
    s += "|---|---:|---:|---:|---:|\n";
    for (const auto& r : rows)
        s += "| " + r.strategy_id + " | " + format_fixed(r.avg_rank, 1) + " | " +
             format_fixed(r.avg_score, 3) + " | " + format_fixed(r.std_error, 3) + " | " +
             format_fixed(r.avg_training_time, 3) + " |\n";
    return s;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string s = "strategy_id,avg_rank,avg_score,std_error,avg_training_time\n";
    for (const auto& r : rows)
        s += csv::quote(r.strategy_id) + "," + format_real(r.avg_rank) + "," + format_real(r.avg_score) +
             "," + format_real(r.std_error) + "," + format_real(r.avg_training_time) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Estimates

struct EstimateRow {
    std::string strategy_id;
    std::string dataset_id;  // empty unless scenario a.1
    std::string quantity;    // "expected_loss", "aggregate_score" or "average_rank"
    EstimateWithCI estimate;
};

inline std::vector<EstimateRow> compute_estimates(const LossTensor& t, double confidence) {
    std::vector<EstimateRow> rows;
    const bool aggregate = t.kind.is_aggregate();
    for (const auto& s : t.strategy_ids) {
        std::vector<DatasetLossSummary> summaries;
        std::vector<double> per_dataset;
        for (const auto& d : t.dataset_ids) {
            if (!aggregate) {
                auto it = t.per_point.find({d, s});
                if (it == t.per_point.end() || it->second.size() < 2) continue;
                rows.push_back({s, d, "expected_loss", eta_hat_per_dataset(it->second, confidence)});
                summaries.push_back(summarize_losses(it->second));
                per_dataset.push_back(summaries.back().eta_hat);
            } else if (auto v = t.value(d, s); v && !std::isnan(*v)) {
                per_dataset.push_back(*v);
            }
        }
        if (!summaries.empty())
            rows.push_back({s, "", "expected_loss", eta_hat_pooled(summaries, confidence)});
        if (per_dataset.size() >= 2)
            rows.push_back({s, "", aggregate ? "aggregate_score" : "expected_loss",
                            epsilon_star(per_dataset, confidence)});
    }
    const auto ranks = rank_summary(t);
    if (ranks.d >= 2) {
        for (std::size_t k = 0; k < ranks.k; ++k)
            rows.push_back({t.strategy_ids[k], "", "average_rank",
                            with_interval(ranks.avg_ranks[k], ranks.avg_rank_se[k], confidence,
                                          Scenario::C_RetrainedUnseen, {ranks.d})});
    }
    return rows;
}

inline std::string estimates_csv(const std::vector<EstimateRow>& rows) {
    std::string s = "strategy_id,dataset_id,quantity,scenario,point,std_error,ci_lower,ci_upper,confidence\n";
    for (const auto& r : rows) {
        const auto& e = r.estimate;
        s += csv::quote(r.strategy_id) + "," + csv::quote(r.dataset_id) + "," + r.quantity + "," +
             std::string(scenario_name(e.scenario)) + "," + format_real(e.point) + "," +
             format_real(e.std_error) + "," + format_real(e.ci_lower) + "," + format_real(e.ci_upper) +
             "," + format_real(e.confidence) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Pairwise exports

inline std::string_view alternative_name(Alternative a) {
    switch (a) {
    case Alternative::TwoSided: return "two";
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
    }
    return "?";
}

inline std::string_view correction_name(Correction c) {
    switch (c) {
    case Correction::None: return "none";
    case Correction::Bonferroni: return "bonferroni";
    case Correction::Holm: return "holm";
    }
    return "?";
}

/// Wide layout: one row per strategy, a statistic / p_val column pair per
/// opponent. p_val is the corrected p-value when a correction was requested.
inline std::string pairwise_wide_csv(const PairwiseMatrix& pm) {
    std::string s = "strategy";
    for (const auto& id : pm.strategy_ids) s += "," + csv::quote(id + " statistic") + "," + csv::quote(id + " p_val");
    s += "\n";
    for (std::size_t a = 0; a < pm.strategy_ids.size(); ++a) {
        s += csv::quote(pm.strategy_ids[a]);
        for (std::size_t b = 0; b < pm.strategy_ids.size(); ++b) {
            const auto& c = pm.cells[a][b];
            if (a == b) {
                s += ",,";
            } else if (!c.present) {
                s += ",NaN,NaN";
            } else {
                const double p = pm.correction == Correction::None ? c.result.p_value : c.p_adjusted;
                s += "," + format_real(c.result.statistic) + "," + format_real(p);
            }
        }
        s += "\n";
    }
    return s;
}

inline std::string pairwise_long_csv(const PairwiseMatrix& pm) {
    std::string s = "strategy_a,strategy_b,test,alternative,statistic,p_value,p_adjusted,correction,"
                    "effect_raw,effect_normalized,method,n_used,degenerate\n";
    for (std::size_t a = 0; a < pm.strategy_ids.size(); ++a) {
        for (std::size_t b = 0; b < pm.strategy_ids.size(); ++b) {
            if (a == b || !pm.cells[a][b].present) continue;
            const auto& c = pm.cells[a][b];
            const auto& r = c.result;
            s += csv::quote(pm.strategy_ids[a]) + "," + csv::quote(pm.strategy_ids[b]) + "," +
                 std::string(test_name(pm.test)) + "," + std::string(alternative_name(pm.alternative)) +
                 "," + format_real(r.statistic) + "," + format_real(r.p_value) + "," +
                 format_real(c.p_adjusted) + "," + std::string(correction_name(pm.correction)) + "," +
                 format_real(r.effect_raw) + "," + format_real(r.effect_normalized) + "," +
                 std::string(method_name(r.method)) + "," + std::to_string(r.n_used) + "," +
                 (r.degenerate ? "true" : "false") + "\n";
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Friedman + Nemenyi

struct FriedmanReport {
    TestResult friedman;
    RankSummary ranks;
    double cd = nan_value;
    double alpha = 0.05;
};

inline FriedmanReport friedman_report(const LossTensor& t, double alpha) {
    FriedmanReport f;
    f.alpha = alpha;
    f.ranks = rank_summary(t);
    f.friedman = friedman_test(f.ranks.rank_matrix);
    f.cd = nemenyi_cd(static_cast<int>(f.ranks.k), f.ranks.d, alpha);
    return f;
}

inline std::string friedman_csv(const FriedmanReport& f, const std::vector<std::string>& ids) {
    std::string s = "statistic,p_value,Q,D,K,alpha,critical_difference,degenerate\n";
    s += format_real(f.friedman.statistic) + "," + format_real(f.friedman.p_value) + "," +
         format_real(f.friedman.effect_raw) + "," + std::to_string(f.ranks.d) + "," +
         std::to_string(f.ranks.k) + "," + format_real(f.alpha) + "," + format_real(f.cd) + "," +
         (f.friedman.degenerate ? "true" : "false") + "\n";
    s += "\nstrategy_a,strategy_b,avg_rank_a,avg_rank_b,rank_difference,significant\n";
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const double diff = f.ranks.avg_ranks[a] - f.ranks.avg_ranks[b];
            s += csv::quote(ids[a]) + "," + csv::quote(ids[b]) + "," + format_real(f.ranks.avg_ranks[a]) +
                 "," + format_real(f.ranks.avg_ranks[b]) + "," + format_real(diff) + "," +
                 (std::fabs(diff) > f.cd ? "true" : "false") + "\n";
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Box-plot statistics

namespace detail {
// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}
} // namespace detail

/// Quartiles and 1.5-IQR whiskers of per-dataset performance, per strategy.
inline std::string boxplot_csv(const LossTensor& t) {
    std::string s = "strategy_id,n,min,q1,median,q3,max,whisker_low,whisker_high,mean\n";
    for (const auto& id : t.strategy_ids) {
        std::vector<double> v;
        for (const auto& d : t.dataset_ids)
            if (auto x = t.value(d, id); x && !std::isnan(*x)) v.push_back(performance(t, *x));
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const double q1 = detail::quantile_sorted(v, 0.25), q3 = detail::quantile_sorted(v, 0.75);
        const double iqr = q3 - q1;
        double wl = v.front(), wh = v.back();
        for (double x : v)
            if (x >= q1 - 1.5 * iqr) { wl = x; break; }
        for (auto it = v.rbegin(); it != v.rend(); ++it)
            if (*it <= q3 + 1.5 * iqr) { wh = *it; break; }
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        s += csv::quote(id) + "," + std::to_string(v.size()) + "," + format_real(v.front()) + "," +
             format_real(q1) + "," + format_real(detail::quantile_sorted(v, 0.5)) + "," + format_real(q3) +
             "," + format_real(v.back()) + "," + format_real(wl) + "," + format_real(wh) + "," +
             format_real(mean) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Export

struct ManifestEntry {
    std::string file;
    std::string digest;
};

struct Manifest {
    std::vector<ManifestEntry> files;
    std::vector<std::string> notes;
};

/// Writes every report into `out_dir` and a manifest.json listing them with digests.
inline Manifest export_all(const BenchmarkResults& r, const fs::path& out_dir,
                           const ReportOptions& opt = {}) {
    Manifest m;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file_atomic(out_dir / name, content);
        m.files.push_back({name, digest_of(content)});
    };
    const auto& t = r.tensor;
    const auto rows = summary_table(r);
    emit("estimates.csv", estimates_csv(compute_estimates(t, opt.confidence)));
    emit("losses_long.csv", loss_tensor_csv(t));
    emit("summary.md", summary_markdown(rows));
    emit("summary.csv", summary_csv(rows));
    emit("boxplot.csv", boxplot_csv(t));

    const auto ranks = rank_summary(t);
    if (t.strategy_ids.size() < 2) {
        m.notes.push_back("pairwise comparisons omitted: fewer than 2 strategies");
        m.notes.push_back("critical-difference diagram omitted: fewer than 2 strategies");
    } else {
        for (auto test : {TestKind::PairedT, TestKind::WilcoxonSignedRank, TestKind::SignTest}) {
            const auto pm = all_pairs(t, test, opt.correction, opt.alternative);
            const std::string name(test_name(test));
            emit("pairwise_" + name + ".csv", pairwise_wide_csv(pm));
            emit("pairwise_" + name + "_long.csv", pairwise_long_csv(pm));
        }
        if (ranks.d >= 2 && ranks.k <= 20) {
            const auto f = friedman_report(t, opt.alpha);
            emit("friedman.csv", friedman_csv(f, t.strategy_ids));
            emit("cd_diagram.svg", cd_diagram_svg(f.ranks.avg_ranks, t.strategy_ids, f.cd, opt.top));
        } else {
            m.notes.push_back("Friedman test and critical-difference diagram omitted: need D >= 2 complete datasets and K <= 20");
        }
    }
    for (const auto& w : t.warnings) m.notes.push_back(w);
    for (const auto& k : t.missing)
        m.notes.push_back("missing pair (" + k.dataset_id + ", " + k.strategy_id + ")");

    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["measure"] = t.kind.name();
    auto files = nlohmann::ordered_json::array();
    for (const auto& f : m.files) files.push_back({{"file", f.file}, {"digest", f.digest}});
    j["files"] = std::move(files);
    j["notes"] = m.notes;
    write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
    return m;
}

} // namespace bench

#endif // BENCH_REPORT_REPORT_HPP
