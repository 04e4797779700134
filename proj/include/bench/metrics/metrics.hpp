#ifndef BENCH_METRICS_METRICS_HPP
#define BENCH_METRICS_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "../datastore/checkpoint.hpp"
#include "../datastore/dataset.hpp"
#include "../datastore/prediction_record.hpp"
#include "../datastore/split.hpp"
#include "../error.hpp"
#include "../io.hpp"

namespace bench {

enum class Loss { MMCE, Squared, Absolute, Quantile };

struct LossSpec {
    Loss loss = Loss::MMCE;
    double alpha = 0.5;              // Quantile only
    bool pinball_convention = false; // negate the printed Q-loss into the usual pinball loss
};

enum class Score { Sensitivity, Specificity, Precision, F1, RMSE };

struct ScoreSpec {
    Score score = Score::F1;
    bool paper_rmse = false;  // un-normalized |y - yhat|_2
};

enum class Direction { LowerIsBetter, HigherIsBetter };

/// What a LossTensor holds: a pointwise loss averaged per dataset, or an
/// aggregate score computed on the whole test set.
struct Measure {
    std::variant<LossSpec, ScoreSpec> spec = LossSpec{};

    bool is_aggregate() const { return std::holds_alternative<ScoreSpec>(spec); }

    Direction direction() const {
        if (auto* s = std::get_if<ScoreSpec>(&spec); s && s->score != Score::RMSE)
            return Direction::HigherIsBetter;
        if (auto* l = std::get_if<LossSpec>(&spec); l && l->loss == Loss::Quantile && !l->pinball_convention)
            return Direction::HigherIsBetter;  // printed Q-loss is non-positive; 0 is best
        return Direction::LowerIsBetter;
    }

    std::string name() const {
        if (auto* l = std::get_if<LossSpec>(&spec)) {
            switch (l->loss) {
            case Loss::MMCE: return "mmce";
            case Loss::Squared: return "squared";
            case Loss::Absolute: return "absolute";
            case Loss::Quantile: return "q:" + format_real(l->alpha);
            }
        }
        switch (std::get<ScoreSpec>(spec).score) {
        case Score::Sensitivity: return "sens";
        case Score::Specificity: return "spec";
        case Score::Precision: return "prec";
        case Score::F1: return "f1";
        case Score::RMSE: return "rmse";
        }
        return "unknown";
    }
};

namespace detail {
inline void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, std::to_string(a.size()) + " predictions for " +
                                              std::to_string(b.size()) + " observations");
    if (a.empty()) throw Error(Errc::LengthMismatch, "empty prediction vector");
}
} // namespace detail

/// Per-point losses L(yhat_j, y_j).
inline std::vector<double> pointwise_loss(const LossSpec& spec, std::span<const double> predicted,
                                          std::span<const double> actual) {
    detail::check_lengths(predicted, actual);
    if (spec.loss == Loss::Quantile && !(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw Error(Errc::InvalidAlpha, "Q-loss alpha must lie in (0,1)");
    std::vector<double> out(predicted.size());
    auto m = [](double x, double z) { return std::min(x - z, 0.0); };
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double yhat = predicted[i], y = actual[i];
        switch (spec.loss) {
        case Loss::MMCE: out[i] = y == yhat ? 0.0 : 1.0; break;
        case Loss::Squared: out[i] = (y - yhat) * (y - yhat); break;
        case Loss::Absolute: out[i] = std::fabs(y - yhat); break;
        case Loss::Quantile: {
            const double q = spec.alpha * m(yhat, y) + (1.0 - spec.alpha) * m(y, yhat);
            out[i] = spec.pinball_convention ? -q : q;
            break;
        }
        }
    }
    return out;
}

/// Test-set level score. Undefined ratios (zero denominators) yield NaN.
inline double aggregate_score(const ScoreSpec& spec, std::span<const double> predicted,
                              std::span<const double> actual) {
    detail::check_lengths(predicted, actual);
    const auto m = static_cast<double>(actual.size());
    if (spec.score == Score::RMSE) {
        double ss = 0.0;
        for (std::size_t i = 0; i < actual.size(); ++i)
            ss += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        return spec.paper_rmse ? std::sqrt(ss) : std::sqrt(ss / m);
    }
    auto binary = [](double v) { return v == 0.0 || v == 1.0; };
    if (!std::all_of(actual.begin(), actual.end(), binary) ||
        !std::all_of(predicted.begin(), predicted.end(), binary))
        throw Error(Errc::InvalidLabels, "binary scores need 0/1 labels");

    double yy = 0.0, nn = 0.0, y1 = 0.0, yhat1 = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        yy += actual[i] * predicted[i];
        nn += (1.0 - actual[i]) * (1.0 - predicted[i]);
        y1 += actual[i];
        yhat1 += predicted[i];
    }
    auto ratio = [](double num, double den) {
        return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
    };
    switch (spec.score) {
    case Score::Sensitivity: return ratio(yy, y1);
    case Score::Specificity: return ratio(nn, m - y1);
    case Score::Precision: return ratio(yy, yhat1);
    case Score::F1: return ratio(2.0 * yy, yhat1 + y1);
    case Score::RMSE: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct LossTensor {
    Measure kind;
    std::vector<std::string> dataset_ids;
    std::vector<std::string> strategy_ids;
    std::map<JobKey, std::vector<double>> per_point;  // average kind only
    std::map<JobKey, double> aggregate;
    std::vector<JobKey> missing;        // pairs absent from the tensor
    std::vector<std::string> warnings;  // e.g. undefined aggregate scores

    std::optional<double> value(const std::string& dataset, const std::string& strategy) const {
        auto it = aggregate.find({dataset, strategy});
        if (it == aggregate.end()) return std::nullopt;
        return it->second;
    }
};

struct EvaluationInputs {
    std::map<std::string, Dataset> datasets;
    std::map<std::string, SplitSpec> splits;
    std::map<JobKey, PredictionRecord> records;
};

/// Assemble per-point losses and per-dataset aggregates for every
/// (dataset, strategy) pair. Pairs without a record raise MissingPair unless
/// listed in `tolerated_missing`, in which case they are recorded in `missing`.
inline LossTensor build_loss_tensor(const EvaluationInputs& in, const Measure& kind,
                                    std::vector<std::string> dataset_ids,
                                    std::vector<std::string> strategy_ids,
                                    const std::set<JobKey>& tolerated_missing = {}) {
    LossTensor t;
    t.kind = kind;
    t.dataset_ids = std::move(dataset_ids);
    t.strategy_ids = std::move(strategy_ids);
    std::vector<std::string> absent;
    for (const auto& d : t.dataset_ids) {
        for (const auto& s : t.strategy_ids) {
            const JobKey key{d, s};
            auto rec = in.records.find(key);
            if (rec == in.records.end()) {
                if (tolerated_missing.contains(key)) {
                    t.missing.push_back(key);
                } else {
                    absent.push_back("(" + d + ", " + s + ")");
                }
                continue;
            }
            const auto& ds = in.datasets.at(d);
            const auto& split = in.splits.at(d);
            const auto actual = select(std::span<const double>(ds.labels),
                                       std::span<const std::size_t>(split.test_indices));
            const auto& predicted = rec->second.predicted_labels;
            if (predicted.size() != actual.size())
                throw Error(Errc::LengthMismatch, "record (" + d + ", " + s + ") has " +
                                                      std::to_string(predicted.size()) +
                                                      " predictions for " +
                                                      std::to_string(actual.size()) + " test rows");
            if (auto* loss = std::get_if<LossSpec>(&kind.spec)) {
                auto values = pointwise_loss(*loss, predicted, actual);
                t.aggregate[key] = std::accumulate(values.begin(), values.end(), 0.0) /
                                   static_cast<double>(values.size());
                t.per_point[key] = std::move(values);
            } else {
                const double v = aggregate_score(std::get<ScoreSpec>(kind.spec), predicted, actual);
                if (std::isnan(v))
                    t.warnings.push_back("undefined " + kind.name() + " for (" + d + ", " + s + ")");
                t.aggregate[key] = v;
            }
        }
    }
    if (!absent.empty()) {
        std::string list;
        for (const auto& a : absent) list += (list.empty() ? "" : ", ") + a;
        throw Error(Errc::MissingPair, "no prediction record for " + list);
    }
    return t;
}

/// Long format: dataset_id,strategy_id,point_index,value (point_index empty for aggregates).
inline std::string loss_tensor_csv(const LossTensor& t) {
    std::string out = "dataset_id,strategy_id,point_index,value\n";
    for (const auto& d : t.dataset_ids) {
        for (const auto& s : t.strategy_ids) {
            const JobKey key{d, s};
            if (auto it = t.per_point.find(key); it != t.per_point.end()) {
                for (std::size_t j = 0; j < it->second.size(); ++j)
                    out += csv::quote(d) + "," + csv::quote(s) + "," + std::to_string(j) + "," +
                           format_real(it->second[j]) + "\n";
            }
            if (auto it = t.aggregate.find(key); it != t.aggregate.end())
                out += csv::quote(d) + "," + csv::quote(s) + ",," + format_real(it->second) + "\n";
        }
    }
    return out;
}

} // namespace bench

#endif // BENCH_METRICS_METRICS_HPP
