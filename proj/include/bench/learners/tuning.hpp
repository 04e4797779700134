#ifndef BENCH_LEARNERS_TUNING_HPP
#define BENCH_LEARNERS_TUNING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "../datastore/matrix.hpp"
#include "../error.hpp"
#include "../random.hpp"
#include "hyperparameters.hpp"
#include "models.hpp"

namespace bench {

/// Cartesian product of the grid. Names iterate in sorted order with the first
/// name outermost; candidates keep their declared order. An empty grid yields
/// one empty assignment.
inline std::vector<Hyperparameters> expand_grid(const Grid& grid) {
    std::vector<Hyperparameters> points{Hyperparameters{}};
    for (const auto& [name, values] : grid) {
        if (values.empty())
            throw Error(Errc::InvalidHyperparameter, "no candidates for '" + name + "'");
        std::vector<Hyperparameters> next;
        next.reserve(points.size() * values.size());
        for (const auto& p : points) {
            for (double v : values) {
                auto q = p;
                q[name] = v;
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

/// Validation blocks of a seeded shuffle, cut into `folds` contiguous near-equal
/// parts (the first n % folds parts get one extra element).
inline std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, std::size_t folds,
                                                      std::uint64_t seed) {
    if (folds < 2) throw Error(Errc::InvalidHyperparameter, "need at least 2 folds");
    if (n < folds)
        throw Error(Errc::TooFewSamples, std::to_string(n) + " samples for " +
                                             std::to_string(folds) + " folds");
    const auto perm = seeded_permutation(n, seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
        out[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                      perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return out;
}

inline double accuracy(std::span<const double> predicted, std::span<const double> actual) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

/// Exhaustive grid search scored by mean validation accuracy over `folds` folds.
/// The fold assignment is shared by every grid point. The first grid point with
/// the highest score wins.
inline TuningReport tune(const StrategyDescriptor& strategy, const Grid& grid,
                         const Matrix& features, std::span<const double> labels,
                         std::size_t folds, std::uint64_t seed, const FitOptions& options = {}) {
    if (features.rows() != labels.size())
        throw Error(Errc::LengthMismatch, "features and labels disagree in length");
    const auto blocks = cv_folds(labels.size(), folds, seed);
    const auto points = expand_grid(grid);

    struct FoldData {
        Matrix train_x, valid_x;
        std::vector<double> train_y, valid_y;
        std::uint64_t seed;
    };
    std::vector<FoldData> fold_data;
    for (std::size_t f = 0; f < blocks.size(); ++f) {
        std::vector<char> in_valid(labels.size(), 0);
        for (auto i : blocks[f]) in_valid[i] = 1;
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!in_valid[i]) train_idx.push_back(i);
        fold_data.push_back({features.select_rows(train_idx), features.select_rows(blocks[f]),
                             select(labels, std::span<const std::size_t>(train_idx)),
                             select(labels, std::span<const std::size_t>(blocks[f])),
                             derive_seed(seed, "fold", std::to_string(f))});
    }

    TuningReport report;
    report.cv_seed = seed;
    double best = -1.0;
    for (const auto& point : points) {
        double total = 0.0;
        for (const auto& fd : fold_data) {
            const auto model = fit(strategy, point, fd.train_x, fd.train_y, fd.seed, options);
            total += accuracy(predict(model, fd.valid_x), fd.valid_y);
        }
        const double score = total / static_cast<double>(fold_data.size());
        report.grid_points.push_back({point, score});
        if (score > best) {
            best = score;
            report.winner = point;
        }
    }
    return report;
}

} // namespace bench

#endif // BENCH_LEARNERS_TUNING_HPP
