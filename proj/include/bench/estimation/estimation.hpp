#ifndef BENCH_ESTIMATION_ESTIMATION_HPP
#define BENCH_ESTIMATION_ESTIMATION_HPP

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "../datastore/matrix.hpp"
#include "../error.hpp"
#include "../metrics/metrics.hpp"
#include "../special_functions.hpp"

namespace bench {

/// Which future-data situation an estimate's interval speaks to.
enum class Scenario {
    A1_ReusedSeen,          // fitted model reused on the dataset it was tested on
    A2_ReusedSeenAveraged,  // the same, averaged over the collection
    C_RetrainedUnseen,      // strategy retrained on a new, unseen dataset
};

inline std::string_view scenario_name(Scenario s) {
    switch (s) {
    case Scenario::A1_ReusedSeen: return "a.1";
    case Scenario::A2_ReusedSeenAveraged: return "a.2";
    case Scenario::C_RetrainedUnseen: return "c";
    }
    return "?";
}

struct EstimateWithCI {
    double point = 0.0;
    double std_error = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double confidence = 0.95;
    Scenario scenario = Scenario::A1_ReusedSeen;
    // Sizes governing the normal approximation: {M_i}, {D, M_1..M_D} or {D}.
    std::vector<std::size_t> n_basis;
};

/// Two-sided normal interval point +/- z_{1-alpha/2} * se, alpha = 1 - confidence.
inline EstimateWithCI with_interval(double point, double se, double confidence, Scenario scenario,
                                    std::vector<std::size_t> n_basis) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw Error(Errc::DomainError, "confidence must lie in (0,1)");
    const double z = special::normal_quantile((1.0 - confidence) / 2.0);  // negative
    return {point, se, point + z * se, point - z * se, confidence, scenario, std::move(n_basis)};
}

namespace detail {
// Shifted by the first value so constant input yields that value exactly.
inline double mean(std::span<const double> v) {
    const double shift = v.front();
    double s = 0.0;
    for (double x : v) s += x - shift;
    return shift + s / static_cast<double>(v.size());
}
inline double sample_variance(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}
} // namespace detail

/// Per-dataset expected loss of a fitted model: mean of the test-point losses,
/// SE = sqrt(v / M) with v the sample variance.
inline EstimateWithCI eta_hat_per_dataset(std::span<const double> losses, double confidence = 0.95) {
    if (losses.size() < 2)
        throw Error(Errc::TooFewPoints, "need at least 2 test points, got " + std::to_string(losses.size()));
    const double m = detail::mean(losses);
    const double v = detail::sample_variance(losses, m);
    return with_interval(m, std::sqrt(v / static_cast<double>(losses.size())), confidence,
                         Scenario::A1_ReusedSeen, {losses.size()});
}

/// Per-dataset inputs of the pooled estimate.
struct DatasetLossSummary {
    double eta_hat = 0.0;
    double variance = 0.0;  // v_hat, sample variance of the losses
    std::size_t m = 0;      // test points
};

inline DatasetLossSummary summarize_losses(std::span<const double> losses) {
    if (losses.size() < 2)
        throw Error(Errc::TooFewPoints, "need at least 2 test points, got " + std::to_string(losses.size()));
    const double m = detail::mean(losses);
    return {m, detail::sample_variance(losses, m), losses.size()};
}

/// Collection average of per-dataset expected losses; SE = (1/D) sqrt(sum v_i / M_i).
inline EstimateWithCI eta_hat_pooled(std::span<const DatasetLossSummary> per_dataset,
                                     double confidence = 0.95) {
    if (per_dataset.empty()) throw Error(Errc::EmptyInput, "no datasets");
    const auto d = static_cast<double>(per_dataset.size());
    double sum_eta = 0.0, sum_var = 0.0;
    std::vector<std::size_t> basis{per_dataset.size()};
    for (const auto& s : per_dataset) {
        if (s.m < 2) throw Error(Errc::TooFewPoints, "each dataset needs at least 2 test points");
        sum_eta += s.eta_hat;
        sum_var += s.variance / static_cast<double>(s.m);
        basis.push_back(s.m);
    }
    return with_interval(sum_eta / d, std::sqrt(sum_var) / d, confidence,
                         Scenario::A2_ReusedSeenAveraged, std::move(basis));
}

/// Generalization to an unseen dataset: mean over datasets with the
/// between-dataset SE sqrt(w / D). Accepts per-dataset mean losses or
/// per-dataset aggregate scores alike.
inline EstimateWithCI epsilon_star(std::span<const double> per_dataset_values,
                                   double confidence = 0.95) {
    if (per_dataset_values.size() < 2)
        throw Error(Errc::TooFewDatasets, "need at least 2 datasets, got " +
                                              std::to_string(per_dataset_values.size()));
    const double m = detail::mean(per_dataset_values);
    const double w = detail::sample_variance(per_dataset_values, m);
    return with_interval(m, std::sqrt(w / static_cast<double>(per_dataset_values.size())),
                         confidence, Scenario::C_RetrainedUnseen, {per_dataset_values.size()});
}

// ---------------------------------------------------------------------------
// Ranks

struct RankSummary {
    Matrix rank_matrix;                // D x K, rank 1 = best, ties averaged
    std::vector<double> avg_ranks;     // empty until average_ranks()
    std::vector<double> avg_rank_se;
    std::size_t d = 0;
    std::size_t k = 0;
};

/// Ranks of one row (1 = best); tied values share the mean of their ranks.
inline std::vector<double> rank_row(std::span<const double> values, Direction direction) {
    const std::size_t k = values.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
        return direction == Direction::LowerIsBetter ? values[a] < values[b] : values[a] > values[b];
    };
    std::stable_sort(order.begin(), order.end(), better);
    std::vector<double> ranks(k);
    for (std::size_t i = 0; i < k;) {
        std::size_t j = i + 1;
        while (j < k && values[order[j]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
        i = j;
    }
    return ranks;
}

inline RankSummary rank_matrix(const Matrix& values, Direction direction) {
    RankSummary s;
    s.d = values.rows();
    s.k = values.cols();
    s.rank_matrix = Matrix(s.d, s.k);
    for (std::size_t i = 0; i < s.d; ++i) {
        const auto row = values.row(i);
        if (std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); }))
            throw Error(Errc::MissingEntry, "row " + std::to_string(i) + " has a missing value");
        const auto r = rank_row(row, direction);
        std::copy(r.begin(), r.end(), s.rank_matrix.row(i).begin());
    }
    return s;
}

/// Average rank per strategy with SE sqrt(nu / D), nu the sample variance of
/// that strategy's ranks over datasets.
inline RankSummary average_ranks(RankSummary s) {
    if (s.d < 2) throw Error(Errc::TooFewDatasets, "average ranks need at least 2 datasets");
    s.avg_ranks.assign(s.k, 0.0);
    s.avg_rank_se.assign(s.k, 0.0);
    for (std::size_t c = 0; c < s.k; ++c) {
        std::vector<double> col(s.d);
        for (std::size_t i = 0; i < s.d; ++i) col[i] = s.rank_matrix(i, c);
        const double m = detail::mean(col);
        s.avg_ranks[c] = m;
        s.avg_rank_se[c] = std::sqrt(detail::sample_variance(col, m) / static_cast<double>(s.d));
    }
    return s;
}

/// Nemenyi critical difference q_alpha(K) * sqrt(K(K+1) / (6D)).
inline double nemenyi_cd(int k, std::size_t d, double alpha = 0.05) {
    if (d < 2) throw Error(Errc::TooFewDatasets, "critical difference needs D >= 2");
    const double q = special::nemenyi_q(alpha, k);
    return q * std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * static_cast<double>(d)));
}

} // namespace bench

#endif // BENCH_ESTIMATION_ESTIMATION_HPP
