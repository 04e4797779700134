#ifndef BENCH_COMPARISON_COMPARISON_HPP
#define BENCH_COMPARISON_COMPARISON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "../datastore/matrix.hpp"
#include "../error.hpp"
#include "../estimation/estimation.hpp"
#include "../metrics/metrics.hpp"
#include "../special_functions.hpp"

namespace bench {

enum class TestKind { PairedT, WilcoxonSignedRank, SignTest, Friedman };
enum class Alternative { TwoSided, Less, Greater };
enum class Method { Exact, NormalApprox, FDistribution, Binomial, Trinomial, TDistribution };
enum class Correction { None, Bonferroni, Holm };

inline std::string_view test_name(TestKind t) {
    switch (t) {
    case TestKind::PairedT: return "t";
    case TestKind::WilcoxonSignedRank: return "wilcoxon";
    case TestKind::SignTest: return "sign";
    case TestKind::Friedman: return "friedman";
    }
    return "?";
}

inline std::string_view method_name(Method m) {
    switch (m) {
    case Method::Exact: return "exact";
    case Method::NormalApprox: return "normal_approx";
    case Method::FDistribution: return "f_distribution";
    case Method::Binomial: return "binomial";
    case Method::Trinomial: return "trinomial";
    case Method::TDistribution: return "t_distribution";
    }
    return "?";
}

struct TestResult {
    TestKind test = TestKind::PairedT;
    double statistic = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
    double effect_raw = 0.0;
    double effect_normalized = 0.0;
    Method method = Method::Exact;
    std::size_t n_used = 0;
    // Zero-variance, all-zero, all-tie or perfect-consistency input; p follows
    // the documented degenerate rule.
    bool degenerate = false;
    std::size_t zeros_dropped = 0;  // Wilcoxon only
};

namespace detail {

inline double tail_p(double p_lower, double p_upper, Alternative alt) {
    switch (alt) {
    case Alternative::Less: return std::clamp(p_lower, 0.0, 1.0);
    case Alternative::Greater: return std::clamp(p_upper, 0.0, 1.0);
    case Alternative::TwoSided: return std::clamp(2.0 * std::min(p_lower, p_upper), 0.0, 1.0);
    }
    return 1.0;
}

// log C(n, k)
inline double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// P(X <= x) and P(X >= x) for X ~ Binomial(n, 1/2).
inline std::pair<double, double> binomial_half_tails(std::size_t n, std::size_t x) {
    std::vector<double> pmf(n + 1);
    if (n <= 60) {
        // Exact integer Pascal row, scaled by 2^-n.
        std::vector<std::uint64_t> row{1};
        for (std::size_t i = 1; i <= n; ++i) {
            std::vector<std::uint64_t> next(i + 1, 1);
            for (std::size_t j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
            row = std::move(next);
        }
        for (std::size_t k = 0; k <= n; ++k)
            pmf[k] = std::ldexp(static_cast<double>(row[k]), -static_cast<int>(n));
    } else {
        for (std::size_t k = 0; k <= n; ++k)
            pmf[k] = std::exp(log_choose(n, k) - static_cast<double>(n) * std::numbers::ln2);
    }
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k <= x; ++k) lower += pmf[k];
    for (std::size_t k = x; k <= n; ++k) upper += pmf[k];
    return {lower, upper};
}

// P(N <= z) and P(N >= z) where N = (#plus - #minus) over n trials with
// P(plus) = P(minus) = (1 - p0) / 2 and P(tie) = p0.
inline std::pair<double, double> trinomial_tails(std::size_t n, long long z, double p0) {
    const double pd = 0.5 * (1.0 - p0);
    const long long nn = static_cast<long long>(n);
    std::vector<double> pmf(2 * n + 1, 0.0);  // index d + n
    const double lpd = std::log(pd), lp0 = p0 > 0.0 ? std::log(p0) : -INFINITY;
    for (long long plus = 0; plus <= nn; ++plus) {
        for (long long minus = 0; plus + minus <= nn; ++minus) {
            const long long ties = nn - plus - minus;
            if (ties > 0 && p0 <= 0.0) continue;
            const double lp = std::lgamma(nn + 1.0) - std::lgamma(plus + 1.0) -
                              std::lgamma(minus + 1.0) - std::lgamma(ties + 1.0) +
                              static_cast<double>(plus + minus) * lpd +
                              (ties > 0 ? static_cast<double>(ties) * lp0 : 0.0);
            pmf[static_cast<std::size_t>(plus - minus + nn)] += std::exp(lp);
        }
    }
    double lower = 0.0, upper = 0.0;
    for (long long d = -nn; d <= nn; ++d) {
        const double p = pmf[static_cast<std::size_t>(d + nn)];
        if (d <= z) lower += p;
        if (d >= z) upper += p;
    }
    return {lower, upper};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Paired differences

struct PairedDifferences {
    std::vector<std::string> dataset_ids;  // common datasets, tensor order
    std::vector<double> values;            // value_k - value_k'
};

/// Differences of per-dataset values (mean losses or aggregate scores) of two
/// strategies over the datasets where both have a defined value.
inline PairedDifferences paired_differences(const LossTensor& t, const std::string& k,
                                            const std::string& k_prime) {
    PairedDifferences out;
    for (const auto& d : t.dataset_ids) {
        auto a = t.value(d, k), b = t.value(d, k_prime);
        if (!a || !b || std::isnan(*a) || std::isnan(*b)) continue;
        out.dataset_ids.push_back(d);
        out.values.push_back(*a - *b);
    }
    if (out.values.size() < 2)
        throw Error(Errc::InsufficientOverlap, k + " and " + k_prime + " share " +
                                                   std::to_string(out.values.size()) + " dataset(s)");
    return out;
}

// ---------------------------------------------------------------------------
// Tests on differences

/// Paired t-test: t = sqrt(D) * mean / sd; effect sizes mean (raw) and Cohen's d.
inline TestResult paired_t_test(std::span<const double> delta, Alternative alt = Alternative::TwoSided) {
    const std::size_t d = delta.size();
    if (d < 2) throw Error(Errc::TooFewDatasets, "paired t-test needs D >= 2");
    TestResult r;
    r.test = TestKind::PairedT;
    r.alternative = alt;
    r.method = Method::TDistribution;
    r.n_used = d;
    const double mean = std::accumulate(delta.begin(), delta.end(), 0.0) / static_cast<double>(d);
    double ss = 0.0;
    for (double x : delta) ss += (x - mean) * (x - mean);
    const double v = ss / static_cast<double>(d - 1);
    r.effect_raw = mean;
    if (!(v > 0.0)) {
        r.degenerate = true;
        if (mean == 0.0) {
            r.statistic = 0.0;
            r.effect_normalized = 0.0;
            r.p_value = 1.0;
        } else {
            const double inf = mean > 0 ? INFINITY : -INFINITY;
            r.statistic = inf;
            r.effect_normalized = inf;
            r.p_value = detail::tail_p(mean < 0 ? 0.0 : 1.0, mean > 0 ? 0.0 : 1.0, alt);
        }
        return r;
    }
    r.effect_normalized = mean / std::sqrt(v);
    r.statistic = std::sqrt(static_cast<double>(d)) * r.effect_normalized;
    const double df = static_cast<double>(d - 1);
    r.p_value = detail::tail_p(special::t_cdf(r.statistic, df), special::t_survival(r.statistic, df), alt);
    return r;
}

/// Null distribution of W+ (sum of ranks 1..n carrying a positive sign):
/// counts[s] = number of the 2^n sign patterns with W+ = s.
inline std::vector<double> signed_rank_counts(std::size_t n) {
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
        reach += rank;
        for (std::size_t s = reach; s >= rank; --s) counts[s] += counts[s - rank];
    }
    return counts;
}

inline constexpr std::size_t wilcoxon_exact_limit = 20;

/// Wilcoxon signed-rank test on paired differences. Zero differences are dropped.
/// statistic W = sum of signed ranks, effect_raw w = W / D, effect_normalized
/// rho = 2w / (D + 1). Exact null distribution for D <= 20 without tied |delta|,
/// otherwise normal approximation with tie and continuity correction.
/// Normal approximation to P(W+ <= w) and P(W+ >= w) with continuity correction;
/// `tie_term` is sum(t^3 - t) over tie groups of |delta|. nullopt when the
/// variance vanishes.
inline std::optional<std::pair<double, double>> wilcoxon_normal_tails(double w_plus, std::size_t n,
                                                                      double tie_term = 0.0) {
    const auto nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (!(var > 0.0)) return std::nullopt;
    const double sd = std::sqrt(var);
    return std::pair{special::normal_cdf((w_plus - mu + 0.5) / sd),
                     special::normal_survival((w_plus - mu - 0.5) / sd)};
}

inline TestResult wilcoxon_signed_rank(std::span<const double> delta,
                                       Alternative alt = Alternative::TwoSided) {
    if (delta.size() < 2) throw Error(Errc::TooFewDatasets, "Wilcoxon test needs D >= 2");
    TestResult r;
    r.test = TestKind::WilcoxonSignedRank;
    r.alternative = alt;
    std::vector<double> nz;
    for (double x : delta)
        if (x != 0.0) nz.push_back(x);
    r.zeros_dropped = delta.size() - nz.size();
    const std::size_t n = nz.size();
    r.n_used = n;
    if (n == 0) {
        r.degenerate = true;
        r.method = Method::Exact;
        r.p_value = 1.0;
        return r;
    }
    std::vector<double> abs_values(n);
    std::transform(nz.begin(), nz.end(), abs_values.begin(), [](double x) { return std::fabs(x); });
    const auto ranks = rank_row(abs_values, Direction::LowerIsBetter);

    double w_signed = 0.0, w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w_signed += nz[i] > 0 ? ranks[i] : -ranks[i];
        if (nz[i] > 0) w_plus += ranks[i];
    }
    r.statistic = w_signed;
    r.effect_raw = w_signed / static_cast<double>(n);
    r.effect_normalized = 2.0 * r.effect_raw / static_cast<double>(n + 1);

    // Tie groups in |delta|.
    std::vector<double> sorted = abs_values;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<double>(j - i);
        if (j - i > 1) ties = true;
        tie_term += t * t * t - t;
        i = j;
    }

    if (n <= wilcoxon_exact_limit && !ties) {
        r.method = Method::Exact;
        const auto counts = signed_rank_counts(n);
        const auto obs = static_cast<std::size_t>(std::llround(w_plus));
        double lower = 0.0, upper = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (s <= obs) lower += counts[s];
            if (s >= obs) upper += counts[s];
        }
        const double total = std::ldexp(1.0, static_cast<int>(n));
        r.p_value = detail::tail_p(lower / total, upper / total, alt);
        return r;
    }
    r.method = Method::NormalApprox;
    const auto tails = wilcoxon_normal_tails(w_plus, n, tie_term);
    if (!tails) {
        r.degenerate = true;
        r.p_value = 1.0;
        return r;
    }
    r.p_value = detail::tail_p(tails->first, tails->second, alt);
    return r;
}

/// Sign test on the ranks of two strategies over D datasets.
/// S_i = sgn(R_k,i - R_k',i), so a negative S favours strategy k (lower rank is
/// better). effect_raw = S = sum S_i, effect_normalized z = sqrt(D) S / sqrt(D^2 - S^2)
/// (NaN when |S| = D), statistic = (D + S) / (2D). Exact binomial p-value
/// without ties, exact trinomial otherwise.
inline TestResult sign_test(std::span<const double> ranks_k, std::span<const double> ranks_k_prime,
                            Alternative alt = Alternative::TwoSided) {
    if (ranks_k.size() != ranks_k_prime.size())
        throw Error(Errc::LengthMismatch, "rank vectors differ in length");
    const std::size_t d = ranks_k.size();
    if (d < 1) throw Error(Errc::TooFewDatasets, "sign test needs D >= 1");
    std::size_t plus = 0, minus = 0;
    for (std::size_t i = 0; i < d; ++i) {
        if (ranks_k[i] > ranks_k_prime[i]) ++plus;
        else if (ranks_k[i] < ranks_k_prime[i]) ++minus;
    }
    const std::size_t ties = d - plus - minus;
    TestResult r;
    r.test = TestKind::SignTest;
    r.alternative = alt;
    r.n_used = d;
    const auto dd = static_cast<double>(d);
    const double s = static_cast<double>(plus) - static_cast<double>(minus);
    r.effect_raw = s;
    r.statistic = (dd + s) / (2.0 * dd);
    const double denom = dd * dd - s * s;
    r.effect_normalized = denom > 0.0 ? std::sqrt(dd) * s / std::sqrt(denom)
                                      : std::numeric_limits<double>::quiet_NaN();
    if (!(denom > 0.0)) r.degenerate = true;

    if (ties == d) {
        r.method = Method::Trinomial;
        r.degenerate = true;
        r.p_value = 1.0;
        return r;
    }
    if (ties == 0) {
        r.method = Method::Binomial;
        auto [lower, upper] = detail::binomial_half_tails(d, plus);
        r.p_value = detail::tail_p(lower, upper, alt);
        return r;
    }
    r.method = Method::Trinomial;
    const double p0 = static_cast<double>(ties) / dd;
    const auto z = static_cast<long long>(plus) - static_cast<long long>(minus);
    if (alt == Alternative::TwoSided) {
        auto [lower, upper] = detail::trinomial_tails(d, std::llabs(z), p0);
        (void)lower;
        r.p_value = std::min(1.0, 2.0 * upper);
    } else {
        auto [lower, upper] = detail::trinomial_tails(d, z, p0);
        r.p_value = detail::tail_p(lower, upper, alt);
    }
    return r;
}

/// Friedman test on a D x K rank matrix: effect_raw Q, statistic (and normalized
/// effect) F = (D-1) Q / (D(K-1) - Q), p from F(K-1, (K-1)(D-1)).
inline TestResult friedman_test(const Matrix& ranks) {
    const std::size_t d = ranks.rows(), k = ranks.cols();
    if (d < 2 || k < 2) throw Error(Errc::TooFewDatasets, "Friedman test needs D >= 2 and K >= 2");
    TestResult r;
    r.test = TestKind::Friedman;
    r.alternative = Alternative::Greater;
    r.method = Method::FDistribution;
    r.n_used = d;
    const auto dd = static_cast<double>(d), kk = static_cast<double>(k);
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < d; ++i) mean += ranks(i, c);
        mean /= dd;
        sum_sq += (mean - (kk + 1.0) / 2.0) * (mean - (kk + 1.0) / 2.0);
    }
    const double q = 12.0 * dd / (kk * (kk + 1.0)) * sum_sq;
    r.effect_raw = q;
    const double denom = dd * (kk - 1.0) - q;
    // Q reaches D(K-1) only for identical rankings on every dataset; allow for rounding.
    if (denom <= 1e-12 * dd * (kk - 1.0)) {
        r.degenerate = true;
        r.statistic = r.effect_normalized = INFINITY;
        r.p_value = 0.0;
        return r;
    }
    r.statistic = r.effect_normalized = (dd - 1.0) * q / denom;
    r.p_value = special::f_survival(r.statistic, kk - 1.0, (kk - 1.0) * (dd - 1.0));
    return r;
}

// ---------------------------------------------------------------------------
// Multiple testing

inline std::vector<double> correct_pvalues(std::span<const double> p, Correction method) {
    for (double x : p)
        if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::DomainError, "p-values must lie in [0,1]");
    std::vector<double> out(p.begin(), p.end());
    const auto m = static_cast<double>(p.size());
    if (method == Correction::Bonferroni) {
        for (auto& x : out) x = std::min(1.0, m * x);
    } else if (method == Correction::Holm) {
        std::vector<std::size_t> order(p.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
        double running = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            running = std::max(running, (m - static_cast<double>(j)) * p[order[j]]);
            out[order[j]] = std::min(1.0, running);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// All pairs

struct PairwiseCell {
    bool present = false;  // false on the diagonal and for pairs without overlap
    TestResult result;
    double p_adjusted = std::numeric_limits<double>::quiet_NaN();
};

struct PairwiseMatrix {
    TestKind test = TestKind::PairedT;
    Alternative alternative = Alternative::TwoSided;
    Correction correction = Correction::None;
    std::vector<std::string> strategy_ids;
    std::vector<std::vector<PairwiseCell>> cells;  // cells[row][col]: row strategy vs col strategy
};

/// Runs `test` on every ordered pair (k, k') of strategies; cell (k, k') tests
/// value_k - value_k'. The correction family is the K(K-1)/2 unordered pairs for
/// two-sided tests and all K(K-1) ordered pairs for one-sided tests. Pairs
/// without enough common datasets stay absent and outside the family.
inline PairwiseMatrix all_pairs(const LossTensor& t, TestKind test, Correction correction,
                                Alternative alt = Alternative::TwoSided) {
    if (test == TestKind::Friedman)
        throw Error(Errc::DomainError, "Friedman is an omnibus test, not a pairwise one");
    const auto& ids = t.strategy_ids;
    const std::size_t k = ids.size();
    if (k < 2) throw Error(Errc::EmptyInput, "pairwise comparison needs at least 2 strategies");
    PairwiseMatrix pm;
    pm.test = test;
    pm.alternative = alt;
    pm.correction = correction;
    pm.strategy_ids = ids;
    pm.cells.assign(k, std::vector<PairwiseCell>(k));
    const Direction direction = t.kind.direction();

    auto run = [&](std::size_t a, std::size_t b) -> std::optional<TestResult> {
        PairedDifferences diff;
        try {
            diff = paired_differences(t, ids[a], ids[b]);
        } catch (const Error& e) {
            if (e.code() == Errc::InsufficientOverlap) return std::nullopt;
            throw;
        }
        switch (test) {
        case TestKind::PairedT: return paired_t_test(diff.values, alt);
        case TestKind::WilcoxonSignedRank: return wilcoxon_signed_rank(diff.values, alt);
        case TestKind::SignTest: {
            // Within-pair ranks: sgn(R_k - R_k') follows from the value difference.
            std::vector<double> ra, rb;
            for (double v : diff.values) {
                const double better_a = direction == Direction::LowerIsBetter ? -v : v;
                ra.push_back(better_a > 0 ? 1.0 : better_a < 0 ? 2.0 : 1.5);
                rb.push_back(3.0 - ra.back());
            }
            return sign_test(ra, rb, alt);
        }
        case TestKind::Friedman: break;
        }
        return std::nullopt;
    };

    std::vector<std::pair<std::size_t, std::size_t>> family;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            auto ab = run(a, b);
            if (!ab) continue;
            pm.cells[a][b] = {true, *ab};
            auto ba = alt == Alternative::TwoSided ? std::nullopt : run(b, a);
            if (ba) {
                pm.cells[b][a] = {true, *ba};
            } else {
                TestResult mirror = *ab;
                mirror.statistic = test == TestKind::SignTest ? 1.0 - ab->statistic : -ab->statistic;
                mirror.effect_raw = -ab->effect_raw;
                mirror.effect_normalized = -ab->effect_normalized;
                pm.cells[b][a] = {true, mirror};
            }
            family.emplace_back(a, b);
            if (alt != Alternative::TwoSided) family.emplace_back(b, a);
        }
    }
    std::vector<double> raw;
    for (auto [a, b] : family) raw.push_back(pm.cells[a][b].result.p_value);
    const auto adjusted = correct_pvalues(raw, correction);
    for (std::size_t i = 0; i < family.size(); ++i) {
        auto [a, b] = family[i];
        pm.cells[a][b].p_adjusted = adjusted[i];
        if (alt == Alternative::TwoSided) pm.cells[b][a].p_adjusted = adjusted[i];
    }
    return pm;
}

} // namespace bench

#endif // BENCH_COMPARISON_COMPARISON_HPP
