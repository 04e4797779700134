#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include <bench/comparison/comparison.hpp>

#include "oracles.hpp"

using namespace bench;

namespace {

using Vec = std::vector<double>;

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::ParseError;
}

// Tensor of per-dataset values; values[s][d], NaN marks an absent pair.
LossTensor tensor(const std::vector<std::string>& strategies, const std::vector<Vec>& values) {
    LossTensor t;
    for (std::size_t d = 0; d < values.front().size(); ++d) t.dataset_ids.push_back("d" + std::to_string(d));
    t.strategy_ids = strategies;
    for (std::size_t s = 0; s < strategies.size(); ++s)
        for (std::size_t d = 0; d < values[s].size(); ++d)
            if (!std::isnan(values[s][d])) t.aggregate[{t.dataset_ids[d], strategies[s]}] = values[s][d];
    return t;
}

Vec untied(std::mt19937_64& g, std::size_t n) {
    std::uniform_real_distribution<double> u(-1, 1);
    Vec v(n);
    for (auto& x : v) x = u(g);
    return v;
}

} // namespace

TEST(PairedDifferences, Examples) {
    const auto t = tensor({"k", "k2"}, {{0.2, 0.3}, {0.1, 0.5}});
    const auto d = paired_differences(t, "k", "k2");
    EXPECT_NEAR(d.values[0], 0.1, 1e-15);
    EXPECT_NEAR(d.values[1], -0.2, 1e-15);
    EXPECT_EQ(paired_differences(t, "k", "k").values, (Vec{0, 0}));
    const auto partial = tensor({"k", "k2"}, {{0.2, 0.3}, {0.1, std::nan("")}});
    EXPECT_EQ(code_of([&] { paired_differences(partial, "k", "k2"); }), Errc::InsufficientOverlap);
}

TEST(PairedT, Example) {
    const auto r = paired_t_test(Vec{0.1, 0.2, 0.3, 0.4});
    EXPECT_NEAR(r.effect_raw, 0.25, 1e-12);
    EXPECT_NEAR(r.effect_normalized, 1.93649167310371, 1e-9);
    EXPECT_NEAR(r.statistic, 3.872983346207417, 1e-9);
    EXPECT_NEAR(r.p_value, 2 * oracle::t_survival(r.statistic, 3), 1e-9);
    EXPECT_NEAR(r.p_value, 0.03047, 1e-5);
    EXPECT_EQ(r.n_used, 4u);
}

TEST(PairedT, Degenerate) {
    const auto zero = paired_t_test(Vec{0, 0, 0});
    EXPECT_EQ(zero.statistic, 0.0);
    EXPECT_EQ(zero.p_value, 1.0);
    EXPECT_TRUE(zero.degenerate);
    const auto constant = paired_t_test(Vec{0.5, 0.5, 0.5});
    EXPECT_EQ(constant.p_value, 0.0);
    EXPECT_TRUE(constant.degenerate);
}

TEST(PairedT, Antisymmetry) {
    const Vec d{0.3, -0.1, 0.25, 0.4, 0.05};
    Vec neg(d.size());
    std::transform(d.begin(), d.end(), neg.begin(), [](double x) { return -x; });
    const auto a = paired_t_test(d), b = paired_t_test(neg);
    EXPECT_DOUBLE_EQ(a.statistic, -b.statistic);
    EXPECT_DOUBLE_EQ(a.p_value, b.p_value);
    EXPECT_NEAR(paired_t_test(d, Alternative::Greater).p_value + paired_t_test(d, Alternative::Less).p_value,
                1.0, 1e-12);
}

TEST(Wilcoxon, Example) {
    const auto r = wilcoxon_signed_rank(Vec{1.0, -0.5, 2.0});
    EXPECT_NEAR(r.effect_raw, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.effect_normalized, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.statistic, 4.0, 1e-12);
    EXPECT_EQ(r.method, Method::Exact);
}

TEST(Wilcoxon, AllPositiveOneSided) {
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(Vec{0.3, 0.1, 0.2}, Alternative::Greater).p_value, 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(Vec{0.3, 0.1, 0.2}).p_value, 1.0 / 4.0);
}

TEST(Wilcoxon, NegationSymmetry) {
    const Vec d{0.4, -0.2, 0.9, 0.1, -0.35};
    const Vec neg{-0.4, 0.2, -0.9, -0.1, 0.35};
    const auto a = wilcoxon_signed_rank(d), b = wilcoxon_signed_rank(neg);
    EXPECT_EQ(a.statistic, -b.statistic);
    EXPECT_EQ(a.p_value, b.p_value);
}

TEST(Wilcoxon, ZerosDroppedAndAllZero) {
    const auto r = wilcoxon_signed_rank(Vec{0, 1.0, 0, -0.5, 2.0});
    EXPECT_EQ(r.zeros_dropped, 2u);
    EXPECT_EQ(r.n_used, 3u);
    EXPECT_NEAR(r.statistic, 4.0, 1e-12);
    const auto z = wilcoxon_signed_rank(Vec{0, 0, 0});
    EXPECT_EQ(z.p_value, 1.0);
    EXPECT_TRUE(z.degenerate);
}

TEST(Wilcoxon, TiesUseNormalApproximation) {
    const auto r = wilcoxon_signed_rank(Vec{1, 1, -1, 2, 3, 3});
    EXPECT_EQ(r.method, Method::NormalApprox);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
}

TEST(SignTest, EightWinsOfTen) {
    // k better (lower rank) on 8 datasets.
    Vec rk, rk2;
    for (int i = 0; i < 10; ++i) {
        rk.push_back(i < 8 ? 1 : 2);
        rk2.push_back(i < 8 ? 2 : 1);
    }
    const auto r = sign_test(rk, rk2);
    EXPECT_EQ(r.effect_raw, -6.0);
    EXPECT_DOUBLE_EQ(r.statistic, 0.2);
    EXPECT_DOUBLE_EQ(r.p_value, 112.0 / 1024.0);
    EXPECT_EQ(r.method, Method::Binomial);
    EXPECT_NEAR(r.effect_normalized, std::sqrt(10.0) * -6.0 / 8.0, 1e-12);
}

TEST(SignTest, BalancedAndExtreme) {
    Vec a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(i % 2 ? 1 : 2);
        b.push_back(i % 2 ? 2 : 1);
    }
    const auto r = sign_test(a, b);
    EXPECT_EQ(r.effect_raw, 0.0);
    EXPECT_EQ(r.effect_normalized, 0.0);
    EXPECT_EQ(r.p_value, 1.0);

    const Vec one(6, 1.0), two(6, 2.0);
    const auto e = sign_test(one, two);
    EXPECT_TRUE(e.degenerate);
    EXPECT_TRUE(std::isnan(e.effect_normalized));
    EXPECT_DOUBLE_EQ(e.p_value, 2.0 * std::ldexp(1.0, -6));
}

TEST(SignTest, AllTies) {
    const Vec a(4, 1.5);
    const auto r = sign_test(a, a);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_TRUE(r.degenerate);
}

TEST(SignTest, TiesUseTrinomial) {
    const Vec a{1, 1, 1, 1.5, 2}, b{2, 2, 2, 1.5, 1};
    const auto r = sign_test(a, b);
    EXPECT_EQ(r.method, Method::Trinomial);
    const auto tails = oracle::trinomial_enumeration(5, 2, 0.2);
    EXPECT_NEAR(r.p_value, std::min(1.0, 2 * tails.upper), 1e-12);
}

TEST(Friedman, Example) {
    const Matrix m(4, 3, Vec{1, 2, 3, 1, 2, 3, 2, 1, 3, 1, 3, 2});
    const auto r = friedman_test(m);
    EXPECT_NEAR(r.effect_raw, 4.5, 1e-12);
    EXPECT_NEAR(r.statistic, 3.0 * 4.5 / 3.5, 1e-12);
    EXPECT_NEAR(r.p_value, oracle::f_survival(r.statistic, 2, 6), 1e-10);
}

TEST(Friedman, PerfectConsistencyAndNull) {
    const Matrix same(3, 3, Vec{1, 2, 3, 1, 2, 3, 1, 2, 3});
    const auto r = friedman_test(same);
    EXPECT_NEAR(r.effect_raw, 6.0, 1e-12);
    EXPECT_TRUE(std::isinf(r.statistic));
    EXPECT_EQ(r.p_value, 0.0);
    EXPECT_TRUE(r.degenerate);

    const Matrix tied(3, 3, 2.0);
    const auto n = friedman_test(tied);
    EXPECT_EQ(n.effect_raw, 0.0);
    EXPECT_EQ(n.statistic, 0.0);
    EXPECT_EQ(n.p_value, 1.0);
}

TEST(CorrectPvalues, Examples) {
    const Vec p{0.01, 0.04};
    const auto bonf = correct_pvalues(p, Correction::Bonferroni);
    EXPECT_DOUBLE_EQ(bonf[0], 0.02);
    EXPECT_DOUBLE_EQ(bonf[1], 0.08);
    const auto holm = correct_pvalues(p, Correction::Holm);
    EXPECT_DOUBLE_EQ(holm[0], 0.02);
    EXPECT_DOUBLE_EQ(holm[1], 0.04);
    const Vec one{0.3};
    EXPECT_EQ(correct_pvalues(one, Correction::Holm), one);
    EXPECT_EQ(correct_pvalues(one, Correction::Bonferroni), one);
    // Unsorted input comes back in input order.
    const auto h = correct_pvalues(Vec{0.04, 0.01, 0.5}, Correction::Holm);
    EXPECT_DOUBLE_EQ(h[0], 0.08);
    EXPECT_DOUBLE_EQ(h[1], 0.03);
    EXPECT_DOUBLE_EQ(h[2], 0.5);
}

TEST(AllPairs, ThreeStrategies) {
    const auto t = tensor({"a", "b", "c"}, {{0.1, 0.2, 0.3, 0.2}, {0.2, 0.25, 0.5, 0.3}, {0.4, 0.1, 0.3, 0.35}});
    const auto pm = all_pairs(t, TestKind::PairedT, Correction::Holm);
    int present = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_FALSE(pm.cells[i][i].present);
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            ++present;
            EXPECT_DOUBLE_EQ(pm.cells[i][j].result.statistic, -pm.cells[j][i].result.statistic);
            EXPECT_DOUBLE_EQ(pm.cells[i][j].result.p_value, pm.cells[j][i].result.p_value);
            EXPECT_GE(pm.cells[i][j].p_adjusted, pm.cells[i][j].result.p_value);
        }
    }
    EXPECT_EQ(present, 6);
}

TEST(AllPairs, IdenticalColumns) {
    const auto t = tensor({"a", "b"}, {{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}});
    for (auto test : {TestKind::PairedT, TestKind::WilcoxonSignedRank, TestKind::SignTest})
        EXPECT_EQ(all_pairs(t, test, Correction::None).cells[0][1].result.p_value, 1.0);
}

TEST(AllPairs, RelabelingPermutesCells) {
    const std::vector<Vec> v{{0.1, 0.2, 0.3, 0.2, 0.6}, {0.2, 0.25, 0.5, 0.3, 0.1}, {0.4, 0.1, 0.3, 0.35, 0.2}};
    const auto pm = all_pairs(tensor({"a", "b", "c"}, v), TestKind::WilcoxonSignedRank, Correction::Holm);
    const auto pr = all_pairs(tensor({"c", "a", "b"}, {v[2], v[0], v[1]}), TestKind::WilcoxonSignedRank,
                              Correction::Holm);
    const std::size_t map[3] = {1, 2, 0};  // index in pm -> index in pr
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            EXPECT_DOUBLE_EQ(pm.cells[i][j].result.p_value, pr.cells[map[i]][map[j]].result.p_value);
            EXPECT_DOUBLE_EQ(pm.cells[i][j].p_adjusted, pr.cells[map[i]][map[j]].p_adjusted);
        }
}

TEST(AllPairs, MissingPairsExcluded) {
    const double nan = std::nan("");
    const auto t = tensor({"a", "b", "c"}, {{0.1, 0.2, 0.3}, {nan, nan, 0.5}, {0.4, 0.1, 0.2}});
    const auto pm = all_pairs(t, TestKind::PairedT, Correction::Bonferroni);
    EXPECT_FALSE(pm.cells[0][1].present);
    EXPECT_TRUE(pm.cells[0][2].present);
    // Family of one: Bonferroni leaves it alone.
    EXPECT_DOUBLE_EQ(pm.cells[0][2].p_adjusted, pm.cells[0][2].result.p_value);
}

// --- properties -------------------------------------------------------------

TEST(ComparisonProperties, ExactWilcoxonMatchesEnumeration) {
    std::mt19937_64 g(21);
    int n = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 2 + rep % 11;  // 2..12
        const auto delta = untied(g, d);
        const auto tails = oracle::wilcoxon_enumeration(delta);
        EXPECT_NEAR(wilcoxon_signed_rank(delta, Alternative::Less).p_value, tails.lower, 1e-12);
        EXPECT_NEAR(wilcoxon_signed_rank(delta, Alternative::Greater).p_value, tails.upper, 1e-12);
        EXPECT_NEAR(wilcoxon_signed_rank(delta).p_value, std::min(1.0, 2 * std::min(tails.lower, tails.upper)),
                    1e-12);
        ++n;
    }
    EXPECT_EQ(n, 200);
}

TEST(ComparisonProperties, ExactAndNormalWilcoxonAgree) {
    std::mt19937_64 g(22);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 15 + rep % 6;
        const auto delta = untied(g, d);
        const auto exact = wilcoxon_signed_rank(delta);
        ASSERT_EQ(exact.method, Method::Exact);
        const double w_plus = (exact.statistic + d * (d + 1) / 2.0) / 2.0;  // W+ from W+ - W-
        const auto tails = wilcoxon_normal_tails(w_plus, d);
        ASSERT_TRUE(tails);
        const double approx = std::min(1.0, 2 * std::min(tails->first, tails->second));
        EXPECT_LT(std::fabs(exact.p_value - approx), 0.01) << "D=" << d << " W+=" << w_plus;
    }
}

TEST(ComparisonProperties, SignTestMatchesBinomialSums) {
    std::mt19937_64 g(23);
    for (int rep = 0; rep < 200; ++rep) {
        const unsigned d = 1 + rep % 30;
        std::bernoulli_distribution b(0.3 + 0.4 * (rep % 3) / 2.0);
        Vec rk(d), rk2(d);
        unsigned plus = 0;
        for (unsigned i = 0; i < d; ++i) {
            const bool worse = b(g);
            rk[i] = worse ? 2 : 1;
            rk2[i] = worse ? 1 : 2;
            plus += worse;
        }
        const auto tails = oracle::binomial_tails(d, plus);
        EXPECT_DOUBLE_EQ(sign_test(rk, rk2, Alternative::Less).p_value, tails.lower);
        EXPECT_DOUBLE_EQ(sign_test(rk, rk2, Alternative::Greater).p_value, tails.upper);
        EXPECT_DOUBLE_EQ(sign_test(rk, rk2).p_value, std::min(1.0, 2 * std::min(tails.lower, tails.upper)));
    }
}

TEST(ComparisonProperties, TrinomialMatchesEnumeration) {
    std::mt19937_64 g(24);
    std::uniform_int_distribution<int> u(0, 2);
    int checked = 0;
    for (int rep = 0; rep < 150; ++rep) {
        const unsigned d = 2 + rep % 9;
        Vec rk(d), rk2(d);
        long z = 0;
        unsigned ties = 0;
        for (unsigned i = 0; i < d; ++i) {
            const int o = u(g);
            rk[i] = o == 0 ? 2 : o == 1 ? 1 : 1.5;
            rk2[i] = 3 - rk[i];
            z += o == 0 ? 1 : o == 1 ? -1 : 0;
            ties += o == 2;
        }
        if (ties == 0 || ties == d) continue;
        const double p0 = static_cast<double>(ties) / d;
        const auto two = oracle::trinomial_enumeration(d, std::labs(z), p0);
        EXPECT_NEAR(sign_test(rk, rk2).p_value, std::min(1.0, 2 * two.upper), 1e-12);
        const auto one = oracle::trinomial_enumeration(d, z, p0);
        EXPECT_NEAR(sign_test(rk, rk2, Alternative::Greater).p_value, one.upper, 1e-12);
        EXPECT_NEAR(sign_test(rk, rk2, Alternative::Less).p_value, one.lower, 1e-12);
        ++checked;
    }
    EXPECT_GE(checked, 100);
}

TEST(ComparisonProperties, HolmBetweenRawAndBonferroni) {
    std::mt19937_64 g(25);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 200; ++rep) {
        Vec p(1 + rep % 12);
        for (auto& x : p) x = std::pow(u(g), 3);
        const auto holm = correct_pvalues(p, Correction::Holm);
        const auto bonf = correct_pvalues(p, Correction::Bonferroni);
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_GE(holm[i], p[i]);
            EXPECT_LE(holm[i], bonf[i]);
            EXPECT_LE(bonf[i], 1.0);
        }
    }
}

TEST(ComparisonProperties, TTestTranslation) {
    std::mt19937_64 g(26);
    std::normal_distribution<double> n(0, 1);
    for (int rep = 0; rep < 200; ++rep) {
        Vec d(3 + rep % 10);
        for (auto& x : d) x = n(g);
        const double c = n(g);
        Vec shifted(d.size());
        std::transform(d.begin(), d.end(), shifted.begin(), [c](double x) { return x + c; });
        const auto a = paired_t_test(d), b = paired_t_test(shifted);
        EXPECT_NEAR(b.effect_raw, a.effect_raw + c, 1e-12);
        // v = (mean / d)^2 recovered from Cohen's d
        const double va = std::pow(a.effect_raw / a.effect_normalized, 2);
        const double vb = std::pow(b.effect_raw / b.effect_normalized, 2);
        EXPECT_NEAR(va, vb, 1e-9 * va);
    }
}

TEST(ComparisonProperties, PValuesInUnitInterval) {
    std::mt19937_64 g(27);
    std::uniform_int_distribution<int> u(1, 4);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 2 + rep % 15, k = 2 + rep % 4;
        Matrix m(d, k);
        for (std::size_t i = 0; i < d; ++i) {
            Vec row(k);
            for (auto& x : row) x = u(g);
            const auto r = rank_row(row, Direction::LowerIsBetter);
            for (std::size_t j = 0; j < k; ++j) m(i, j) = r[j];
        }
        const auto f = friedman_test(m);
        EXPECT_GE(f.p_value, 0.0);
        EXPECT_LE(f.p_value, 1.0);
        Vec a(d), b(d);
        for (std::size_t i = 0; i < d; ++i) {
            a[i] = m(i, 0);
            b[i] = m(i, 1);
        }
        for (auto alt : {Alternative::TwoSided, Alternative::Less, Alternative::Greater}) {
            const auto s = sign_test(a, b, alt);
            EXPECT_GE(s.p_value, 0.0);
            EXPECT_LE(s.p_value, 1.0);
        }
    }
}
