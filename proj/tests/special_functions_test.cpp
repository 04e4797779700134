#include <random>

#include <gtest/gtest.h>

#include <bench/error.hpp>
#include <bench/special_functions.hpp>

#include "oracles.hpp"

namespace sf = bench::special;

TEST(NormalQuantile, Median) { EXPECT_EQ(sf::normal_quantile(0.5), 0.0); }

TEST(NormalQuantile, UpperTwoAndAHalfPercent) {
    EXPECT_NEAR(sf::normal_quantile(0.975), 1.959964, 1e-6);
    EXPECT_NEAR(sf::normal_quantile(0.975), oracle::normal_quantile(0.975), 1e-9);
}

TEST(NormalQuantile, MatchesSeriesOracleAcrossRange) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> expo(-10.0, 0.0);
    for (int i = 0; i < 200; ++i) {
        double p = std::pow(10.0, expo(gen));
        if (i % 2) p = 1.0 - p;
        if (p <= 1e-10 || p >= 1.0 - 1e-10) continue;
        EXPECT_NEAR(sf::normal_quantile(p), oracle::normal_quantile(p), 1e-9) << "p=" << p;
    }
    EXPECT_NEAR(sf::normal_quantile(1e-10), oracle::normal_quantile(1e-10), 1e-9);
}

TEST(NormalQuantile, DomainError) {
    for (double p : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
        try {
            sf::normal_quantile(p);
            FAIL() << p;
        } catch (const bench::Error& e) {
            EXPECT_EQ(e.code(), bench::Errc::DomainError);
        }
    }
}

TEST(NormalQuantile, InvertsCdf) {
    for (double x = -6.0; x <= 6.0; x += 0.25)
        EXPECT_NEAR(sf::normal_quantile(sf::normal_cdf(x)), x, 1e-8 * std::max(1.0, std::fabs(x)));
}

TEST(TSurvival, ZeroIsHalf) {
    for (double df : {1.0, 2.0, 3.0, 10.0, 100.0}) EXPECT_DOUBLE_EQ(sf::t_survival(0.0, df), 0.5);
}

TEST(TSurvival, MatchesIncompleteBetaOracleOnGrid) {
    int cases = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double t = -4.0 + 0.9 * i;
            const double df = 1.0 + 3.0 * j;
            const double expected = oracle::t_survival(t, df);
            EXPECT_NEAR(sf::t_survival(t, df), expected, 1e-9 * expected) << t << " " << df;
            ++cases;
        }
    }
    EXPECT_EQ(cases, 100);
}

TEST(TSurvival, CdfComplement) {
    for (double t : {-2.5, -0.3, 0.7, 3.1}) EXPECT_NEAR(sf::t_cdf(t, 7) + sf::t_survival(t, 7), 1.0, 1e-14);
}

TEST(FSurvival, MatchesOracle) {
    for (double f : {0.1, 0.5, 1.0, 2.0, 3.857142857, 10.0})
        for (double d1 : {1.0, 2.0, 3.0})
            for (double d2 : {3.0, 6.0, 57.0})
                EXPECT_NEAR(sf::f_survival(f, d1, d2), oracle::f_survival(f, d1, d2), 1e-10);
    EXPECT_EQ(sf::f_survival(0.0, 2, 6), 1.0);
}

TEST(IncompleteBeta, Endpoints) {
    EXPECT_EQ(sf::incomplete_beta(2.0, 3.0, 0.0), 0.0);
    EXPECT_EQ(sf::incomplete_beta(2.0, 3.0, 1.0), 1.0);
    // I_x(1,1) = x
    EXPECT_NEAR(sf::incomplete_beta(1.0, 1.0, 0.3), 0.3, 1e-15);
}

TEST(StudentizedRange, KTwoIsNormalQuantileTimesSqrtTwo) {
    EXPECT_NEAR(sf::nemenyi_q(0.05, 2), sf::normal_quantile(0.975), 1e-9);
    EXPECT_NEAR(sf::nemenyi_q(0.10, 2), sf::normal_quantile(0.95), 1e-9);
    EXPECT_NEAR(sf::studentized_range_q(0.05, 2), sf::normal_quantile(0.975) * std::sqrt(2.0), 1e-9);
}

TEST(StudentizedRange, TableMatchesQuadratureToThreeDecimals) {
    for (double alpha : {0.05, 0.10})
        for (int k = 2; k <= 20; ++k)
            EXPECT_NEAR(sf::studentized_range_q(alpha, k), oracle::studentized_range_q(alpha, k), 5e-4)
                << "alpha=" << alpha << " k=" << k;
}

TEST(StudentizedRange, UnsupportedArguments) {
    EXPECT_THROW(sf::nemenyi_q(0.05, 1), bench::Error);
    EXPECT_THROW(sf::nemenyi_q(0.05, 21), bench::Error);
    try {
        sf::nemenyi_q(0.01, 5);
        FAIL();
    } catch (const bench::Error& e) {
        EXPECT_EQ(e.code(), bench::Errc::UnsupportedAlpha);
    }
    try {
        sf::nemenyi_q(0.05, 25);
        FAIL();
    } catch (const bench::Error& e) {
        EXPECT_EQ(e.code(), bench::Errc::UnsupportedK);
    }
}
