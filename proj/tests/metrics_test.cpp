#include <random>

#include <gtest/gtest.h>

#include <bench/metrics/metrics.hpp>

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

// One dataset "d" with the given labels and every row in the test set.
EvaluationInputs single_dataset(const Vec& labels) {
    EvaluationInputs in;
    Dataset ds;
    ds.id = "d";
    ds.labels = labels;
    ds.features = Matrix(labels.size(), 1);
    in.datasets["d"] = ds;
    SplitSpec s;
    s.dataset_id = "d";
    for (std::size_t i = 0; i < labels.size(); ++i) s.test_indices.push_back(i);
    in.splits["d"] = s;
    return in;
}

PredictionRecord record(const std::string& d, const std::string& s, Vec predicted) {
    PredictionRecord r;
    r.dataset_id = d;
    r.strategy_id = s;
    r.predicted_labels = std::move(predicted);
    return r;
}

} // namespace

TEST(PointwiseLoss, Mmce) {
    EXPECT_EQ(pointwise_loss({Loss::MMCE}, Vec{0, 1, 1, 0}, Vec{0, 1, 0, 0}), (Vec{0, 0, 1, 0}));
}

TEST(PointwiseLoss, SquaredIdentityAndAbsolute) {
    EXPECT_EQ(pointwise_loss({Loss::Squared}, Vec{1.5, -2, 3}, Vec{1.5, -2, 3}), (Vec{0, 0, 0}));
    EXPECT_EQ(pointwise_loss({Loss::Squared}, Vec{1, 2}, Vec{3, 2}), (Vec{4, 0}));
    EXPECT_EQ(pointwise_loss({Loss::Absolute}, Vec{1, 2}, Vec{3, 2.5}), (Vec{2, 0.5}));
}

TEST(PointwiseLoss, QuantileAsPrinted) {
    EXPECT_EQ(pointwise_loss({Loss::Quantile, 0.5}, Vec{3}, Vec{1}), (Vec{-1}));
    LossSpec pinball{Loss::Quantile, 0.5, true};
    EXPECT_EQ(pointwise_loss(pinball, Vec{3}, Vec{1}), (Vec{1}));
    // alpha weights the over-prediction side: 0.2*min(3-1,0) + 0.8*min(1-3,0)
    EXPECT_NEAR(pointwise_loss({Loss::Quantile, 0.2}, Vec{3}, Vec{1})[0], -1.6, 1e-15);
}

TEST(PointwiseLoss, Errors) {
    EXPECT_EQ(code_of([] { pointwise_loss({Loss::MMCE}, Vec{0, 1}, Vec{0}); }), Errc::LengthMismatch);
    EXPECT_EQ(code_of([] { pointwise_loss({Loss::Quantile, 1.0}, Vec{0}, Vec{0}); }), Errc::InvalidAlpha);
    EXPECT_EQ(code_of([] { pointwise_loss({Loss::Quantile, 0.0}, Vec{0}, Vec{0}); }), Errc::InvalidAlpha);
}

TEST(AggregateScore, ContingencyExample) {
    const Vec y{1, 1, 0, 0}, yhat{1, 0, 1, 0};
    for (auto s : {Score::Sensitivity, Score::Specificity, Score::Precision, Score::F1})
        EXPECT_DOUBLE_EQ(aggregate_score({s}, yhat, y), 0.5);
}

TEST(AggregateScore, PerfectPrediction) {
    const Vec y{1, 0, 1};
    for (auto s : {Score::Sensitivity, Score::Precision, Score::F1}) EXPECT_EQ(aggregate_score({s}, y, y), 1.0);
    EXPECT_EQ(aggregate_score({Score::RMSE}, y, y), 0.0);
}

TEST(AggregateScore, UndefinedIsNan) {
    EXPECT_TRUE(std::isnan(aggregate_score({Score::Sensitivity}, Vec{1, 0}, Vec{0, 0})));
    EXPECT_TRUE(std::isnan(aggregate_score({Score::Precision}, Vec{0, 0}, Vec{1, 0})));
}

TEST(AggregateScore, Rmse) {
    const Vec y{0, 0, 0, 0}, yhat{1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(aggregate_score({Score::RMSE}, yhat, y), 1.0);
    EXPECT_DOUBLE_EQ(aggregate_score({Score::RMSE, true}, yhat, y), 2.0);
}

TEST(AggregateScore, MulticlassRejected) {
    EXPECT_EQ(code_of([] { aggregate_score({Score::F1}, Vec{0, 2}, Vec{0, 1}); }), Errc::InvalidLabels);
}

TEST(MeasureTest, DirectionsAndNames) {
    EXPECT_EQ(Measure{}.direction(), Direction::LowerIsBetter);
    EXPECT_EQ(Measure{ScoreSpec{Score::F1}}.direction(), Direction::HigherIsBetter);
    EXPECT_EQ(Measure{ScoreSpec{Score::RMSE}}.direction(), Direction::LowerIsBetter);
    EXPECT_EQ((Measure{LossSpec{Loss::Quantile, 0.3}}.direction()), Direction::HigherIsBetter);
    EXPECT_EQ((Measure{LossSpec{Loss::Quantile, 0.3, true}}.direction()), Direction::LowerIsBetter);
    EXPECT_EQ((Measure{LossSpec{Loss::Quantile, 0.25}}.name()), "q:0.25");
    EXPECT_EQ(Measure{ScoreSpec{Score::Sensitivity}}.name(), "sens");
}

TEST(BuildLossTensor, OneErrorInThree) {
    auto in = single_dataset({0, 1, 1});
    in.records[{"d", "s"}] = record("d", "s", {0, 0, 1});
    const auto t = build_loss_tensor(in, Measure{}, {"d"}, {"s"});
    EXPECT_EQ(t.per_point.at({"d", "s"}), (Vec{0, 1, 0}));
    EXPECT_NEAR(*t.value("d", "s"), 1.0 / 3.0, 1e-15);
}

TEST(BuildLossTensor, ZeroErrors) {
    auto in = single_dataset({0, 1, 1});
    in.records[{"d", "s"}] = record("d", "s", {0, 1, 1});
    EXPECT_EQ(*build_loss_tensor(in, Measure{}, {"d"}, {"s"}).value("d", "s"), 0.0);
}

TEST(BuildLossTensor, MissingPairNamed) {
    auto in = single_dataset({0, 1, 1});
    in.records[{"d", "s"}] = record("d", "s", {0, 1, 1});
    try {
        build_loss_tensor(in, Measure{}, {"d"}, {"s", "other"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingPair);
        EXPECT_NE(std::string(e.what()).find("(d, other)"), std::string::npos);
    }
    const auto t = build_loss_tensor(in, Measure{}, {"d"}, {"s", "other"}, {{"d", "other"}});
    ASSERT_EQ(t.missing.size(), 1u);
    EXPECT_FALSE(t.value("d", "other").has_value());
}

TEST(BuildLossTensor, AggregateWarnsOnUndefined) {
    auto in = single_dataset({0, 0, 0});
    in.records[{"d", "s"}] = record("d", "s", {0, 1, 0});
    const auto t = build_loss_tensor(in, Measure{ScoreSpec{Score::Sensitivity}}, {"d"}, {"s"});
    EXPECT_TRUE(std::isnan(*t.value("d", "s")));
    EXPECT_EQ(t.warnings.size(), 1u);
}

TEST(BuildLossTensor, LongCsv) {
    auto in = single_dataset({0, 1});
    in.records[{"d", "s"}] = record("d", "s", {0, 0});
    const auto csv = loss_tensor_csv(build_loss_tensor(in, Measure{}, {"d"}, {"s"}));
    EXPECT_EQ(csv, "dataset_id,strategy_id,point_index,value\nd,s,0,0\nd,s,1,1\nd,s,,0.5\n");
}

// --- properties -------------------------------------------------------------

namespace {
Vec random_binary(std::mt19937_64& g, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    Vec v(n);
    for (auto& x : v) x = b(g);
    return v;
}
} // namespace

TEST(MetricsProperties, LossesNonNegativeExceptPrintedQ) {
    std::mt19937_64 g(1);
    std::normal_distribution<double> n(0, 3);
    for (int rep = 0; rep < 200; ++rep) {
        Vec a(10), b(10);
        for (auto& x : a) x = n(g);
        for (auto& x : b) x = n(g);
        for (auto l : {Loss::MMCE, Loss::Squared, Loss::Absolute})
            for (double v : pointwise_loss({l}, a, b)) EXPECT_GE(v, 0.0);
        const double alpha = 0.05 + 0.9 * (rep % 10) / 10.0;
        for (double v : pointwise_loss({Loss::Quantile, alpha}, a, b)) EXPECT_LE(v, 0.0);
        for (double v : pointwise_loss({Loss::Quantile, alpha, true}, a, b)) EXPECT_GE(v, 0.0);
    }
}

TEST(MetricsProperties, MmceMeanIsOneMinusAccuracy) {
    std::mt19937_64 g(2);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t m = 1 + rep % 37;
        const auto y = random_binary(g, m), yhat = random_binary(g, m);
        auto in = single_dataset(y);
        in.records[{"d", "s"}] = record("d", "s", yhat);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < m; ++i) correct += y[i] == yhat[i];
        const double accuracy = static_cast<double>(correct) / static_cast<double>(m);
        EXPECT_DOUBLE_EQ(*build_loss_tensor(in, Measure{}, {"d"}, {"s"}).value("d", "s"), 1.0 - accuracy);
    }
}

TEST(MetricsProperties, SensitivitySpecificityDuality) {
    std::mt19937_64 g(3);
    for (int rep = 0; rep < 200; ++rep) {
        const auto y = random_binary(g, 12), yhat = random_binary(g, 12);
        Vec fy(12), fyhat(12);
        for (int i = 0; i < 12; ++i) {
            fy[i] = 1 - y[i];
            fyhat[i] = 1 - yhat[i];
        }
        const double sens = aggregate_score({Score::Sensitivity}, yhat, y);
        const double spec = aggregate_score({Score::Specificity}, fyhat, fy);
        if (std::isnan(sens)) EXPECT_TRUE(std::isnan(spec));
        else EXPECT_DOUBLE_EQ(sens, spec);
    }
}

TEST(MetricsProperties, F1IsHarmonicMean) {
    std::mt19937_64 g(4);
    int checked = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const auto y = random_binary(g, 15), yhat = random_binary(g, 15);
        const double p = aggregate_score({Score::Precision}, yhat, y);
        const double r = aggregate_score({Score::Sensitivity}, yhat, y);
        if (std::isnan(p) || std::isnan(r) || p + r == 0) continue;
        EXPECT_NEAR(aggregate_score({Score::F1}, yhat, y), 2 * p * r / (p + r), 1e-12);
        ++checked;
    }
    EXPECT_GE(checked, 100);
}

TEST(MetricsProperties, AggregateIsMeanOfPerPoint) {
    std::mt19937_64 g(5);
    std::normal_distribution<double> n(0, 1);
    for (int rep = 0; rep < 100; ++rep) {
        Vec y(20), yhat(20);
        for (auto& x : y) x = n(g);
        for (auto& x : yhat) x = n(g);
        auto in = single_dataset(y);
        in.records[{"d", "s"}] = record("d", "s", yhat);
        const auto t = build_loss_tensor(in, Measure{LossSpec{Loss::Squared}}, {"d"}, {"s"});
        const auto& pp = t.per_point.at({"d", "s"});
        EXPECT_EQ(pp.size(), 20u);
        double s = 0;
        for (double v : pp) s += v;
        EXPECT_NEAR(*t.value("d", "s"), s / 20, 1e-12);
    }
}
