#ifndef BENCH_LEARNERS_MODELS_HPP
#define BENCH_LEARNERS_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../datastore/matrix.hpp"
#include "../error.hpp"
#include "../random.hpp"
#include "hyperparameters.hpp"
#include "registry.hpp"
#include "standardize.hpp"

namespace bench {

struct BaselineModel {
    double modal_class = 0.0;
};

struct GaussianNBModel {
    std::vector<double> classes;
    std::vector<double> log_priors;
    Matrix means;      // classes x features
    Matrix variances;  // smoothed
};

struct BernoulliNBModel {
    std::vector<double> classes;
    std::vector<double> log_priors;
    Matrix log_p;      // log P(x_f = 1 | class)
    Matrix log_not_p;  // log P(x_f = 0 | class)
};

struct KnnModel {
    Matrix train;
    std::vector<double> labels;
    std::size_t k = 5;
    int p = 2;
};

struct PassiveAggressiveModel {
    std::vector<double> classes;
    Matrix weights;  // classes x (features + 1); last column is the bias
    double c = 1.0;
};

using ModelParameters =
    std::variant<BaselineModel, GaussianNBModel, BernoulliNBModel, KnnModel, PassiveAggressiveModel>;

struct FittedModel {
    std::string strategy_id;
    ModelParameters parameters;
    std::optional<StandardizationStats> standardization;
    Hyperparameters chosen_hyperparameters;
    std::size_t n_features = 0;
};

struct FitOptions {
    // Overrides the descriptor's requires_standardization when set.
    std::optional<bool> standardize;
};

// Binarization threshold for BernoulliNB, applied after standardization.
inline constexpr double bernoulli_threshold = 0.0;
inline constexpr double nb_var_smoothing = 1e-9;
inline constexpr double nb_laplace_alpha = 1.0;

namespace detail {

inline std::vector<double> sorted_classes(std::span<const double> labels) {
    std::set<double> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

inline std::size_t class_index(const std::vector<double>& classes, double label) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), label) -
                                    classes.begin());
}

// Index of the largest score; ties go to the lowest index (the smaller class id).
inline std::size_t argmax_first(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

inline double hp_or(const Hyperparameters& h, const std::string& name, double fallback) {
    auto it = h.find(name);
    return it == h.end() ? fallback : it->second;
}

inline void check_known(const Hyperparameters& h, std::initializer_list<std::string_view> known,
                        const std::string& strategy) {
    for (const auto& [name, value] : h) {
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw Error(Errc::InvalidHyperparameter, strategy + " has no hyper-parameter '" + name + "'");
    }
}

inline BaselineModel fit_baseline(std::span<const double> labels) {
    std::map<double, std::size_t> counts;
    for (double y : labels) ++counts[y];
    BaselineModel m;
    std::size_t best = 0;
    for (const auto& [cls, n] : counts) {
        if (n > best) {
            best = n;
            m.modal_class = cls;
        }
    }
    return m;
}

inline std::vector<double> class_log_priors(const std::vector<double>& classes,
                                            std::span<const double> labels,
                                            std::vector<std::size_t>& counts) {
    counts.assign(classes.size(), 0);
    for (double y : labels) ++counts[class_index(classes, y)];
    std::vector<double> out;
    for (auto n : counts)
        out.push_back(std::log(static_cast<double>(n) / static_cast<double>(labels.size())));
    return out;
}

inline GaussianNBModel fit_gaussian_nb(const Matrix& x, std::span<const double> labels) {
    GaussianNBModel m;
    m.classes = sorted_classes(labels);
    std::vector<std::size_t> counts;
    m.log_priors = class_log_priors(m.classes, labels, counts);
    const std::size_t nc = m.classes.size(), nf = x.cols(), n = x.rows();

    double max_var = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += x(r, f);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) var += (x(r, f) - mean) * (x(r, f) - mean);
        max_var = std::max(max_var, var / static_cast<double>(n));
    }
    double epsilon = nb_var_smoothing * max_var;
    if (epsilon <= 0.0) epsilon = nb_var_smoothing;

    m.means = Matrix(nc, nf);
    m.variances = Matrix(nc, nf);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = class_index(m.classes, labels[r]);
        for (std::size_t f = 0; f < nf; ++f) m.means(c, f) += x(r, f);
    }
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t f = 0; f < nf; ++f) m.means(c, f) /= static_cast<double>(counts[c]);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = class_index(m.classes, labels[r]);
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = x(r, f) - m.means(c, f);
            m.variances(c, f) += d * d;
        }
    }
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t f = 0; f < nf; ++f)
            m.variances(c, f) = m.variances(c, f) / static_cast<double>(counts[c]) + epsilon;
    return m;
}

inline BernoulliNBModel fit_bernoulli_nb(const Matrix& x, std::span<const double> labels) {
    BernoulliNBModel m;
    m.classes = sorted_classes(labels);
    std::vector<std::size_t> counts;
    m.log_priors = class_log_priors(m.classes, labels, counts);
    const std::size_t nc = m.classes.size(), nf = x.cols();
    Matrix ones(nc, nf);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto c = class_index(m.classes, labels[r]);
        for (std::size_t f = 0; f < nf; ++f)
            if (x(r, f) > bernoulli_threshold) ones(c, f) += 1.0;
    }
    m.log_p = Matrix(nc, nf);
    m.log_not_p = Matrix(nc, nf);
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t f = 0; f < nf; ++f) {
            const double p = (ones(c, f) + nb_laplace_alpha) /
                             (static_cast<double>(counts[c]) + 2.0 * nb_laplace_alpha);
            m.log_p(c, f) = std::log(p);
            m.log_not_p(c, f) = std::log1p(-p);
        }
    }
    return m;
}

} // namespace detail

inline double hinge_loss(std::span<const double> w, std::span<const double> x, double y) {
    const double margin = y * std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
    return std::max(0.0, 1.0 - margin);
}

/// One PA-I step on (x, y), y in {-1, +1}: tau = min(C, loss / |x|^2), w += tau*y*x.
/// Returns tau.
inline double pa_update(std::span<double> w, std::span<const double> x, double y, double c) {
    const double loss = hinge_loss(w, x, y);
    if (loss <= 0.0) return 0.0;
    const double norm2 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    if (norm2 <= 0.0) return 0.0;
    const double tau = std::min(c, loss / norm2);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += tau * y * x[i];
    return tau;
}

namespace detail {

inline PassiveAggressiveModel fit_passive_aggressive(const Matrix& x, std::span<const double> labels,
                                                     double c, std::uint64_t seed) {
    PassiveAggressiveModel m;
    m.classes = sorted_classes(labels);
    m.c = c;
    if (m.classes.size() < 2)
        throw Error(Errc::SingleClassTraining, "PassiveAggressive needs at least two classes");
    const std::size_t nf = x.cols();
    m.weights = Matrix(m.classes.size(), nf + 1);
    std::vector<double> xa(nf + 1, 1.0);
    for (auto r : seeded_permutation(x.rows(), seed)) {
        std::copy(x.row(r).begin(), x.row(r).end(), xa.begin());
        for (std::size_t k = 0; k < m.classes.size(); ++k)
            pa_update(m.weights.row(k), xa, labels[r] == m.classes[k] ? 1.0 : -1.0, c);
    }
    return m;
}

inline std::vector<double> predict_knn(const KnnModel& m, const Matrix& x) {
    const std::size_t n = m.train.rows();
    const std::size_t k = std::min(m.k, n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<double> out;
    out.reserve(x.rows());
    const auto classes = sorted_classes(m.labels);
    std::vector<double> votes(classes.size());
    for (std::size_t q = 0; q < x.rows(); ++q) {
        const auto query = x.row(q);
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = m.train.row(i);
            double d = 0.0;
            if (m.p == 1) {
                for (std::size_t f = 0; f < t.size(); ++f) d += std::fabs(query[f] - t[f]);
            } else {
                for (std::size_t f = 0; f < t.size(); ++f) d += (query[f] - t[f]) * (query[f] - t[f]);
            }
            dist[i] = {d, i};
        }
        // Lexicographic (distance, training index) order breaks distance ties.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::fill(votes.begin(), votes.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) votes[class_index(classes, m.labels[dist[i].second])] += 1.0;
        out.push_back(classes[argmax_first(votes)]);
    }
    return out;
}

} // namespace detail

/// Fit `strategy` on (features, labels). Deterministic in (inputs, seed).
inline FittedModel fit(const StrategyDescriptor& strategy, const Hyperparameters& hyperparameters,
                       const Matrix& features, std::span<const double> labels, std::uint64_t seed,
                       const FitOptions& options = {}) {
    if (labels.empty()) throw Error(Errc::EmptyInput, "no training labels");
    if (features.rows() != labels.size())
        throw Error(Errc::LengthMismatch, "features and labels disagree in length");

    FittedModel model;
    model.strategy_id = strategy.id;
    model.chosen_hyperparameters = hyperparameters;
    model.n_features = features.cols();

    const Matrix* x = &features;
    Matrix standardized;
    if (options.standardize.value_or(strategy.requires_standardization)) {
        model.standardization = standardize_fit(features);
        standardized = standardize_apply(*model.standardization, features);
        x = &standardized;
    }

    if (strategy.id == strategy_id::baseline) {
        detail::check_known(hyperparameters, {}, strategy.id);
        model.parameters = detail::fit_baseline(labels);
    } else if (strategy.id == strategy_id::gaussian_nb) {
        detail::check_known(hyperparameters, {}, strategy.id);
        model.parameters = detail::fit_gaussian_nb(*x, labels);
    } else if (strategy.id == strategy_id::bernoulli_nb) {
        detail::check_known(hyperparameters, {}, strategy.id);
        model.parameters = detail::fit_bernoulli_nb(*x, labels);
    } else if (strategy.id == strategy_id::knn) {
        detail::check_known(hyperparameters, {"n_neighbors", "p"}, strategy.id);
        const double k = detail::hp_or(hyperparameters, "n_neighbors", 5.0);
        const double p = detail::hp_or(hyperparameters, "p", 2.0);
        if (!(k >= 1.0) || k != std::floor(k))
            throw Error(Errc::InvalidHyperparameter, "n_neighbors must be a positive integer");
        if (p != 1.0 && p != 2.0) throw Error(Errc::InvalidHyperparameter, "p must be 1 or 2");
        model.parameters = KnnModel{*x, std::vector<double>(labels.begin(), labels.end()),
                                    static_cast<std::size_t>(k), static_cast<int>(p)};
    } else if (strategy.id == strategy_id::passive_aggressive) {
        detail::check_known(hyperparameters, {"C"}, strategy.id);
        const double c = detail::hp_or(hyperparameters, "C", 1.0);
        if (!(c > 0.0)) throw Error(Errc::InvalidHyperparameter, "C must be positive");
        model.parameters = detail::fit_passive_aggressive(*x, labels, c, seed);
    } else {
        throw Error(Errc::UnknownStrategyId, "'" + strategy.id + "' has no implementation");
    }
    return model;
}

inline std::vector<double> predict(const FittedModel& model, const Matrix& features) {
    if (features.cols() != model.n_features)
        throw Error(Errc::DimensionMismatch, "model fitted on " + std::to_string(model.n_features) +
                                                 " features, got " + std::to_string(features.cols()));
    const Matrix x = model.standardization ? standardize_apply(*model.standardization, features)
                                           : features;
    const std::size_t n = x.rows();

    struct Visitor {
        const Matrix& x;
        std::size_t n;

        std::vector<double> operator()(const BaselineModel& m) const {
            return std::vector<double>(n, m.modal_class);
        }
        std::vector<double> operator()(const GaussianNBModel& m) const {
            std::vector<double> out, joint(m.classes.size());
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < m.classes.size(); ++c) {
                    double ll = m.log_priors[c];
                    for (std::size_t f = 0; f < x.cols(); ++f) {
                        const double var = m.variances(c, f);
                        const double d = x(r, f) - m.means(c, f);
                        ll -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
                    }
                    joint[c] = ll;
                }
                out.push_back(m.classes[detail::argmax_first(joint)]);
            }
            return out;
        }
        std::vector<double> operator()(const BernoulliNBModel& m) const {
            std::vector<double> out, joint(m.classes.size());
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < m.classes.size(); ++c) {
                    double ll = m.log_priors[c];
                    for (std::size_t f = 0; f < x.cols(); ++f)
                        ll += x(r, f) > bernoulli_threshold ? m.log_p(c, f) : m.log_not_p(c, f);
                    joint[c] = ll;
                }
                out.push_back(m.classes[detail::argmax_first(joint)]);
            }
            return out;
        }
        std::vector<double> operator()(const KnnModel& m) const { return detail::predict_knn(m, x); }
        std::vector<double> operator()(const PassiveAggressiveModel& m) const {
            std::vector<double> out, score(m.classes.size());
            for (std::size_t r = 0; r < n; ++r) {
                const auto row = x.row(r);
                for (std::size_t c = 0; c < m.classes.size(); ++c) {
                    const auto w = m.weights.row(c);
                    score[c] = std::inner_product(row.begin(), row.end(), w.begin(), w.back());
                }
                out.push_back(m.classes[detail::argmax_first(score)]);
            }
            return out;
        }
    };
    return std::visit(Visitor{x, n}, model.parameters);
}

/// Small JSON summary of a fitted model for the prediction record.
inline nlohmann::ordered_json model_summary(const FittedModel& model) {
    nlohmann::ordered_json j;
    j["strategy_id"] = model.strategy_id;
    j["n_features"] = model.n_features;
    j["standardized"] = model.standardization.has_value();
    j["hyperparameters"] = to_json(model.chosen_hyperparameters);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BaselineModel>) {
                j["modal_class"] = m.modal_class;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                j["n_train"] = m.train.rows();
            } else {
                j["classes"] = m.classes;
            }
        },
        model.parameters);
    return j;
}

} // namespace bench

#endif // BENCH_LEARNERS_MODELS_HPP
