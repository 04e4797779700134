#ifndef BENCH_LEARNERS_REGISTRY_HPP
#define BENCH_LEARNERS_REGISTRY_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "../datastore/dataset.hpp"
#include "../error.hpp"
#include "hyperparameters.hpp"

namespace bench {

enum class Family { Baseline, NaiveBayes, PrototypeMethod, LinearModel };

inline std::string_view family_name(Family f) {
    switch (f) {
    case Family::Baseline: return "Baseline";
    case Family::NaiveBayes: return "NaiveBayes";
    case Family::PrototypeMethod: return "PrototypeMethod";
    case Family::LinearModel: return "LinearModel";
    }
    return "Unknown";
}

struct StrategyDescriptor {
    std::string id;
    Family family = Family::Baseline;
    std::set<Task> tasks;
    Grid default_grid;  // empty: nothing to tune
    bool requires_standardization = false;
};

namespace strategy_id {
inline constexpr std::string_view baseline = "Baseline";
inline constexpr std::string_view gaussian_nb = "GaussianNB";
inline constexpr std::string_view bernoulli_nb = "BernoulliNB";
inline constexpr std::string_view knn = "KNN";
inline constexpr std::string_view passive_aggressive = "PassiveAggressive";
} // namespace strategy_id

inline const std::vector<StrategyDescriptor>& builtin_strategies() {
    static const std::vector<StrategyDescriptor> all = [] {
        std::vector<double> neighbors;
        for (int k = 1; k <= 30; ++k) neighbors.push_back(k);
        // 13 log-spaced values over [1e-2, 1e10].
        std::vector<double> pa_c{1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4,
                                 1e5,  1e6,  1e7, 1e8, 1e9, 1e10};
        const std::set<Task> cls{Task::Classification};
        return std::vector<StrategyDescriptor>{
            {std::string(strategy_id::baseline), Family::Baseline, cls, {}, false},
            {std::string(strategy_id::gaussian_nb), Family::NaiveBayes, cls, {}, true},
            {std::string(strategy_id::bernoulli_nb), Family::NaiveBayes, cls, {}, true},
            {std::string(strategy_id::knn), Family::PrototypeMethod, cls,
             {{"n_neighbors", neighbors}, {"p", {1.0, 2.0}}}, true},
            {std::string(strategy_id::passive_aggressive), Family::LinearModel, cls,
             {{"C", pa_c}}, true},
        };
    }();
    return all;
}

struct RegistryFilter {
    std::optional<Task> task;
    std::optional<Family> family;
    std::optional<std::vector<std::string>> ids;
};

/// Descriptors matching every provided filter field, in registry order
/// (or in the order of `ids` when given).
inline std::vector<StrategyDescriptor> registry_lookup(const RegistryFilter& filter = {}) {
    const auto& all = builtin_strategies();
    std::vector<StrategyDescriptor> candidates;
    if (filter.ids) {
        for (const auto& id : *filter.ids) {
            auto it = std::find_if(all.begin(), all.end(), [&](auto& d) { return d.id == id; });
            if (it == all.end()) throw Error(Errc::UnknownStrategyId, "'" + id + "' is not registered");
            candidates.push_back(*it);
        }
    } else {
        candidates = all;
    }
    std::erase_if(candidates, [&](const StrategyDescriptor& d) {
        return (filter.task && !d.tasks.contains(*filter.task)) ||
               (filter.family && d.family != *filter.family);
    });
    return candidates;
}

inline const StrategyDescriptor& find_strategy(std::string_view id) {
    const auto& all = builtin_strategies();
    auto it = std::find_if(all.begin(), all.end(), [&](auto& d) { return d.id == id; });
    if (it == all.end())
        throw Error(Errc::UnknownStrategyId, "'" + std::string(id) + "' is not registered");
    return *it;
}

/// Grid overrides keyed by strategy id: {"KNN": {"n_neighbors": [1, 3], "p": [2]}}.
/// A named hyper-parameter replaces the default candidate list; others keep defaults.
inline std::map<std::string, Grid> parse_grid_overrides(std::string_view json_text) {
    std::map<std::string, Grid> out;
    try {
        const auto j = nlohmann::json::parse(json_text);
        for (auto it = j.begin(); it != j.end(); ++it) {
            find_strategy(it.key());
            Grid g;
            for (auto p = it.value().begin(); p != it.value().end(); ++p) {
                auto values = p.value().get<std::vector<double>>();
                if (values.empty())
                    throw Error(Errc::InvalidHyperparameter,
                                it.key() + "." + p.key() + " has no candidates");
                g[p.key()] = std::move(values);
            }
            out[it.key()] = std::move(g);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, std::string("grid config: ") + e.what());
    }
    return out;
}

inline Grid effective_grid(const StrategyDescriptor& d,
                           const std::map<std::string, Grid>& overrides) {
    Grid g = d.default_grid;
    if (auto it = overrides.find(d.id); it != overrides.end())
        for (const auto& [name, values] : it->second) g[name] = values;
    return g;
}

} // namespace bench

#endif // BENCH_LEARNERS_REGISTRY_HPP
