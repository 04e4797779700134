#ifndef BENCH_LEARNERS_HYPERPARAMETERS_HPP
#define BENCH_LEARNERS_HYPERPARAMETERS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace bench {

/// Hyper-parameter assignment; std::map keeps names sorted.
using Hyperparameters = std::map<std::string, double>;

/// Candidate lists per hyper-parameter name, in declared order.
using Grid = std::map<std::string, std::vector<double>>;

struct CandidateScore {
    Hyperparameters params;
    double cv_score = 0.0;

    friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

struct TuningReport {
    std::vector<CandidateScore> grid_points;
    Hyperparameters winner;
    std::uint64_t cv_seed = 0;

    friend bool operator==(const TuningReport&, const TuningReport&) = default;
};

inline nlohmann::ordered_json to_json(const Hyperparameters& h) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : h) j[k] = v;
    return j;
}

inline Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
    Hyperparameters h;
    for (auto it = j.begin(); it != j.end(); ++it) h[it.key()] = it.value().get<double>();
    return h;
}

inline nlohmann::ordered_json to_json(const TuningReport& r) {
    nlohmann::ordered_json j;
    j["cv_seed"] = r.cv_seed;
    j["winner"] = to_json(r.winner);
    auto points = nlohmann::ordered_json::array();
    for (const auto& p : r.grid_points) {
        nlohmann::ordered_json e;
        e["hyperparameters"] = to_json(p.params);
        e["cv_score"] = p.cv_score;
        points.push_back(std::move(e));
    }
    j["grid_points"] = std::move(points);
    return j;
}

inline TuningReport tuning_report_from_json(const nlohmann::json& j) {
    TuningReport r;
    r.cv_seed = j.at("cv_seed");
    r.winner = hyperparameters_from_json(j.at("winner"));
    for (const auto& e : j.at("grid_points"))
        r.grid_points.push_back({hyperparameters_from_json(e.at("hyperparameters")),
                                 e.at("cv_score").get<double>()});
    return r;
}

} // namespace bench

#endif // BENCH_LEARNERS_HYPERPARAMETERS_HPP
