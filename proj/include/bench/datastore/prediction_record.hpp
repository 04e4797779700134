#ifndef BENCH_DATASTORE_PREDICTION_RECORD_HPP
#define BENCH_DATASTORE_PREDICTION_RECORD_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "../learners/hyperparameters.hpp"

namespace bench {

struct PredictionRecord {
    std::string dataset_id;
    std::string strategy_id;
    std::vector<double> predicted_labels;  // aligned with SplitSpec::test_indices
    double training_time = 0.0;            // seconds, tune + fit
    TuningReport tuning_report;
    nlohmann::ordered_json model_summary = nlohmann::ordered_json::object();
};

inline std::string serialize(const PredictionRecord& r) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["dataset_id"] = r.dataset_id;
    j["strategy_id"] = r.strategy_id;
    j["training_time"] = r.training_time;
    j["tuning_report"] = to_json(r.tuning_report);
    j["model_summary"] = r.model_summary;
    j["predicted_labels"] = r.predicted_labels;
    return j.dump(2) + "\n";
}

inline PredictionRecord parse_prediction_record(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("format_version") != 1) throw Error(Errc::ParseError, "unsupported format_version");
        PredictionRecord r;
        r.dataset_id = j.at("dataset_id");
        r.strategy_id = j.at("strategy_id");
        r.training_time = j.at("training_time");
        r.tuning_report = tuning_report_from_json(j.at("tuning_report"));
        r.model_summary = j.at("model_summary");
        r.predicted_labels = j.at("predicted_labels").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, std::string("prediction record: ") + e.what());
    }
}

inline fs::path prediction_path(const fs::path& collection, const std::string& strategy_id,
                                const std::string& dataset_id) {
    return collection / "predictions" / strategy_id / (dataset_id + ".json");
}

/// Writes the record atomically and returns the digest of the bytes written.
inline std::string save_prediction_record(const fs::path& collection, const PredictionRecord& r) {
    const auto text = serialize(r);
    write_file_atomic(prediction_path(collection, r.strategy_id, r.dataset_id), text);
    return digest_of(text);
}

inline PredictionRecord load_prediction_record(const fs::path& collection,
                                               const std::string& strategy_id,
                                               const std::string& dataset_id) {
    return parse_prediction_record(read_file(prediction_path(collection, strategy_id, dataset_id)));
}

} // namespace bench

#endif // BENCH_DATASTORE_PREDICTION_RECORD_HPP
