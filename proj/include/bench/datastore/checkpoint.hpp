#ifndef BENCH_DATASTORE_CHECKPOINT_HPP
#define BENCH_DATASTORE_CHECKPOINT_HPP

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "dataset.hpp"
#include "prediction_record.hpp"
#include "split.hpp"

namespace bench {

struct JobKey {
    std::string dataset_id;
    std::string strategy_id;

    friend auto operator<=>(const JobKey&, const JobKey&) = default;
};

struct RunState {
    std::set<JobKey> completed;
    std::optional<JobKey> in_progress;
    // Digest of the prediction record written for each completed pair.
    std::map<JobKey, std::string> record_digests;
    // Pairs whose last attempt failed, with the error text. Retried on resume.
    std::map<JobKey, std::string> failed;
    std::string collection_digest;
    std::string config_digest;

    friend bool operator==(const RunState&, const RunState&) = default;
};

/// Content digest of every dataset (csv + metadata) and split in the collection.
inline std::string collection_digest(const fs::path& collection) {
    std::uint64_t h = fnv1a("collection");
    for (const auto& id : list_datasets(collection)) {
        h = fnv1a(id, h);
        h = fnv1a(read_file(dataset_meta_path(collection, id)), h);
        h = fnv1a(read_file(dataset_csv_path(collection, id)), h);
        const auto sp = split_path(collection, id);
        if (fs::exists(sp)) h = fnv1a(read_file(sp), h);
    }
    return hex64(h);
}

inline fs::path checkpoint_path(const fs::path& run_dir) { return run_dir / "checkpoint.json"; }

namespace detail {

inline nlohmann::ordered_json key_json(const JobKey& k) {
    return {{"dataset_id", k.dataset_id}, {"strategy_id", k.strategy_id}};
}

inline JobKey key_from_json(const nlohmann::json& j) {
    return {j.at("dataset_id").get<std::string>(), j.at("strategy_id").get<std::string>()};
}

inline nlohmann::ordered_json state_payload(const RunState& s) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["collection_digest"] = s.collection_digest;
    j["config_digest"] = s.config_digest;
    auto completed = nlohmann::ordered_json::array();
    for (const auto& k : s.completed) {
        auto e = key_json(k);
        auto it = s.record_digests.find(k);
        e["record_digest"] = it == s.record_digests.end() ? "" : it->second;
        completed.push_back(std::move(e));
    }
    j["completed"] = std::move(completed);
    j["in_progress"] = s.in_progress ? key_json(*s.in_progress) : nlohmann::ordered_json();
    auto failed = nlohmann::ordered_json::array();
    for (const auto& [k, msg] : s.failed) {
        auto e = key_json(k);
        e["error"] = msg;
        failed.push_back(std::move(e));
    }
    j["failed"] = std::move(failed);
    return j;
}

} // namespace detail

inline std::string serialize(const RunState& s) {
    auto j = detail::state_payload(s);
    j["checksum"] = digest_of(j.dump());
    return j.dump(2) + "\n";
}

/// Parses and validates a committed checkpoint document.
inline RunState parse_checkpoint(std::string_view text) {
    RunState s;
    try {
        auto j = nlohmann::ordered_json::parse(text);
        const std::string checksum = j.at("checksum");
        j.erase("checksum");
        if (j.at("format_version") != 1)
            throw Error(Errc::CorruptCheckpoint, "unsupported format_version");
        if (digest_of(j.dump()) != checksum)
            throw Error(Errc::CorruptCheckpoint, "checksum does not match content");
        s.collection_digest = j.at("collection_digest");
        s.config_digest = j.at("config_digest");
        for (const auto& e : j.at("completed")) {
            auto k = detail::key_from_json(e);
            s.record_digests[k] = e.at("record_digest");
            s.completed.insert(std::move(k));
        }
        if (!j.at("in_progress").is_null()) s.in_progress = detail::key_from_json(j["in_progress"]);
        for (const auto& e : j.at("failed")) s.failed[detail::key_from_json(e)] = e.at("error");
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::CorruptCheckpoint, e.what());
    }
    return s;
}

inline void checkpoint_write(const fs::path& run_dir, const RunState& state) {
    write_file_atomic(checkpoint_path(run_dir), serialize(state));
}

/// Last committed RunState, or nullopt when no checkpoint exists. A stale
/// `checkpoint.json.tmp` from an interrupted write is ignored.
///
/// Throws DigestMismatch when datasets or splits changed since the checkpoint,
/// and CorruptCheckpoint when the file or a referenced prediction record fails
/// validation.
inline std::optional<RunState> checkpoint_read(const fs::path& run_dir) {
    const auto path = checkpoint_path(run_dir);
    if (!fs::exists(path)) return std::nullopt;
    auto state = parse_checkpoint(read_file(path));
    const auto current = collection_digest(run_dir);
    if (current != state.collection_digest)
        throw Error(Errc::DigestMismatch, "collection changed since checkpoint (was " +
                                              state.collection_digest + ", now " + current + ")");
    for (const auto& k : state.completed) {
        const auto p = prediction_path(run_dir, k.strategy_id, k.dataset_id);
        if (!fs::exists(p) || digest_of(read_file(p)) != state.record_digests[k])
            throw Error(Errc::CorruptCheckpoint, "prediction record for (" + k.dataset_id + ", " +
                                                     k.strategy_id + ") is missing or altered");
    }
    return state;
}

} // namespace bench

#endif // BENCH_DATASTORE_CHECKPOINT_HPP
