#ifndef BENCH_DATASTORE_SPLIT_HPP
#define BENCH_DATASTORE_SPLIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "../random.hpp"
#include "dataset.hpp"

namespace bench {

struct SplitSpec {
    std::string dataset_id;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    double ratio = 2.0 / 3.0;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// Training-set size: ratio * n rounded half away from zero.
inline std::size_t train_size(std::size_t n, double ratio) {
    return static_cast<std::size_t>(std::round(ratio * static_cast<double>(n)));
}

/// Uniformly random train/test split: the first round(ratio*n) entries of a seeded
/// Fisher-Yates permutation form the training set. Both index lists are sorted.
inline SplitSpec generate_split(std::string dataset_id, std::size_t n, double ratio,
                                std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(Errc::DegenerateSplit, "ratio must lie in (0,1)");
    const std::size_t n_train = train_size(n, ratio);
    if (n < 2 || n_train < 1 || n_train >= n)
        throw Error(Errc::DegenerateSplit, "ratio " + format_real(ratio) + " on " +
                                               std::to_string(n) + " rows leaves a side empty");
    auto perm = seeded_permutation(n, seed);
    SplitSpec s;
    s.dataset_id = std::move(dataset_id);
    s.seed = seed;
    s.ratio = ratio;
    s.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(s.train_indices.begin(), s.train_indices.end());
    std::sort(s.test_indices.begin(), s.test_indices.end());
    return s;
}

inline SplitSpec generate_split(const Dataset& ds, double ratio, std::uint64_t seed) {
    return generate_split(ds.id, ds.size(), ratio, seed);
}

inline nlohmann::ordered_json to_json(const SplitSpec& s) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["dataset_id"] = s.dataset_id;
    j["seed"] = s.seed;
    j["ratio"] = s.ratio;
    j["train_indices"] = s.train_indices;
    j["test_indices"] = s.test_indices;
    return j;
}

inline SplitSpec split_from_json(const nlohmann::json& j) {
    SplitSpec s;
    s.dataset_id = j.at("dataset_id");
    s.seed = j.at("seed");
    s.ratio = j.at("ratio");
    s.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    s.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    return s;
}

inline fs::path split_path(const fs::path& collection, const std::string& id) {
    return collection / "splits" / (id + ".split.json");
}

inline void save_split(const fs::path& collection, const SplitSpec& s) {
    write_file_atomic(split_path(collection, s.dataset_id), to_json(s).dump(2) + "\n");
}

inline SplitSpec load_split(const fs::path& collection, const std::string& id) {
    try {
        return split_from_json(nlohmann::json::parse(read_file(split_path(collection, id))));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, "split for '" + id + "': " + e.what());
    }
}

inline bool has_split(const fs::path& collection, const std::string& id) {
    return fs::exists(split_path(collection, id));
}

} // namespace bench

#endif // BENCH_DATASTORE_SPLIT_HPP
