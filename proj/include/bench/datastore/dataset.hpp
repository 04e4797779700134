#ifndef BENCH_DATASTORE_DATASET_HPP
#define BENCH_DATASTORE_DATASET_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "csv.hpp"
#include "matrix.hpp"

namespace bench {

enum class Task { Classification, Regression };

inline std::string_view task_name(Task t) {
    return t == Task::Classification ? "classification" : "regression";
}

inline Task parse_task(std::string_view s) {
    if (s == "classification") return Task::Classification;
    if (s == "regression") return Task::Regression;
    throw Error(Errc::ParseError, "unknown task '" + std::string(s) + "'");
}

enum class CategoricalEncoding { Integer, OneHot };

struct DatasetMetadata {
    std::string id;
    std::string name;
    std::string source;
    std::string target_column;
    Task task = Task::Classification;
};

struct IngestOptions {
    CategoricalEncoding encoding = CategoricalEncoding::Integer;
};

struct Dataset {
    std::string id;
    std::string name;
    std::string source;
    std::string target_column;
    Task task = Task::Classification;
    Matrix features;
    std::vector<double> labels;
    std::vector<std::string> column_names;
    // Original spelling of each class when the target column was not numeric;
    // label value i stands for class_names[i].
    std::vector<std::string> class_names;
    // Columns with a single distinct value. Kept, but flagged.
    std::vector<std::string> constant_columns;

    std::size_t size() const noexcept { return labels.size(); }

    /// Distinct label values in ascending order.
    std::vector<double> classes() const {
        std::set<double> s(labels.begin(), labels.end());
        return {s.begin(), s.end()};
    }
};

namespace detail {

// First-appearance encoding of a string column.
inline std::vector<double> encode_first_appearance(const std::vector<std::string>& column,
                                                   std::vector<std::string>& levels) {
    std::map<std::string, double> code;
    std::vector<double> out;
    out.reserve(column.size());
    for (const auto& v : column) {
        auto [it, inserted] = code.try_emplace(v, static_cast<double>(levels.size()));
        if (inserted) levels.push_back(v);
        out.push_back(it->second);
    }
    return out;
}

inline bool column_is_numeric(const std::vector<std::string>& column) {
    return std::all_of(column.begin(), column.end(),
                       [](const std::string& v) { return csv::parse_real(v).has_value(); });
}

} // namespace detail

/// Build a Dataset from CSV text with a header row.
inline Dataset parse_dataset(std::string_view csv_text, const DatasetMetadata& meta,
                             const IngestOptions& options = {}) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw Error(Errc::EmptyDataset, "no header row");
    const auto& header = rows.front();
    const std::size_t width = header.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw Error(Errc::NonRectangular, "row " + std::to_string(r) + " has " +
                                                  std::to_string(rows[r].size()) +
                                                  " fields, header has " + std::to_string(width));
    }
    const auto target_it = std::find(header.begin(), header.end(), meta.target_column);
    if (target_it == header.end())
        throw Error(Errc::MissingTarget, "column '" + meta.target_column + "' not in header");
    const std::size_t n = rows.size() - 1;
    if (n < 2) throw Error(Errc::EmptyDataset, "need at least 2 rows, got " + std::to_string(n));
    const auto target_col = static_cast<std::size_t>(target_it - header.begin());

    auto column = [&](std::size_t c) {
        std::vector<std::string> out;
        out.reserve(n);
        for (std::size_t r = 1; r < rows.size(); ++r) out.push_back(rows[r][c]);
        return out;
    };

    Dataset ds;
    ds.id = meta.id;
    ds.name = meta.name.empty() ? meta.id : meta.name;
    ds.source = meta.source;
    ds.target_column = meta.target_column;
    ds.task = meta.task;

    std::vector<std::vector<double>> feature_columns;
    for (std::size_t c = 0; c < width; ++c) {
        if (c == target_col) continue;
        auto raw = column(c);
        if (detail::column_is_numeric(raw)) {
            std::vector<double> values;
            values.reserve(n);
            for (const auto& v : raw) values.push_back(*csv::parse_real(v));
            feature_columns.push_back(std::move(values));
            ds.column_names.push_back(header[c]);
            continue;
        }
        std::vector<std::string> levels;
        auto codes = detail::encode_first_appearance(raw, levels);
        if (options.encoding == CategoricalEncoding::Integer) {
            feature_columns.push_back(std::move(codes));
            ds.column_names.push_back(header[c]);
        } else {
            for (std::size_t l = 0; l < levels.size(); ++l) {
                std::vector<double> indicator(n);
                for (std::size_t r = 0; r < n; ++r)
                    indicator[r] = codes[r] == static_cast<double>(l) ? 1.0 : 0.0;
                feature_columns.push_back(std::move(indicator));
                ds.column_names.push_back(header[c] + "=" + levels[l]);
            }
        }
    }

    auto target = column(target_col);
    if (detail::column_is_numeric(target)) {
        for (const auto& v : target) ds.labels.push_back(*csv::parse_real(v));
    } else {
        if (meta.task == Task::Regression)
            throw Error(Errc::InvalidLabels, "regression target must be numeric");
        ds.labels = detail::encode_first_appearance(target, ds.class_names);
    }

    ds.features = Matrix(n, feature_columns.size());
    for (std::size_t c = 0; c < feature_columns.size(); ++c) {
        const auto& col = feature_columns[c];
        for (std::size_t r = 0; r < n; ++r) ds.features(r, c) = col[r];
        if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); }))
            ds.constant_columns.push_back(ds.column_names[c]);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Collection directory layout

inline fs::path datasets_dir(const fs::path& collection) { return collection / "datasets"; }
inline fs::path dataset_csv_path(const fs::path& collection, const std::string& id) {
    return datasets_dir(collection) / (id + ".csv");
}
inline fs::path dataset_meta_path(const fs::path& collection, const std::string& id) {
    return datasets_dir(collection) / (id + ".meta.json");
}

/// Canonical CSV: features then target, every real written losslessly.
inline std::string canonical_csv(const Dataset& ds) {
    std::string out;
    for (const auto& name : ds.column_names) out += csv::quote(name) + ",";
    out += csv::quote(ds.target_column) + "\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.features.row(r)) out += format_real(v) + ",";
        out += format_real(ds.labels[r]) + "\n";
    }
    return out;
}

inline nlohmann::ordered_json metadata_json(const Dataset& ds) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["id"] = ds.id;
    j["name"] = ds.name;
    j["source"] = ds.source;
    j["target_column"] = ds.target_column;
    j["task"] = task_name(ds.task);
    j["n_rows"] = ds.size();
    j["n_features"] = ds.features.cols();
    j["column_names"] = ds.column_names;
    j["class_names"] = ds.class_names;
    j["constant_columns"] = ds.constant_columns;
    return j;
}

inline void save_dataset(const fs::path& collection, const Dataset& ds) {
    write_file_atomic(dataset_csv_path(collection, ds.id), canonical_csv(ds));
    write_file_atomic(dataset_meta_path(collection, ds.id), metadata_json(ds).dump(2) + "\n");
}

inline Dataset load_dataset(const fs::path& collection, const std::string& id) {
    const auto meta_text = read_file(dataset_meta_path(collection, id));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(meta_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, "metadata for '" + id + "': " + e.what());
    }
    DatasetMetadata meta{j.at("id"), j.at("name"), j.at("source"), j.at("target_column"),
                         parse_task(j.at("task").get<std::string>())};
    auto ds = parse_dataset(read_file(dataset_csv_path(collection, id)), meta);
    ds.class_names = j.at("class_names").get<std::vector<std::string>>();
    return ds;
}

/// Ingest a raw CSV and persist the canonical copy under `collection`.
inline Dataset ingest_dataset(const fs::path& csv_path, const DatasetMetadata& meta,
                              const fs::path& collection, const IngestOptions& options = {}) {
    auto ds = parse_dataset(read_file(csv_path), meta, options);
    save_dataset(collection, ds);
    return ds;
}

/// Dataset ids present in the collection, sorted.
inline std::vector<std::string> list_datasets(const fs::path& collection) {
    std::vector<std::string> ids;
    const auto dir = datasets_dir(collection);
    if (!fs::exists(dir)) return ids;
    constexpr std::string_view suffix = ".meta.json";
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix))
            ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace bench

#endif // BENCH_DATASTORE_DATASET_HPP
