#ifndef BENCH_ORCHESTRATOR_SYNTH_HPP
#define BENCH_ORCHESTRATOR_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../datastore/dataset.hpp"
#include "../error.hpp"
#include "../random.hpp"

namespace bench {

struct SynthSpec {
    std::size_t n_datasets = 5;
    std::size_t n_per_dataset = 200;
    std::size_t n_features = 4;
    std::size_t n_classes = 2;
    double class_separation = 3.0;
    std::uint64_t seed = 0;
};

inline std::string synth_dataset_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "synth_%03zu", i);
    return buf;
}

/// Gaussian blobs with unit-variance noise. Class c is centred at
/// class_separation * e_c (a random unit direction when c >= n_features), so
/// class centres are class_separation * sqrt(2) apart in the axis-aligned case.
/// Labels are balanced and shuffled.
inline Dataset synth_dataset(const SynthSpec& spec, std::size_t index) {
    const std::string id = synth_dataset_id(index);
    Rng rng(derive_seed(spec.seed, "synth", id));
    const std::size_t n = spec.n_per_dataset, f = spec.n_features;

    Matrix centres(spec.n_classes, f);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        if (c < f) {
            centres(c, c) = spec.class_separation;
            continue;
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < f; ++j) {
            centres(c, j) = rng.normal();
            norm += centres(c, j) * centres(c, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < f; ++j)
            centres(c, j) = norm > 0 ? spec.class_separation * centres(c, j) / norm : 0.0;
    }

    std::vector<double> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[r] = static_cast<double>(r % spec.n_classes);
    rng.shuffle(labels);

    Dataset ds;
    ds.id = id;
    ds.name = id;
    ds.source = "synthetic";
    ds.target_column = "label";
    ds.task = Task::Classification;
    ds.labels = labels;
    ds.features = Matrix(n, f);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = static_cast<std::size_t>(labels[r]);
        for (std::size_t j = 0; j < f; ++j) ds.features(r, j) = centres(c, j) + rng.normal();
    }
    for (std::size_t j = 0; j < f; ++j) ds.column_names.push_back("x" + std::to_string(j));
    return ds;
}

/// Writes n_datasets synthetic datasets into `collection`. Deterministic in spec.
inline std::vector<std::string> synth_collection(const SynthSpec& spec, const fs::path& collection) {
    if (spec.n_datasets == 0 || spec.n_per_dataset < 2 || spec.n_features == 0 || spec.n_classes == 0)
        throw Error(Errc::DomainError, "synthetic collection needs positive counts and >= 2 points");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < spec.n_datasets; ++i) {
        const auto ds = synth_dataset(spec, i);
        save_dataset(collection, ds);
        ids.push_back(ds.id);
    }
    return ids;
}

} // namespace bench

#endif // BENCH_ORCHESTRATOR_SYNTH_HPP
