#ifndef BENCH_LEARNERS_STANDARDIZE_HPP
#define BENCH_LEARNERS_STANDARDIZE_HPP

#include <cmath>
#include <vector>

#include "../datastore/matrix.hpp"
#include "../error.hpp"

namespace bench {

struct StandardizationStats {
    std::vector<double> means;
    std::vector<double> sds;  // sample sd (n-1); 1 for constant columns

    friend bool operator==(const StandardizationStats&, const StandardizationStats&) = default;
};

inline StandardizationStats standardize_fit(const Matrix& train) {
    if (train.empty()) throw Error(Errc::EmptyInput, "standardize_fit on an empty matrix");
    const std::size_t n = train.rows();
    StandardizationStats s{std::vector<double>(train.cols(), 0.0),
                           std::vector<double>(train.cols(), 1.0)};
    for (std::size_t c = 0; c < train.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += train(r, c);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        bool constant = true;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = train(r, c) - mean;
            ss += d * d;
            constant = constant && train(r, c) == train(0, c);
        }
        s.means[c] = constant ? train(0, c) : mean;
        if (!constant && n > 1) s.sds[c] = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

inline Matrix standardize_apply(const StandardizationStats& s, const Matrix& features) {
    if (features.cols() != s.means.size())
        throw Error(Errc::DimensionMismatch, "standardization fitted on " +
                                                 std::to_string(s.means.size()) +
                                                 " features, got " + std::to_string(features.cols()));
    Matrix out = features;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c)
            out(r, c) = (out(r, c) - s.means[c]) / s.sds[c];
    return out;
}

} // namespace bench

#endif // BENCH_LEARNERS_STANDARDIZE_HPP
