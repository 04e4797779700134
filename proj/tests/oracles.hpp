// Reference implementations used only by the tests. Each one is computed a
// different way from the library code it checks.
#ifndef BENCH_TESTS_ORACLES_HPP
#define BENCH_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace oracle {

// erf by its Maclaurin series for small |x|, erfc by continued fraction beyond.
inline long double erfc_ld(long double x) {
    if (x < 0) return 2.0L - erfc_ld(-x);
    const long double pi = 3.141592653589793238462643383279502884L;
    if (x < 3.0L) {
        long double term = x, sum = x;
        for (int n = 1; n < 200; ++n) {
            term *= -x * x / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L) break;
        }
        return 1.0L - 2.0L / std::sqrt(pi) * sum;
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    long double f = x;
    for (int n = 200; n >= 1; --n) f = x + (n / 2.0L) / f;
    return std::exp(-x * x) / std::sqrt(pi) / f;
}

inline long double normal_cdf_ld(long double x) { return 0.5L * erfc_ld(-x / std::sqrt(2.0L)); }

// Bisection on the series-based CDF.
inline double normal_quantile(double p) {
    long double lo = -40.0L, hi = 40.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (normal_cdf_ld(mid) < p) lo = mid;
        else hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

// P(T > t) for Student t with df degrees of freedom, via Boost's incomplete beta.
inline double t_survival(double t, double df) {
    const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
    return t >= 0 ? tail : 1.0 - tail;
}

inline double f_survival(double f, double d1, double d2) {
    if (f <= 0) return 1.0;
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// Critical value of the range of k standard normals (infinite df) at upper
// tail alpha: P(range < q) = k * int phi(z) [Phi(z+q) - Phi(z)]^(k-1) dz,
// Simpson's rule on [-10, 10], then bisection on q.
inline double studentized_range_q(double alpha, int k) {
    auto cdf = [k](double q) {
        const int n = 4000;
        const double a = -10.0, b = 10.0, h = (b - a) / n;
        long double sum = 0;
        for (int i = 0; i <= n; ++i) {
            const double z = a + i * h;
            const long double phi = std::exp(-0.5L * z * z) / std::sqrt(2.0L * 3.14159265358979323846L);
            const long double g = k * phi * std::pow(normal_cdf_ld(z + q) - normal_cdf_ld(z), k - 1);
            sum += g * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
        }
        return static_cast<double>(sum * h / 3.0L);
    };
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < 1.0 - alpha) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Tails {
    double lower;  // P(stat <= observed)
    double upper;  // P(stat >= observed)
};

// Signed-rank sum tails by enumerating all 2^D sign assignments; |delta| untied, nonzero.
inline Tails wilcoxon_enumeration(const std::vector<double>& delta) {
    const std::size_t d = delta.size();
    std::vector<int> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = static_cast<int>(i);
    std::vector<int> rank(d);
    for (std::size_t i = 0; i < d; ++i) {
        int r = 1;
        for (std::size_t j = 0; j < d; ++j)
            if (std::fabs(delta[j]) < std::fabs(delta[i])) ++r;
        rank[i] = r;
    }
    long observed = 0;
    for (std::size_t i = 0; i < d; ++i) observed += delta[i] > 0 ? rank[i] : -rank[i];
    std::uint64_t le = 0, ge = 0;
    const std::uint64_t total = std::uint64_t{1} << d;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        long w = 0;
        for (std::size_t i = 0; i < d; ++i) w += (mask >> i & 1) ? rank[i] : -rank[i];
        if (w <= observed) ++le;
        if (w >= observed) ++ge;
    }
    return {static_cast<double>(le) / static_cast<double>(total),
            static_cast<double>(ge) / static_cast<double>(total)};
}

inline std::uint64_t choose(unsigned n, unsigned k) {
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;  // exact at every step
    return r;
}

// Binomial(n, 1/2) tails at x as exact integer counts over 2^n.
inline Tails binomial_tails(unsigned n, unsigned x) {
    std::uint64_t le = 0, ge = 0;
    for (unsigned k = 0; k <= n; ++k) {
        if (k <= x) le += choose(n, k);
        if (k >= x) ge += choose(n, k);
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    return {static_cast<double>(le) / total, static_cast<double>(ge) / total};
}

// Tails of (#plus - #minus) over n trials with P(tie) = p0, by enumerating 3^n outcomes.
inline Tails trinomial_enumeration(unsigned n, long z, double p0) {
    const double pd = 0.5 * (1.0 - p0);
    std::uint64_t total = 1;
    for (unsigned i = 0; i < n; ++i) total *= 3;
    long double le = 0, ge = 0;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        long diff = 0;
        long double prob = 1;
        for (unsigned i = 0; i < n; ++i, c /= 3) {
            const int digit = static_cast<int>(c % 3);
            if (digit == 0) { ++diff; prob *= pd; }
            else if (digit == 1) { --diff; prob *= pd; }
            else prob *= p0;
        }
        if (diff <= z) le += prob;
        if (diff >= z) ge += prob;
    }
    return {static_cast<double>(le), static_cast<double>(ge)};
}

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("bench_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace oracle

#endif // BENCH_TESTS_ORACLES_HPP
