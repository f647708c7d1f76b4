#ifndef LISTREC_ORDERSTAT_HPP
#define LISTREC_ORDERSTAT_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "listrec/errors.hpp"
#include "listrec/rng.hpp"

namespace listrec {

enum class DensityFamily { uniform, power };

// Analytic 1-d density on [a, b]: uniform, or f(x) proportional to x^alpha.
struct DensitySpec {
    DensityFamily family = DensityFamily::uniform;
    double a = 0.0;
    double b = 1.0;
    double alpha = 0.0;

    static DensitySpec uniform(double a, double b) {
        DensitySpec d;
        d.family = DensityFamily::uniform;
        d.a = a;
        d.b = b;
        d.validate();
        return d;
    }

    static DensitySpec power(double alpha, double a, double b) {
        DensitySpec d;
        d.family = DensityFamily::power;
        d.alpha = alpha;
        d.a = a;
        d.b = b;
        d.validate();
        return d;
    }

    void validate() const {
        if (!(b > a)) throw UsageError("density support needs b > a");
        if (family == DensityFamily::power) {
            if (a < 0.0) throw UsageError("power density needs a >= 0");
            if (a == 0.0 && !(alpha > -1.0))
                throw UsageError("power density with a = 0 needs alpha > -1");
        }
    }

    // integral of x^alpha over [a, b]
    double power_mass() const {
        if (alpha == -1.0) return std::log(b / a);
        return (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / (alpha + 1.0);
    }

    double pdf(double x) const {
        if (x < a || x > b) return 0.0;
        if (family == DensityFamily::uniform) return 1.0 / (b - a);
        return std::pow(x, alpha) / power_mass();
    }
};

namespace detail {

inline std::uint64_t factorial_u64(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

} // namespace detail

// Joint density of the order statistics of n i.i.d. draws from f:
// n! * prod f(x_i) on the non-decreasing region, 0 elsewhere. The theorem's
// support convention matters: without the ordering constraint the function
// would integrate to n!, not 1. Ties count as ordered.
inline double joint_density(const DensitySpec& f, std::span<const double> xs) {
    f.validate();
    if (xs.empty()) throw UsageError("joint_density needs n >= 1");
    if (xs.size() > 20) throw UsageError("joint_density supports n <= 20 (exact factorial)");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] < xs[i - 1]) return 0.0;
    double prod = static_cast<double>(detail::factorial_u64(static_cast<int>(xs.size())));
    for (double x : xs) {
        prod *= f.pdf(x);
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte Carlo estimate of the integral of joint_density over the support box
// [a, b]^n: volume-weighted mean of the density at uniform points. Should be
// 1 for any valid density, which is what the verification asserts.
inline McEstimate normalization_check(const DensitySpec& f, int n, std::int64_t samples,
                                      std::uint64_t seed) {
    f.validate();
    if (n < 1 || n > 6) throw UsageError("normalization_check supports n in [1, 6]");
    if (samples < 100000) throw UsageError("normalization_check needs at least 1e5 samples");

    const double volume = std::pow(f.b - f.a, n);
    Rng rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n));
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
        for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = rng.uniform(f.a, f.b);
        double w = joint_density(f, xs);
        sum += w;
        sum_sq += w * w;
    }
    const double ns = static_cast<double>(samples);
    const double mean = sum / ns;
    const double var = std::max(0.0, sum_sq / ns - mean * mean);
    McEstimate est;
    est.value = volume * mean;
    est.std_error = volume * std::sqrt(var / ns);
    return est;
}

} // namespace listrec

#endif // LISTREC_ORDERSTAT_HPP
