#ifndef LISTREC_LISTWISE_HPP
#define LISTREC_LISTWISE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "listrec/errors.hpp"
#include "listrec/factors.hpp"
#include "listrec/rng.hpp"

namespace listrec {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::int64_t steps = 0; // sampled updates (listwise/BPR) or epochs (MF)
    int d = 8;
    std::uint64_t seed = 0;
    double eps = 1e-3; // lower clamp on dot products before ln
};

inline void validate(const TrainConfig& cfg) {
    // lr = 0 is admitted so the zero-step-size limit stays testable
    if (!(cfg.learning_rate >= 0.0)) throw UsageError("learning_rate must be >= 0");
    if (cfg.steps < 1) throw UsageError("steps must be >= 1");
    if (cfg.d < 1) throw UsageError("d must be >= 1");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0 / 2.718281828459045))
        throw UsageError("eps must lie in (0, 1/e)");
}

// x^x, evaluated as exp(x ln x) to stay clear of pow's domain edges.
inline double pow_self(double x) {
    return std::exp(x * std::log(x));
}

// d/dx x^x in the two-term printed form: x * x^(x-1) + x^x * ln x.
inline double pow_self_grad_two_term(double x) {
    double lx = std::log(x);
    return x * std::exp((x - 1.0) * lx) + std::exp(x * lx) * lx;
}

// d/dx x^x collapsed to x^x * (1 + ln x).
inline double pow_self_grad(double x) {
    double lx = std::log(x);
    return std::exp(x * lx) * (1.0 + lx);
}

// Gradient of (u.v)^(u.v) with respect to each factor row.
// g_u = s * v and g_v = s * u with the shared scalar s = d/dx x^x at
// x = max(u.v, eps).
struct PairGradient {
    std::vector<double> g_u;
    std::vector<double> g_v;
    double x = 0.0;
};

inline PairGradient pair_gradient(std::span<const double> u, std::span<const double> v, double eps) {
    if (u.size() != v.size()) throw UsageError("pair_gradient: dimension mismatch");
    double x = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!std::isfinite(u[k]) || !std::isfinite(v[k]))
            throw NumericError("pair_gradient: non-finite factor entry");
        x += u[k] * v[k];
    }
    x = std::max(x, eps);
    double s = pow_self_grad_two_term(x);
    if (!std::isfinite(s)) throw NumericError("pair_gradient: non-finite gradient scalar");
    PairGradient g;
    g.x = x;
    g.g_u.resize(u.size());
    g.g_v.resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        g.g_u[k] = s * v[k];
        g.g_v[k] = s * u[k];
    }
    return g;
}

// Log of the listwise estimator prod (u.v)^(u.v), up to its dropped
// proportionality constant: sum over all pairs of x ln x, x clamped at eps.
inline double log_objective(const FactorModel& m, double eps) {
    if (!m.constrained) throw UsageError("log_objective requires a constrained model");
    double total = 0.0;
    for (int i = 0; i < m.n_users; ++i)
        for (int j = 0; j < m.n_items; ++j) {
            double x = std::max(m.dot(i, j), eps);
            total += x * std::log(x);
        }
    return total;
}

// One ascent update on the sampled pair, then projection of the touched rows.
inline void zeroshot_step(FactorModel& m, int user, int item, double lr, double eps) {
    double* ur = m.u.data() + static_cast<std::size_t>(user) * m.d;
    double* vr = m.v.data() + static_cast<std::size_t>(item) * m.d;
    double x = 0.0;
    for (int k = 0; k < m.d; ++k) x += ur[k] * vr[k];
    x = std::max(x, eps);
    double s = pow_self_grad_two_term(x);
    for (int k = 0; k < m.d; ++k) {
        double du = s * vr[k];
        double dv = s * ur[k];
        ur[k] += lr * du;
        vr[k] += lr * dv;
    }
    for (int k = 0; k < m.d; ++k) {
        if (!std::isfinite(ur[k]) || !std::isfinite(vr[k]))
            throw NumericError("zeroshot update produced a non-finite factor");
        ur[k] = std::clamp(ur[k], 0.0, m.entry_cap);
        vr[k] = std::clamp(vr[k], 0.0, m.entry_cap);
    }
}

// One deterministic pass over every (user, item) pair in row-major order.
inline void zeroshot_sweep(FactorModel& m, double lr, double eps) {
    for (int i = 0; i < m.n_users; ++i)
        for (int j = 0; j < m.n_items; ++j) zeroshot_step(m, i, j, lr, eps);
}

// Trains the zeroshot listwise model. The signature admits no rating data:
// only the matrix shape, the config and the rating scale enter the updates.
inline FactorModel train_zeroshot(int n_users, int n_items, const TrainConfig& cfg,
                                  double r_min, double r_max) {
    validate(cfg);
    FactorModel m = init_factors(n_users, n_items, cfg.d, r_min, r_max,
                                 InitSpec{cfg.seed, InitMode::uniform_capped});
    Rng rng(mix64(cfg.seed) ^ 0x7a31bc5218f3900dULL);
    for (std::int64_t step = 0; step < cfg.steps; ++step) {
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_users)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_items)));
        try {
            zeroshot_step(m, i, j, cfg.learning_rate, cfg.eps);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at step " + std::to_string(step));
        }
    }
    return m;
}

} // namespace listrec

#endif // LISTREC_LISTWISE_HPP
