#ifndef LISTREC_BASELINES_HPP
#define LISTREC_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "listrec/dataset.hpp"
#include "listrec/errors.hpp"
#include "listrec/factors.hpp"
#include "listrec/listwise.hpp"
#include "listrec/rng.hpp"

namespace listrec {

// --- classic MF -------------------------------------------------------------

// Per-rating gradient of the squared loss (R - u.v)^2:
// dL/du = -2 (R - u.v) v and symmetrically for v.
inline void mf_pair_gradient(std::span<const double> u, std::span<const double> v, double rating,
                             std::span<double> g_u, std::span<double> g_v) {
    double x = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) x += u[k] * v[k];
    const double c = -2.0 * (rating - x);
    for (std::size_t k = 0; k < u.size(); ++k) {
        g_u[k] = c * v[k];
        g_v[k] = c * u[k];
    }
}

// SGD on the squared loss over observed ratings. cfg.steps counts epochs;
// each epoch visits every training rating once in a seeded shuffle order.
inline FactorModel train_mf(const RatingsDataset& train, const TrainConfig& cfg) {
    validate(cfg);
    if (train.ratings().empty()) throw DataError("train_mf needs a non-empty training set");

    FactorModel m = init_factors(train.n_users(), train.n_items(), cfg.d, train.r_min(),
                                 train.r_max(), InitSpec{cfg.seed, InitMode::gaussian});
    Rng rng(mix64(cfg.seed) ^ 0x2c9277b5e03f81a6ULL);
    const std::size_t n = train.ratings().size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (std::int64_t epoch = 0; epoch < cfg.steps; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx = 0; idx < n; ++idx) {
            const Rating& r = train.ratings()[order[idx]];
            double* ur = m.u.data() + static_cast<std::size_t>(r.user) * m.d;
            double* vr = m.v.data() + static_cast<std::size_t>(r.item) * m.d;
            double x = 0.0;
            for (int k = 0; k < m.d; ++k) x += ur[k] * vr[k];
            const double c = 2.0 * cfg.learning_rate * (r.value - x);
            for (int k = 0; k < m.d; ++k) {
                const double du = c * vr[k];
                const double dv = c * ur[k];
                ur[k] += du;
                vr[k] += dv;
            }
            for (int k = 0; k < m.d; ++k)
                if (!std::isfinite(ur[k]) || !std::isfinite(vr[k]))
                    throw NumericError("train_mf diverged at step " +
                                       std::to_string(epoch * static_cast<std::int64_t>(n) +
                                                      static_cast<std::int64_t>(idx)));
        }
    }
    return m;
}

// --- BPR-MF -----------------------------------------------------------------

// Index tuple with R[i,j] > R[k,t] in the training data.
struct Quadruple {
    int i = 0, j = 0, k = 0, t = 0;
};

// P(x_ij ranks above x_kt), logistic in the score difference.
inline double bpr_pair_prob(double x_ij, double x_kt) {
    return 1.0 / (1.0 + std::exp(-(x_ij - x_kt)));
}

// Ascends sum ln sigma(u_i.v_j - u_k.v_t) over quadruples sampled by
// rejection: draw two observed ratings, keep if strictly ordered, orient so
// the first dominates. The rejection budget is 100 draws per requested step.
inline FactorModel train_bpr(const RatingsDataset& train, const TrainConfig& cfg) {
    validate(cfg);
    const auto& ratings = train.ratings();
    if (ratings.size() < 2) throw DataError("train_bpr needs at least two ratings");

    bool two_values = false;
    for (std::size_t i = 1; i < ratings.size() && !two_values; ++i)
        two_values = ratings[i].value != ratings[0].value;
    if (!two_values)
        throw DataError("train_bpr: all ratings equal, no ordered pair exists");

    FactorModel m = init_factors(train.n_users(), train.n_items(), cfg.d, train.r_min(),
                                 train.r_max(), InitSpec{cfg.seed, InitMode::gaussian});
    Rng rng(mix64(cfg.seed) ^ 0x5e8d1a49c6b70f23ULL);
    std::int64_t budget = 100 * cfg.steps;
    std::vector<double> delta(static_cast<std::size_t>(4) * m.d);

    for (std::int64_t step = 0; step < cfg.steps; ++step) {
        Quadruple q;
        while (true) {
            if (budget-- <= 0) throw DataError("train_bpr: rejection budget exhausted");
            const Rating& a = ratings[rng.below(ratings.size())];
            const Rating& b = ratings[rng.below(ratings.size())];
            if (a.value == b.value) continue;
            if (a.value > b.value)
                q = Quadruple{a.user, a.item, b.user, b.item};
            else
                q = Quadruple{b.user, b.item, a.user, a.item};
            break;
        }
        double* ui = m.u.data() + static_cast<std::size_t>(q.i) * m.d;
        double* vj = m.v.data() + static_cast<std::size_t>(q.j) * m.d;
        double* uk = m.u.data() + static_cast<std::size_t>(q.k) * m.d;
        double* vt = m.v.data() + static_cast<std::size_t>(q.t) * m.d;

        const double margin = m.dot(q.i, q.j) - m.dot(q.k, q.t);
        const double g = cfg.learning_rate * (1.0 - bpr_pair_prob(margin, 0.0));
        // all four deltas from pre-update rows; rows may alias when i==k or j==t
        for (int c = 0; c < m.d; ++c) {
            delta[static_cast<std::size_t>(c)] = g * vj[c];
            delta[static_cast<std::size_t>(m.d + c)] = g * ui[c];
            delta[static_cast<std::size_t>(2 * m.d + c)] = -g * vt[c];
            delta[static_cast<std::size_t>(3 * m.d + c)] = -g * uk[c];
        }
        for (int c = 0; c < m.d; ++c) {
            ui[c] += delta[static_cast<std::size_t>(c)];
            vj[c] += delta[static_cast<std::size_t>(m.d + c)];
            uk[c] += delta[static_cast<std::size_t>(2 * m.d + c)];
            vt[c] += delta[static_cast<std::size_t>(3 * m.d + c)];
            if (!std::isfinite(ui[c]) || !std::isfinite(vj[c]) || !std::isfinite(uk[c]) ||
                !std::isfinite(vt[c]))
                throw NumericError("train_bpr diverged at step " + std::to_string(step));
        }
    }
    return m;
}

// Least-squares affine map a*x + b from dot products to ratings, fit on
// training pairs only. Calibrates BPR's ranking scores for MAE reporting.
struct AffineFit {
    double a = 0.0;
    double b = 0.0;
};

inline AffineFit fit_affine(const RatingsDataset& train, const FactorModel& m) {
    const auto& ratings = train.ratings();
    if (ratings.empty()) throw DataError("fit_affine needs a non-empty training set");
    double sx = 0.0, sy = 0.0;
    for (const Rating& r : ratings) {
        sx += m.dot(r.user, r.item);
        sy += r.value;
    }
    const double n = static_cast<double>(ratings.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const Rating& r : ratings) {
        const double dx = m.dot(r.user, r.item) - mx;
        sxx += dx * dx;
        sxy += dx * (r.value - my);
    }
    AffineFit fit;
    fit.a = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.b = my - fit.a * mx;
    return fit;
}

// --- heuristics ---------------------------------------------------------------
// Standard non-learning reference predictors.

enum class HeuristicMode { global_mean, user_mean, item_mean, random_uniform };

inline const char* to_string(HeuristicMode m) {
    switch (m) {
        case HeuristicMode::global_mean: return "global_mean";
        case HeuristicMode::user_mean: return "user_mean";
        case HeuristicMode::item_mean: return "item_mean";
        case HeuristicMode::random_uniform: return "random_uniform";
    }
    return "?";
}

// Precomputed means so prediction is O(d)-free and O(1).
class HeuristicModel {
public:
    HeuristicModel(const RatingsDataset& train, HeuristicMode mode, std::uint64_t seed)
        : mode_(mode),
          seed_(seed),
          r_min_(train.r_min()),
          r_max_(train.r_max()),
          integral_scale_(train.integral_scale()),
          user_sum_(static_cast<std::size_t>(train.n_users()), 0.0),
          user_cnt_(static_cast<std::size_t>(train.n_users()), 0),
          item_sum_(static_cast<std::size_t>(train.n_items()), 0.0),
          item_cnt_(static_cast<std::size_t>(train.n_items()), 0) {
        if (train.ratings().empty()) throw DataError("heuristics need a non-empty training set");
        double total = 0.0;
        for (const Rating& r : train.ratings()) {
            total += r.value;
            user_sum_[static_cast<std::size_t>(r.user)] += r.value;
            ++user_cnt_[static_cast<std::size_t>(r.user)];
            item_sum_[static_cast<std::size_t>(r.item)] += r.value;
            ++item_cnt_[static_cast<std::size_t>(r.item)];
        }
        global_mean_ = total / static_cast<double>(train.ratings().size());
    }

    double predict(int user, int item) const {
        switch (mode_) {
            case HeuristicMode::global_mean:
                return global_mean_;
            case HeuristicMode::user_mean: {
                auto u = static_cast<std::size_t>(user);
                return user_cnt_[u] ? user_sum_[u] / static_cast<double>(user_cnt_[u])
                                    : global_mean_;
            }
            case HeuristicMode::item_mean: {
                auto i = static_cast<std::size_t>(item);
                return item_cnt_[i] ? item_sum_[i] / static_cast<double>(item_cnt_[i])
                                    : global_mean_;
            }
            case HeuristicMode::random_uniform:
                return random_draw(user, item);
        }
        throw UsageError("unknown heuristic mode");
    }

    double global_mean() const { return global_mean_; }

private:
    // A fresh stream per (seed, user, item), so the draw is a pure function
    // of the tuple. Integral scales draw whole stars, per the star-rating
    // reading of "uniform over the scale"; real scales draw continuously.
    double random_draw(int user, int item) const {
        std::uint64_t h = mix64(seed_ ^ mix64(static_cast<std::uint64_t>(user) + 1));
        h = mix64(h ^ mix64(static_cast<std::uint64_t>(item) + 0x9e3779b97f4a7c15ULL));
        Rng rng(h);
        if (integral_scale_) {
            auto lo = static_cast<std::int64_t>(r_min_);
            auto hi = static_cast<std::int64_t>(r_max_);
            return static_cast<double>(lo + static_cast<std::int64_t>(rng.below(
                                                static_cast<std::uint64_t>(hi - lo + 1))));
        }
        return rng.uniform(r_min_, r_max_);
    }

    HeuristicMode mode_;
    std::uint64_t seed_;
    double r_min_, r_max_;
    bool integral_scale_;
    double global_mean_ = 0.0;
    std::vector<double> user_sum_;
    std::vector<std::size_t> user_cnt_;
    std::vector<double> item_sum_;
    std::vector<std::size_t> item_cnt_;
};

inline double heuristic_predict(const RatingsDataset& train, HeuristicMode mode, int user,
                                int item, std::uint64_t seed) {
    return HeuristicModel(train, mode, seed).predict(user, item);
}

} // namespace listrec

#endif // LISTREC_BASELINES_HPP
