#ifndef LISTREC_METRICS_HPP
#define LISTREC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "listrec/dataset.hpp"
#include "listrec/errors.hpp"

namespace listrec {

// Mean absolute error over (predicted, actual) pairs, in stars.
inline double mae(std::span<const std::pair<double, double>> pred_actual) {
    if (pred_actual.empty()) throw UsageError("mae needs at least one prediction");
    double sum = 0.0;
    for (const auto& [p, a] : pred_actual) sum += std::abs(p - a);
    return sum / static_cast<double>(pred_actual.size());
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

// Ordinary least squares of ln(count) on ln(rank).
inline LineFit loglog_slope(std::span<const std::pair<std::int64_t, double>> rank_count) {
    if (rank_count.size() < 2) throw UsageError("loglog_slope needs at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [rank, count] : rank_count) {
        if (rank <= 0 || !(count > 0.0))
            throw UsageError("loglog_slope needs strictly positive ranks and counts");
        sx += std::log(static_cast<double>(rank));
        sy += std::log(count);
    }
    const double n = static_cast<double>(rank_count.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [rank, count] : rank_count) {
        const double dx = std::log(static_cast<double>(rank)) - mx;
        const double dy = std::log(count) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (const auto& [rank, count] : rank_count) {
            const double res = std::log(count) -
                               (fit.slope * std::log(static_cast<double>(rank)) + fit.intercept);
            ss_res += res * res;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    } else {
        fit.r_squared = 1.0; // constant response: the flat line fits exactly
    }
    return fit;
}

// Top-k candidates by score, descending; ties break toward the lower item
// index. Items in `exclude` never appear. Shorter than k when candidates
// run out; empty candidate set is an error.
template <class Scorer>
std::vector<int> topk_recommend(Scorer&& score, int n_items, int user, int k,
                                const std::unordered_set<int>& exclude) {
    if (k < 1) throw UsageError("topk_recommend needs k >= 1");
    std::vector<std::pair<double, int>> scored;
    scored.reserve(static_cast<std::size_t>(n_items));
    for (int item = 0; item < n_items; ++item) {
        if (exclude.count(item)) continue;
        scored.emplace_back(score(user, item), item);
    }
    if (scored.empty()) throw DataError("topk_recommend: no candidate items");
    auto better = [](const std::pair<double, int>& a, const std::pair<double, int>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);
    std::vector<int> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
    return out;
}

// How often each item lands in a top-K list, plus the rank-frequency fit.
struct PopularityProfile {
    std::map<int, std::size_t> counts; // item -> occurrences, items with count >= 1
    double fitted_slope = 0.0;
    double r_squared = 1.0;
};

// Slope-magnitude of the rank-frequency line for an already-tallied count
// multiset. Fewer than two distinct points (or a constant profile) means a
// flat line: degree 0.
inline double matthew_degree_from_counts(std::vector<double> counts, LineFit* fit_out = nullptr) {
    std::sort(counts.begin(), counts.end(), std::greater<>());
    std::vector<std::pair<std::int64_t, double>> points;
    points.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!(counts[i] > 0.0)) throw UsageError("matthew degree needs positive counts");
        points.emplace_back(static_cast<std::int64_t>(i + 1), counts[i]);
    }
    if (points.size() < 2) {
        if (fit_out) *fit_out = LineFit{};
        return 0.0;
    }
    LineFit fit = loglog_slope(points);
    if (fit_out) *fit_out = fit;
    return std::abs(fit.slope);
}

// Degree of Matthew effect of a recommender: build top-K lists for every user
// (excluding that user's observed items), tally item popularity, and fit
// ln(count) against ln(rank). Flatter popularity means a fairer recommender.
template <class Scorer>
std::pair<double, PopularityProfile> matthew_degree(Scorer&& score, const RatingsDataset& train,
                                                    int k) {
    if (k < 1) throw UsageError("matthew_degree needs k >= 1");
    const auto by_user = train.items_by_user();
    std::vector<std::size_t> tally(static_cast<std::size_t>(train.n_items()), 0);
    bool any_user = false;
    for (int user = 0; user < train.n_users(); ++user) {
        std::unordered_set<int> exclude(by_user[user].begin(), by_user[user].end());
        if (static_cast<int>(exclude.size()) >= train.n_items()) continue; // no candidates
        any_user = true;
        for (int item : topk_recommend(score, train.n_items(), user, k, exclude))
            ++tally[static_cast<std::size_t>(item)];
    }
    if (!any_user) throw DataError("matthew_degree: no user has a candidate item");

    PopularityProfile profile;
    std::vector<double> counts;
    for (int item = 0; item < train.n_items(); ++item)
        if (tally[static_cast<std::size_t>(item)] > 0) {
            profile.counts[item] = tally[static_cast<std::size_t>(item)];
            counts.push_back(static_cast<double>(tally[static_cast<std::size_t>(item)]));
        }
    LineFit fit;
    double degree = matthew_degree_from_counts(std::move(counts), &fit);
    profile.fitted_slope = fit.slope;
    profile.r_squared = fit.r_squared;
    return {degree, std::move(profile)};
}

// One evaluated (algorithm, config) pair.
struct MetricsReport {
    std::string algorithm;
    double lr = 0.0;
    int dim = 0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    int k = 0;
    double mae = 0.0;
    double matthew_degree = 0.0;
    double runtime_ms = 0.0;
};

} // namespace listrec

#endif // LISTREC_METRICS_HPP
