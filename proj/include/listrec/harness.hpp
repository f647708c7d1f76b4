#ifndef LISTREC_HARNESS_HPP
#define LISTREC_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "listrec/baselines.hpp"
#include "listrec/dataset.hpp"
#include "listrec/errors.hpp"
#include "listrec/factors.hpp"
#include "listrec/listwise.hpp"
#include "listrec/metrics.hpp"
#include "listrec/util.hpp"

namespace listrec {

enum class Algorithm {
    zeroshot_listwise,
    mf,
    bpr,
    global_mean,
    user_mean,
    item_mean,
    random_uniform,
};

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::zeroshot_listwise: return "zeroshot_listwise";
        case Algorithm::mf: return "mf";
        case Algorithm::bpr: return "bpr";
        case Algorithm::global_mean: return "global_mean";
        case Algorithm::user_mean: return "user_mean";
        case Algorithm::item_mean: return "item_mean";
        case Algorithm::random_uniform: return "random_uniform";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    for (Algorithm a : {Algorithm::zeroshot_listwise, Algorithm::mf, Algorithm::bpr,
                        Algorithm::global_mean, Algorithm::user_mean, Algorithm::item_mean,
                        Algorithm::random_uniform})
        if (s == to_string(a)) return a;
    throw UsageError("unknown algorithm: '" + std::string(s) + "'");
}

inline bool is_heuristic(Algorithm a) {
    return a == Algorithm::global_mean || a == Algorithm::user_mean ||
           a == Algorithm::item_mean || a == Algorithm::random_uniform;
}

inline HeuristicMode heuristic_mode_of(Algorithm a) {
    switch (a) {
        case Algorithm::global_mean: return HeuristicMode::global_mean;
        case Algorithm::user_mean: return HeuristicMode::user_mean;
        case Algorithm::item_mean: return HeuristicMode::item_mean;
        case Algorithm::random_uniform: return HeuristicMode::random_uniform;
        default: throw UsageError("not a heuristic algorithm");
    }
}

inline const std::vector<double>& default_lr_grid() {
    static const std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    return grid;
}

// One experiment: dataset x algorithm x hyperparameters. lr_grid drives
// sweep(); run_experiment() uses learning_rate.
struct ExperimentConfig {
    std::string dataset_path;
    DataFormat format = DataFormat::movielens_dat;
    ColumnSpec columns;
    std::optional<std::pair<double, double>> scale_override;

    Algorithm algo = Algorithm::zeroshot_listwise;
    double learning_rate = 1e-3;
    std::vector<double> lr_grid;
    int d = 8;
    std::int64_t steps = 0; // 0 = per-algorithm default
    std::uint64_t seed = 42;
    double eps = 1e-3;
    SplitSpec split{0.8, 42};
    int k = 10;
};

// Per-algorithm step budgets when the config leaves steps at 0.
inline std::int64_t resolve_steps(const ExperimentConfig& cfg, const RatingsDataset& ds,
                                  std::size_t n_train) {
    if (cfg.steps > 0) return cfg.steps;
    constexpr std::int64_t cap = 2'000'000;
    switch (cfg.algo) {
        case Algorithm::zeroshot_listwise:
            return std::min<std::int64_t>(cap, 10LL * ds.n_users() * ds.n_items());
        case Algorithm::mf:
            return 100; // epochs
        case Algorithm::bpr:
            return std::min<std::int64_t>(cap, 10LL * static_cast<std::int64_t>(n_train));
        default:
            return 1; // heuristics do not iterate
    }
}

// A trained predictor: rating-scale predictions for MAE and a raw ranking
// score for top-K. Clamping is not strictly monotone, so ranking keeps the
// native score.
struct TrainedPredictor {
    std::function<double(int, int)> predict_rating_fn;
    std::function<double(int, int)> rank_score_fn;
    std::optional<FactorModel> model;
};

inline TrainedPredictor train_algorithm(const ExperimentConfig& cfg, const RatingsDataset& ds,
                                        const RatingsDataset& train, std::int64_t steps) {
    TrainedPredictor out;
    if (is_heuristic(cfg.algo)) {
        auto h = std::make_shared<HeuristicModel>(train, heuristic_mode_of(cfg.algo), cfg.seed);
        out.predict_rating_fn = [h](int u, int i) { return h->predict(u, i); };
        out.rank_score_fn = out.predict_rating_fn;
        return out;
    }

    TrainConfig tc{cfg.learning_rate, steps, cfg.d, cfg.seed, cfg.eps};
    FactorModel m;
    switch (cfg.algo) {
        case Algorithm::zeroshot_listwise:
            // zeroshot: only the dataset shape and scale enter training
            m = train_zeroshot(ds.n_users(), ds.n_items(), tc, ds.r_min(), ds.r_max());
            break;
        case Algorithm::mf:
            m = train_mf(train, tc);
            break;
        case Algorithm::bpr:
            m = train_bpr(train, tc);
            break;
        default:
            throw UsageError("unhandled algorithm");
    }
    out.model = std::move(m);
    auto shared = std::make_shared<FactorModel>(*out.model);
    if (cfg.algo == Algorithm::bpr) {
        AffineFit fit = fit_affine(train, *shared);
        double lo = shared->r_min, hi = shared->r_max;
        out.predict_rating_fn = [shared, fit, lo, hi](int u, int i) {
            return std::clamp(fit.a * shared->dot(u, i) + fit.b, lo, hi);
        };
    } else {
        out.predict_rating_fn = [shared](int u, int i) { return predict_rating(*shared, u, i); };
    }
    out.rank_score_fn = [shared](int u, int i) { return shared->dot(u, i); };
    return out;
}

// Wraps an already trained factor model (e.g. loaded from disk). BPR models
// get their affine calibration refit on the training half.
inline TrainedPredictor predictor_from_model(Algorithm algo, FactorModel model,
                                             const RatingsDataset& train) {
    if (is_heuristic(algo)) throw UsageError("heuristic algorithms have no model file");
    if (model.n_users != train.n_users() || model.n_items != train.n_items())
        throw DataError("model shape does not match the dataset");
    TrainedPredictor out;
    out.model = std::move(model);
    auto shared = std::make_shared<FactorModel>(*out.model);
    if (algo == Algorithm::bpr) {
        AffineFit fit = fit_affine(train, *shared);
        double lo = shared->r_min, hi = shared->r_max;
        out.predict_rating_fn = [shared, fit, lo, hi](int u, int i) {
            return std::clamp(fit.a * shared->dot(u, i) + fit.b, lo, hi);
        };
    } else {
        out.predict_rating_fn = [shared](int u, int i) { return predict_rating(*shared, u, i); };
    }
    out.rank_score_fn = [shared](int u, int i) { return shared->dot(u, i); };
    return out;
}

// MAE on the test half plus Matthew degree over all users, for an already
// trained predictor.
inline MetricsReport evaluate_predictor(const ExperimentConfig& cfg, const TrainedPredictor& trained,
                                        const RatingsDataset& train, const RatingsDataset& test,
                                        std::int64_t steps,
                                        std::chrono::steady_clock::time_point t0) {
    std::vector<std::pair<double, double>> pred_actual;
    pred_actual.reserve(test.ratings().size());
    for (const Rating& r : test.ratings())
        pred_actual.emplace_back(trained.predict_rating_fn(r.user, r.item), r.value);

    auto [degree, profile] = matthew_degree(
        [&](int u, int i) { return trained.rank_score_fn(u, i); }, train, cfg.k);
    (void)profile;

    MetricsReport rep;
    rep.algorithm = to_string(cfg.algo);
    rep.lr = cfg.learning_rate;
    rep.dim = cfg.d;
    rep.steps = steps;
    rep.seed = cfg.seed;
    rep.k = cfg.k;
    rep.mae = mae(pred_actual);
    rep.matthew_degree = degree;
    rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

// Loads, splits, trains on the train half, reports MAE on the test half and
// the Matthew degree over all users. Every field except runtime_ms is a
// deterministic function of (dataset file, config).
inline MetricsReport run_experiment(const ExperimentConfig& cfg, const RatingsDataset& ds) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [train, test] = split_train_test(ds, cfg.split);
    const std::int64_t steps = resolve_steps(cfg, ds, train.ratings().size());
    TrainedPredictor trained = train_algorithm(cfg, ds, train, steps);
    return evaluate_predictor(cfg, trained, train, test, steps, t0);
}

inline MetricsReport run_experiment(const ExperimentConfig& cfg) {
    RatingsDataset ds = load_ratings(cfg.dataset_path, cfg.format, cfg.columns, cfg.scale_override);
    return run_experiment(cfg, ds);
}

// Learning-rate sweep. Every grid point shares the seed and split, so rows
// differ only in lr. Points run concurrently; rows come back in grid order.
// A failed point yields a nan row plus its error text; the sweep continues.
struct SweepOutcome {
    std::vector<MetricsReport> reports; // one per grid point, grid order
    std::vector<std::string> errors;    // empty string = point succeeded

    bool any_failed() const {
        for (const auto& e : errors)
            if (!e.empty()) return true;
        return false;
    }
};

inline SweepOutcome sweep(const ExperimentConfig& cfg, const RatingsDataset& ds) {
    const std::vector<double>& grid = cfg.lr_grid.empty() ? default_lr_grid() : cfg.lr_grid;
    if (grid.empty()) throw UsageError("sweep needs a non-empty learning-rate grid");

    std::vector<std::future<MetricsReport>> futures;
    futures.reserve(grid.size());
    for (double lr : grid) {
        ExperimentConfig point = cfg;
        point.learning_rate = lr;
        point.lr_grid.clear();
        futures.push_back(std::async(std::launch::async,
                                     [point, &ds]() { return run_experiment(point, ds); }));
    }

    SweepOutcome out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        try {
            out.reports.push_back(futures[g].get());
            out.errors.emplace_back();
        } catch (const std::exception& e) {
            MetricsReport rep;
            rep.algorithm = to_string(cfg.algo);
            rep.lr = grid[g];
            rep.dim = cfg.d;
            rep.steps = cfg.steps;
            rep.seed = cfg.seed;
            rep.k = cfg.k;
            rep.mae = std::nan("");
            rep.matthew_degree = std::nan("");
            rep.runtime_ms = 0.0;
            out.reports.push_back(std::move(rep));
            out.errors.push_back(e.what());
        }
    }
    return out;
}

inline SweepOutcome sweep(const ExperimentConfig& cfg) {
    RatingsDataset ds = load_ratings(cfg.dataset_path, cfg.format, cfg.columns, cfg.scale_override);
    return sweep(cfg, ds);
}

// --- report serialization ----------------------------------------------------

inline constexpr const char* kReportCsvHeader =
    "algorithm,lr,dim,steps,seed,k,mae,matthew_degree,runtime_ms";

inline std::string reports_to_csv(std::span<const MetricsReport> reports) {
    std::string out = std::string(kReportCsvHeader) + "\n";
    for (const MetricsReport& r : reports) {
        out += r.algorithm + "," + format_double(r.lr) + "," + std::to_string(r.dim) + "," +
               std::to_string(r.steps) + "," + std::to_string(r.seed) + "," + std::to_string(r.k) +
               "," + format_double(r.mae) + "," + format_double(r.matthew_degree) + "," +
               format_double(r.runtime_ms) + "\n";
    }
    return out;
}

inline std::vector<MetricsReport> reports_from_csv(std::string_view csv) {
    auto lines = split_view(csv, "\n");
    if (lines.empty() || strip_cr(lines[0]) != kReportCsvHeader)
        throw DataError("unrecognized report csv header");
    std::vector<MetricsReport> out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        std::string_view line = strip_cr(lines[li]);
        if (line.empty()) continue;
        auto f = split_view(line, ",");
        if (f.size() != 9) throw DataError("malformed report csv row: '" + std::string(line) + "'");
        MetricsReport r;
        r.algorithm = std::string(f[0]);
        r.lr = parse_double(f[1], "lr");
        r.dim = static_cast<int>(parse_int(f[2], "dim"));
        r.steps = parse_int(f[3], "steps");
        r.seed = static_cast<std::uint64_t>(parse_int(f[4], "seed"));
        r.k = static_cast<int>(parse_int(f[5], "k"));
        r.mae = parse_double(f[6], "mae");
        r.matthew_degree = parse_double(f[7], "matthew_degree");
        r.runtime_ms = parse_double(f[8], "runtime_ms");
        out.push_back(std::move(r));
    }
    return out;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

} // namespace detail

// Minimal hand-emitted line chart: one polyline per algorithm, x = learning
// rate on a log axis, y = the chosen metric ("mae" or "matthew_degree").
inline std::string reports_to_svg(std::span<const MetricsReport> reports, std::string_view metric) {
    if (reports.empty()) throw UsageError("reports_to_svg needs at least one report");
    if (metric != "mae" && metric != "matthew_degree")
        throw UsageError("svg metric must be 'mae' or 'matthew_degree'");
    auto value_of = [&](const MetricsReport& r) {
        return metric == "mae" ? r.mae : r.matthew_degree;
    };

    // series per algorithm, first-appearance order, points sorted by lr
    std::vector<std::string> names;
    std::vector<std::vector<std::pair<double, double>>> series; // (lr, value)
    for (const MetricsReport& r : reports) {
        std::size_t s = 0;
        while (s < names.size() && names[s] != r.algorithm) ++s;
        if (s == names.size()) {
            names.push_back(r.algorithm);
            series.emplace_back();
        }
        if (std::isfinite(value_of(r)) && r.lr > 0.0)
            series[s].emplace_back(r.lr, value_of(r));
    }
    for (auto& pts : series) std::sort(pts.begin(), pts.end());

    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool first = true;
    for (const auto& pts : series)
        for (const auto& [lr, val] : pts) {
            double lx = std::log10(lr);
            if (first) {
                x_lo = x_hi = lx;
                y_lo = y_hi = val;
                first = false;
            } else {
                x_lo = std::min(x_lo, lx);
                x_hi = std::max(x_hi, lx);
                y_lo = std::min(y_lo, val);
                y_hi = std::max(y_hi, val);
            }
        }
    if (first) { // nothing plottable; keep the chart well-formed
        x_lo = -4.0;
        x_hi = -1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (x_hi == x_lo) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (y_hi == y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const double width = 720, height = 480, ml = 80, mr = 160, mt = 30, mb = 60;
    auto px = [&](double lr) {
        return ml + (std::log10(lr) - x_lo) / (x_hi - x_lo) * (width - ml - mr);
    };
    auto py = [&](double val) {
        return height - mb - (val - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf"};
    const std::size_t n_colors = sizeof(palette) / sizeof(palette[0]);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) +
           "\" height=\"" + format_double(height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + format_double(width) + "\" height=\"" +
           format_double(height) + "\" fill=\"white\"/>\n";
    // axes
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(height - mb) +
           "\" x2=\"" + format_double(width - mr) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
           format_double(ml) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double((ml + width - mr) / 2) + "\" y=\"" +
           format_double(height - 15) + "\" text-anchor=\"middle\">learning rate (log10)</text>\n";
    svg += "<text x=\"20\" y=\"" + format_double((mt + height - mb) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           format_double((mt + height - mb) / 2) + ")\">" + detail::xml_escape(metric) +
           "</text>\n";
    // y ticks
    for (int t = 0; t <= 4; ++t) {
        double val = y_lo + (y_hi - y_lo) * t / 4.0;
        svg += "<text x=\"" + format_double(ml - 8) + "\" y=\"" + format_double(py(val) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + format_double(std::round(val * 1e4) / 1e4) +
               "</text>\n";
    }
    // x ticks at the grid points of the first series with data
    for (const auto& pts : series) {
        for (const auto& [lr, val] : pts) {
            (void)val;
            svg += "<text x=\"" + format_double(px(lr)) + "\" y=\"" +
                   format_double(height - mb + 18) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + format_double(lr) + "</text>\n";
        }
        if (!pts.empty()) break;
    }
    // one polyline per algorithm
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string pts_attr;
        for (const auto& [lr, val] : series[s]) {
            if (!pts_attr.empty()) pts_attr += " ";
            pts_attr += format_double(px(lr)) + "," + format_double(py(val));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(palette[s % n_colors]) +
               "\" stroke-width=\"2\" points=\"" + pts_attr + "\"/>\n";
        svg += "<text x=\"" + format_double(width - mr + 10) + "\" y=\"" +
               format_double(mt + 20 + 18 * static_cast<double>(s)) + "\" fill=\"" +
               palette[s % n_colors] + "\" font-size=\"12\">" + detail::xml_escape(names[s]) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("failed writing output file: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace listrec

#endif // LISTREC_HARNESS_HPP
