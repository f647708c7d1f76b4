// Acceptance suite: prints one [PASS]/[FAIL] line per criterion and exits
// with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "listrec/listrec.hpp"

using namespace listrec;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

void expect_close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol))
        throw Failure(what + ": got " + format_double(got) + ", want " + format_double(want) +
                      " +- " + format_double(tol));
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

std::string scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() /
               ("listrec-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string write_file(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    return path;
}

// --- criterion bodies -------------------------------------------------------

// 1. two-term gradient vs finite differences and vs the collapsed form
void criterion_gradient() {
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        double x = rng.uniform(0.2, 4.5);
        double h = 1e-6;
        double fd = (std::exp((x + h) * std::log(x + h)) - std::exp((x - h) * std::log(x - h))) /
                    (2.0 * h);
        expect(rel_err(pow_self_grad_two_term(x), fd) <= 1e-5,
               "finite-difference mismatch at x=" + format_double(x));
    }
    for (int t = 0; t < 1000; ++t) {
        double x = rng.uniform(1e-3, 5.0);
        expect(rel_err(pow_self_grad_two_term(x), pow_self_grad(x)) <= 1e-12,
               "two-term vs collapsed mismatch at x=" + format_double(x));
    }
}

// 2. 500 deterministic full sweeps never lower the log objective
void criterion_ascent() {
    auto m = init_factors(5, 5, 2, 1.0, 10.0, InitSpec{2024, InitMode::uniform_capped});
    const double eps = 1e-3, lr = 1e-4;
    double prev = log_objective(m, eps);
    for (int sweep = 0; sweep < 500; ++sweep) {
        zeroshot_sweep(m, lr, eps);
        double cur = log_objective(m, eps);
        expect(cur >= prev,
               "objective decreased at sweep " + std::to_string(sweep) + ": " +
                   format_double(prev) + " -> " + format_double(cur));
        prev = cur;
    }
}

// 3. permuted rating values, identical (N, M): bit-identical zeroshot models
void criterion_zeroshot_structure(const std::string& dir) {
    Rng rng(7);
    std::vector<std::pair<int, int>> keys;
    std::set<std::pair<int, int>> used;
    while (keys.size() < 500) {
        std::pair<int, int> k{static_cast<int>(rng.below(40)), static_cast<int>(rng.below(50))};
        if (used.insert(k).second) keys.push_back(k);
    }
    std::vector<int> values;
    for (std::size_t i = 0; i < keys.size(); ++i)
        values.push_back(1 + static_cast<int>(rng.below(5)));
    auto render = [&](const std::vector<int>& vals) {
        std::string out;
        for (std::size_t i = 0; i < keys.size(); ++i)
            out += std::to_string(keys[i].first + 1) + "::" + std::to_string(keys[i].second + 1) +
                   "::" + std::to_string(vals[i]) + "::0\n";
        return out;
    };
    std::vector<int> permuted = values;
    rng.shuffle(permuted);
    auto path_a = write_file(dir + "/perm_a.dat", render(values));
    auto path_b = write_file(dir + "/perm_b.dat", render(permuted));

    ExperimentConfig cfg;
    cfg.format = DataFormat::movielens_dat;
    cfg.algo = Algorithm::zeroshot_listwise;
    cfg.learning_rate = 0.003;
    cfg.d = 4;
    cfg.steps = 20000;
    cfg.seed = 5;
    cfg.split = SplitSpec{0.8, 5};
    cfg.k = 10;

    auto ds_a = load_ratings(path_a, cfg.format);
    auto ds_b = load_ratings(path_b, cfg.format);
    expect(ds_a.n_users() == ds_b.n_users() && ds_a.n_items() == ds_b.n_items(),
           "permutation changed the shape");

    // the trainer's interface admits only (N, M, config, scale)
    TrainConfig tc{cfg.learning_rate, cfg.steps, cfg.d, cfg.seed, cfg.eps};
    auto model_a = train_zeroshot(ds_a.n_users(), ds_a.n_items(), tc, ds_a.r_min(), ds_a.r_max());
    auto model_b = train_zeroshot(ds_b.n_users(), ds_b.n_items(), tc, ds_b.r_min(), ds_b.r_max());
    expect(model_to_text(model_a) == model_to_text(model_b),
           "models differ across rating permutations");

    cfg.dataset_path = path_a;
    auto rep_a = run_experiment(cfg);
    cfg.dataset_path = path_b;
    auto rep_b = run_experiment(cfg);
    expect(rep_a.matthew_degree == rep_b.matthew_degree,
           "matthew degree changed under a value permutation");

    // the MAE difference comes from the test halves alone: scoring model_b on
    // dataset A's test half reproduces report A exactly
    auto [train_a, test_a] = split_train_test(ds_a, cfg.split);
    std::vector<std::pair<double, double>> pairs;
    for (const Rating& r : test_a.ratings())
        pairs.emplace_back(predict_rating(model_b, r.user, r.item), r.value);
    expect(mae(pairs) == rep_a.mae, "MAE is not a function of (model, test half)");
}

// 4. theorem normalization and spot values
void criterion_orderstat() {
    auto f = DensitySpec::uniform(0.0, 1.0);
    for (int n : {1, 2, 3}) {
        auto est = normalization_check(f, n, 1'000'000, 31 + n);
        expect_close(est.value, 1.0, 0.02, "normalization at n=" + std::to_string(n));
    }
    std::vector<double> sorted = {0.1, 0.5, 0.9};
    expect(joint_density(f, sorted) == 6.0, "sorted triple density is not 3!");
    std::vector<double> unsorted = {0.9, 0.1};
    expect(joint_density(f, unsorted) == 0.0, "unsorted pair density is not 0");
}

// 5. MF on planted rank-2 data
void criterion_mf() {
    const int n = 50, m = 50, d = 2;
    const std::uint64_t gen_seed = 8;
    Rng rng(gen_seed);
    std::vector<double> u_true(n * d), v_true(m * d);
    for (double& x : u_true) x = rng.next_unit();
    for (double& x : v_true) x = rng.next_unit();
    std::vector<Rating> observed;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double x = 0.0;
            for (int k = 0; k < d; ++k) x += u_true[i * d + k] * v_true[j * d + k];
            double value = std::clamp(1.0 + 2.0 * x + rng.gaussian(0.0, 0.1), 1.0, 5.0);
            if (rng.next_unit() < 0.3) observed.push_back(Rating{i, j, value});
        }
    auto ds = RatingsDataset::make(n, m, std::move(observed), 1.0, 5.0);
    auto [train, test] = split_train_test(ds, SplitSpec{0.8, gen_seed ^ 0xabcdef});
    auto model = train_mf(train, TrainConfig{0.01, 200, 2, 3, 1e-3});
    std::vector<std::pair<double, double>> pairs;
    for (const Rating& r : test.ratings())
        pairs.emplace_back(predict_rating(model, r.user, r.item), r.value);
    double err = mae(pairs);
    expect(err <= 0.15, "held-out MAE " + format_double(err) + " > 0.15");
}

// 6. metric oracles
void criterion_metrics() {
    Rng rng(606);
    std::vector<std::pair<double, double>> pairs;
    for (int t = 0; t < 10000; ++t)
        pairs.emplace_back(1.0 + static_cast<double>(rng.below(5)),
                           1.0 + static_cast<double>(rng.below(5)));
    expect_close(mae(pairs), 1.6, 0.1, "random-uniform-integer MAE");

    for (double alpha : {-3.0, -2.0, -1.3, -0.5, 0.0}) {
        std::vector<std::pair<std::int64_t, double>> pts;
        for (std::int64_t rank = 1; rank <= 12; ++rank)
            pts.emplace_back(rank, 7.5 * std::pow(static_cast<double>(rank), alpha));
        expect(std::abs(loglog_slope(pts).slope - alpha) <= 1e-12,
               "exponent recovery failed at alpha=" + format_double(alpha));
    }

    // uniform recommender: rotating scores put every item in exactly k lists
    const int m_items = 8;
    auto rotate = [&](int u, int i) {
        return static_cast<double>(m_items - ((i - u + 2 * m_items) % m_items));
    };
    std::vector<Rating> seen;
    for (int u = 0; u < m_items; ++u) seen.push_back(Rating{u, u, 3.0});
    auto ds = RatingsDataset::make(m_items, m_items, std::move(seen), 1.0, 5.0);
    auto [degree, profile] = matthew_degree(rotate, ds, 3);
    (void)profile;
    expect(std::abs(degree) <= 1e-9, "uniform recommender degree " + format_double(degree));

    std::vector<double> counts;
    for (std::int64_t rank = 1; rank <= 8; ++rank)
        counts.push_back(64.0 / static_cast<double>(rank * rank));
    expect_close(matthew_degree_from_counts(counts), 2.0, 1e-9, "64*rank^-2 degree");
}

// 7. BPR contract
void criterion_bpr() {
    Rng rng(707);
    for (int t = 0; t < 2000; ++t) {
        double a = rng.uniform(-40.0, 40.0);
        double b = rng.uniform(-40.0, 40.0);
        expect(std::abs(bpr_pair_prob(a, b) + bpr_pair_prob(b, a) - 1.0) <= 1e-12,
               "logistic symmetry violated");
    }
    auto ds = RatingsDataset::make(2, 2, {Rating{0, 0, 5}, Rating{1, 1, 1}}, 1.0, 5.0);
    auto init = init_factors(2, 2, 2, 1.0, 5.0, InitSpec{12, InitMode::gaussian});
    auto trained = train_bpr(ds, TrainConfig{0.05, 2000, 2, 12, 1e-3});
    double before = init.dot(0, 0) - init.dot(1, 1);
    double after = trained.dot(0, 0) - trained.dot(1, 1);
    expect(after > before, "ordered margin did not increase: " + format_double(before) + " -> " +
                               format_double(after));
}

// 8. desk-scale end-to-end sweep on a 100K MovieLens-format file
void criterion_end_to_end(const std::string& dir) {
    const int n_users = 943, n_items = 1682, n_ratings = 100'000;
    Rng rng(8888);
    std::set<std::pair<int, int>> used;
    std::string content;
    content.reserve(static_cast<std::size_t>(n_ratings) * 24);
    while (static_cast<int>(used.size()) < n_ratings) {
        int u = static_cast<int>(rng.below(n_users));
        // square-law popularity skew over items
        double t = rng.next_unit();
        int i = static_cast<int>(t * t * n_items);
        if (i >= n_items) i = n_items - 1;
        if (!used.insert({u, i}).second) continue;
        // star frequency proportional to the star value
        std::uint64_t roll = rng.below(15);
        int star = roll < 1 ? 1 : roll < 3 ? 2 : roll < 6 ? 3 : roll < 10 ? 4 : 5;
        content += std::to_string(u + 1) + "::" + std::to_string(i + 1) + "::" +
                   std::to_string(star) + "::978300760\n";
    }
    auto path = write_file(dir + "/ml100k.dat", content);

    ExperimentConfig cfg;
    cfg.dataset_path = path;
    cfg.format = DataFormat::movielens_dat;
    cfg.algo = Algorithm::zeroshot_listwise;
    cfg.d = 8;
    cfg.steps = 0; // default budget
    cfg.seed = 42;
    cfg.split = SplitSpec{0.8, 42};
    cfg.k = 10;

    auto ds = load_ratings(cfg.dataset_path, cfg.format);
    auto outcome = sweep(cfg, ds);
    expect(!outcome.any_failed(), "a sweep point failed");
    expect(outcome.reports.size() == default_lr_grid().size(), "wrong sweep row count");
    double best = outcome.reports.front().mae;
    for (const auto& rep : outcome.reports) best = std::min(best, rep.mae);

    ExperimentConfig rnd = cfg;
    rnd.algo = Algorithm::random_uniform;
    auto rnd_rep = run_experiment(rnd, ds);

    std::fprintf(stderr, "    best zeroshot MAE %.4f vs random_uniform %.4f\n", best,
                 rnd_rep.mae);
    expect(best < rnd_rep.mae, "best zeroshot MAE " + format_double(best) +
                                   " is not below random_uniform " + format_double(rnd_rep.mae));
}

// 9. determinism and round-trips
void criterion_determinism(const std::string& dir) {
    Rng rng(11);
    std::string content;
    std::set<std::pair<int, int>> used;
    while (used.size() < 400) {
        std::pair<int, int> k{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(40))};
        if (!used.insert(k).second) continue;
        content += std::to_string(k.first + 1) + "::" + std::to_string(k.second + 1) + "::" +
                   std::to_string(1 + rng.below(5)) + "::0\n";
    }
    auto path = write_file(dir + "/det.dat", content);

    auto strip_runtime = [](std::string row) {
        return row.substr(0, row.rfind(','));
    };
    for (Algorithm algo : {Algorithm::zeroshot_listwise, Algorithm::mf, Algorithm::bpr,
                           Algorithm::global_mean, Algorithm::random_uniform}) {
        ExperimentConfig cfg;
        cfg.dataset_path = path;
        cfg.algo = algo;
        cfg.learning_rate = 0.01;
        cfg.d = 3;
        cfg.steps = 500;
        cfg.seed = 9;
        cfg.split = SplitSpec{0.8, 9};
        cfg.k = 5;
        auto a = run_experiment(cfg);
        auto b = run_experiment(cfg);
        auto row_a = split_view(reports_to_csv({&a, 1}), "\n")[1];
        auto row_b = split_view(reports_to_csv({&b, 1}), "\n")[1];
        expect(strip_runtime(std::string(row_a)) == strip_runtime(std::string(row_b)),
               std::string("rows differ for ") + to_string(algo));

        auto parsed = reports_from_csv(reports_to_csv({&a, 1}));
        expect(parsed.size() == 1, "csv row count");
        expect(rel_err(parsed[0].mae, a.mae) <= 1e-6 &&
                   rel_err(parsed[0].matthew_degree + 1.0, a.matthew_degree + 1.0) <= 1e-6,
               "csv does not round-trip to 6 significant digits");
    }

    auto model = train_zeroshot(30, 40, TrainConfig{0.004, 3000, 3, 13, 1e-3}, 1.0, 5.0);
    auto model_path = dir + "/det.model";
    save_model(model, model_path);
    auto loaded = load_model(model_path);
    expect(loaded.u == model.u && loaded.v == model.v, "model dump is not bit-exact");
    expect(model_to_text(loaded) == model_to_text(model), "model text differs after reload");
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void()> body;
};

} // namespace

int main() {
    const std::string dir = scratch_dir();
    std::vector<Criterion> criteria = {
        {1, "gradient correctness (finite differences + collapsed form)", 1.0,
         criterion_gradient},
        {2, "ascent monotonicity over 500 full sweeps", 5.0, criterion_ascent},
        {3, "zeroshot structure under rating permutations", 10.0,
         [&] { criterion_zeroshot_structure(dir); }},
        {4, "order-statistic density normalization (theorem check)", 30.0, criterion_orderstat},
        {5, "MF baseline on planted rank-2 data", 30.0, criterion_mf},
        {6, "metric oracles (MAE, log-log slope, Matthew degree)", 5.0, criterion_metrics},
        {7, "BPR probability symmetry and margin ascent", 5.0, criterion_bpr},
        {8, "desk-scale sweep beats the random baseline", 300.0,
         [&] { criterion_end_to_end(dir); }},
        {9, "determinism and round-trips", 60.0, [&] { criterion_determinism(dir); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (error.empty() && secs > c.budget_seconds)
            error = "runtime " + format_double(secs) + "s exceeds " +
                    format_double(c.budget_seconds) + "s";
        if (error.empty()) {
            std::printf("[PASS] criterion %d: %s (%.2fs)\n", c.id, c.name.c_str(), secs);
        } else {
            ++failures;
            std::printf("[FAIL] criterion %d: %s (%.2fs) -- %s\n", c.id, c.name.c_str(), secs,
                        error.c_str());
        }
        std::fflush(stdout);
    }

    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
