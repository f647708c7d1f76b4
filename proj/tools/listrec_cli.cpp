// listrec command-line driver: train / eval / sweep / recommend /
// orderstat-check over the library. Exit codes: 0 ok, 1 usage error,
// 2 data error, 3 numeric failure, 4 partial sweep failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "listrec/listrec.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
    std::string config_path;
    std::string dataset;
    std::string format = "movielens_dat";
    std::string algo = "zeroshot_listwise";
    std::string lr_text; // single value or comma list
    int dim = 8;
    std::int64_t steps = 0;
    std::uint64_t seed = 42;
    int k = 10;
    double split = 0.8;
    double eps = 1e-3;
    std::optional<double> scale_min;
    std::optional<double> scale_max;
    std::string user_col = "userId";
    std::string item_col = "itemId";
    std::string rating_col = "rating";
    std::string out;
    std::string model;
    std::string report = "csv";
    std::string svg_metric = "mae";
    std::string user; // original user id for `recommend`
};

std::vector<double> parse_lr_list(const std::string& text) {
    std::vector<double> out;
    for (auto part : listrec::split_view(text, ","))
        out.push_back(listrec::parse_double(part, "--lr"));
    return out;
}

// Flat JSON config; any CLI flag passed explicitly overrides the file value.
void apply_config_file(CliOptions& o, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw listrec::DataError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw listrec::DataError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw listrec::DataError("config file must hold a JSON object");

    auto str = [&](const char* key, std::string& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::string>();
    };
    str("dataset", o.dataset);
    str("format", o.format);
    str("algo", o.algo);
    str("out", o.out);
    str("model", o.model);
    str("report", o.report);
    str("svg_metric", o.svg_metric);
    str("user_col", o.user_col);
    str("item_col", o.item_col);
    str("rating_col", o.rating_col);
    str("user", o.user);
    if (j.contains("lr")) {
        const auto& v = j.at("lr");
        if (v.is_string()) {
            o.lr_text = v.get<std::string>();
        } else if (v.is_array()) {
            std::string txt;
            for (const auto& e : v) {
                if (!txt.empty()) txt += ",";
                txt += listrec::format_double(e.get<double>());
            }
            o.lr_text = txt;
        } else {
            o.lr_text = listrec::format_double(v.get<double>());
        }
    }
    if (j.contains("dim")) o.dim = j.at("dim").get<int>();
    if (j.contains("steps")) o.steps = j.at("steps").get<std::int64_t>();
    if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("k")) o.k = j.at("k").get<int>();
    if (j.contains("split")) o.split = j.at("split").get<double>();
    if (j.contains("eps")) o.eps = j.at("eps").get<double>();
    if (j.contains("scale_min")) o.scale_min = j.at("scale_min").get<double>();
    if (j.contains("scale_max")) o.scale_max = j.at("scale_max").get<double>();
}

void add_experiment_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--dataset", o.dataset, "path to the ratings file");
    cmd->add_option("--format", o.format, "movielens_dat|csv")
        ->check(CLI::IsMember({"movielens_dat", "csv"}));
    cmd->add_option("--algo", o.algo,
                    "zeroshot_listwise|mf|bpr|global_mean|user_mean|item_mean|random_uniform");
    cmd->add_option("--lr", o.lr_text, "learning rate (or comma list for sweep)");
    cmd->add_option("--dim", o.dim, "latent dimension");
    cmd->add_option("--steps", o.steps, "step/epoch budget; 0 = per-algorithm default");
    cmd->add_option("--seed", o.seed, "master seed (also seeds the split)");
    cmd->add_option("--k", o.k, "top-K size for the Matthew degree");
    cmd->add_option("--split", o.split, "train fraction in (0,1)");
    cmd->add_option("--eps", o.eps, "lower clamp on dot products in the listwise objective");
    cmd->add_option("--scale-min", o.scale_min, "rating scale lower bound override");
    cmd->add_option("--scale-max", o.scale_max, "rating scale upper bound override");
    cmd->add_option("--user-col", o.user_col, "csv user column name");
    cmd->add_option("--item-col", o.item_col, "csv item column name");
    cmd->add_option("--rating-col", o.rating_col, "csv rating column name");
    cmd->add_option("--out", o.out, "output path");
}

listrec::ExperimentConfig to_experiment_config(const CliOptions& o) {
    listrec::ExperimentConfig cfg;
    if (o.dataset.empty()) throw listrec::UsageError("--dataset is required");
    cfg.dataset_path = o.dataset;
    cfg.format = listrec::parse_format(o.format);
    cfg.columns = listrec::ColumnSpec{o.user_col, o.item_col, o.rating_col};
    if (o.scale_min.has_value() != o.scale_max.has_value())
        throw listrec::UsageError("--scale-min and --scale-max must be given together");
    if (o.scale_min) cfg.scale_override = std::make_pair(*o.scale_min, *o.scale_max);
    cfg.algo = listrec::parse_algorithm(o.algo);
    if (!o.lr_text.empty()) {
        auto rates = parse_lr_list(o.lr_text);
        if (rates.empty()) throw listrec::UsageError("--lr list is empty");
        cfg.learning_rate = rates.front();
        cfg.lr_grid = rates;
    }
    cfg.d = o.dim;
    cfg.steps = o.steps;
    cfg.seed = o.seed;
    cfg.eps = o.eps;
    cfg.split = listrec::SplitSpec{o.split, o.seed};
    cfg.k = o.k;
    return cfg;
}

void emit_reports(const CliOptions& o, const std::vector<listrec::MetricsReport>& reports) {
    const std::string csv = listrec::reports_to_csv(reports);
    if (o.out.empty())
        std::cout << csv;
    else
        listrec::write_text_file(o.out, csv);

    if (o.report == "svg" || o.report == "both") {
        if (o.out.empty())
            throw listrec::UsageError("--report " + o.report + " needs --out to derive the svg path");
        std::string svg_path = o.out;
        auto dot = svg_path.find_last_of('.');
        if (dot != std::string::npos && dot > svg_path.find_last_of('/') + 1)
            svg_path = svg_path.substr(0, dot);
        svg_path += ".svg";
        listrec::write_text_file(svg_path, listrec::reports_to_svg(reports, o.svg_metric));
        std::cerr << "wrote " << svg_path << "\n";
    } else if (o.report != "csv") {
        throw listrec::UsageError("--report must be csv, svg or both");
    }
}

int cmd_train(const CliOptions& o) {
    auto cfg = to_experiment_config(o);
    if (listrec::is_heuristic(cfg.algo))
        throw listrec::UsageError("heuristic algorithms have no model to save");
    if (o.out.empty()) throw listrec::UsageError("train needs --out <model path>");
    auto ds = listrec::load_ratings(cfg.dataset_path, cfg.format, cfg.columns, cfg.scale_override);
    auto [train, test] = listrec::split_train_test(ds, cfg.split);
    (void)test;
    const std::int64_t steps = listrec::resolve_steps(cfg, ds, train.ratings().size());
    auto trained = listrec::train_algorithm(cfg, ds, train, steps);
    listrec::save_model(*trained.model, o.out);
    std::cout << "saved model to " << o.out << " (algo=" << listrec::to_string(cfg.algo)
              << ", steps=" << steps << ")\n";
    return listrec::exit_ok;
}

int cmd_eval(const CliOptions& o) {
    auto cfg = to_experiment_config(o);
    auto ds = listrec::load_ratings(cfg.dataset_path, cfg.format, cfg.columns, cfg.scale_override);
    listrec::MetricsReport rep;
    if (!o.model.empty()) {
        const auto t0 = std::chrono::steady_clock::now();
        auto [train, test] = listrec::split_train_test(ds, cfg.split);
        auto trained =
            listrec::predictor_from_model(cfg.algo, listrec::load_model(o.model), train);
        rep = listrec::evaluate_predictor(cfg, trained, train, test, cfg.steps, t0);
    } else {
        rep = listrec::run_experiment(cfg, ds);
    }
    emit_reports(o, {rep});
    return listrec::exit_ok;
}

int cmd_sweep(const CliOptions& o) {
    auto cfg = to_experiment_config(o);
    auto outcome = listrec::sweep(cfg);
    emit_reports(o, outcome.reports);
    for (std::size_t i = 0; i < outcome.errors.size(); ++i)
        if (!outcome.errors[i].empty())
            std::cerr << "sweep point lr=" << listrec::format_double(outcome.reports[i].lr)
                      << " failed: " << outcome.errors[i] << "\n";
    return outcome.any_failed() ? listrec::exit_partial_sweep : listrec::exit_ok;
}

int cmd_recommend(const CliOptions& o) {
    auto cfg = to_experiment_config(o);
    if (o.user.empty()) throw listrec::UsageError("recommend needs --user <original user id>");
    auto ds = listrec::load_ratings(cfg.dataset_path, cfg.format, cfg.columns, cfg.scale_override);
    auto user = ds.user_index(o.user);
    if (!user) throw listrec::DataError("unknown user id: '" + o.user + "'");

    // recommend works on the full dataset: train on everything, exclude seen items
    listrec::TrainedPredictor trained;
    const std::int64_t steps = listrec::resolve_steps(cfg, ds, ds.ratings().size());
    if (!o.model.empty())
        trained = listrec::predictor_from_model(cfg.algo, listrec::load_model(o.model), ds);
    else
        trained = listrec::train_algorithm(cfg, ds, ds, steps);

    auto by_user = ds.items_by_user();
    std::unordered_set<int> exclude(by_user[*user].begin(), by_user[*user].end());
    auto items = listrec::topk_recommend(
        [&](int u, int i) { return trained.rank_score_fn(u, i); }, ds.n_items(), *user, cfg.k,
        exclude);
    for (int item : items) std::cout << ds.item_label(item) << "\n";
    return listrec::exit_ok;
}

int cmd_orderstat_check(const std::string& family, double a, double b, double alpha, int n,
                        std::int64_t samples, std::uint64_t seed) {
    listrec::DensitySpec spec;
    if (family == "uniform")
        spec = listrec::DensitySpec::uniform(a, b);
    else if (family == "power")
        spec = listrec::DensitySpec::power(alpha, a, b);
    else
        throw listrec::UsageError("--family must be uniform or power");
    auto est = listrec::normalization_check(spec, n, samples, seed);
    std::cout << "orderstat-check family=" << family << " n=" << n << " samples=" << samples
              << " estimate=" << listrec::format_double(est.value)
              << " std_error=" << listrec::format_double(est.std_error) << "\n";
    return listrec::exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"listwise zeroshot recommender experiments"};
    app.require_subcommand(1);

    CliOptions o;

    // pre-pass: config file values become defaults, flags still win
    for (int i = 1; i + 1 <= argc; ++i) {
        std::string arg = argv[i] ? argv[i] : "";
        if (arg == "--config" && i + 1 < argc) {
            o.config_path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            o.config_path = arg.substr(9);
        }
    }
    try {
        if (!o.config_path.empty()) apply_config_file(o, o.config_path);
    } catch (const listrec::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return listrec::exit_data;
    }

    auto* train_cmd = app.add_subcommand("train", "train a model and save it");
    add_experiment_flags(train_cmd, o);
    auto* eval_cmd = app.add_subcommand("eval", "train (or load) a model and report MAE + Matthew degree");
    add_experiment_flags(eval_cmd, o);
    eval_cmd->add_option("--model", o.model, "load this model dump instead of training");
    eval_cmd->add_option("--report", o.report, "csv|svg|both");
    eval_cmd->add_option("--svg-metric", o.svg_metric, "mae|matthew_degree");
    auto* sweep_cmd = app.add_subcommand("sweep", "run the learning-rate grid and emit a report");
    add_experiment_flags(sweep_cmd, o);
    sweep_cmd->add_option("--report", o.report, "csv|svg|both");
    sweep_cmd->add_option("--svg-metric", o.svg_metric, "mae|matthew_degree");
    auto* rec_cmd = app.add_subcommand("recommend", "print the top-K items for a user");
    add_experiment_flags(rec_cmd, o);
    rec_cmd->add_option("--model", o.model, "load this model dump instead of training");
    rec_cmd->add_option("--user", o.user, "original user id");

    auto* os_cmd = app.add_subcommand("orderstat-check",
                                      "Monte Carlo check that the order-statistic density integrates to 1");
    std::string family = "uniform";
    double os_a = 0.0, os_b = 1.0, os_alpha = 0.0;
    int os_n = 2;
    std::int64_t os_samples = 1'000'000;
    std::uint64_t os_seed = 42;
    os_cmd->add_option("--config", o.config_path, "accepted for symmetry; unused here");
    os_cmd->add_option("--family", family, "uniform|power");
    os_cmd->add_option("--a", os_a, "support lower bound");
    os_cmd->add_option("--b", os_b, "support upper bound");
    os_cmd->add_option("--alpha", os_alpha, "power exponent");
    os_cmd->add_option("--n", os_n, "sample size (1..6)");
    os_cmd->add_option("--samples", os_samples, "Monte Carlo draws (>= 1e5)");
    os_cmd->add_option("--seed", os_seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return listrec::exit_usage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(o);
        if (eval_cmd->parsed()) return cmd_eval(o);
        if (sweep_cmd->parsed()) return cmd_sweep(o);
        if (rec_cmd->parsed()) return cmd_recommend(o);
        if (os_cmd->parsed())
            return cmd_orderstat_check(family, os_a, os_b, os_alpha, os_n, os_samples, os_seed);
        throw listrec::UsageError("no subcommand given");
    } catch (const listrec::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return listrec::exit_usage;
    } catch (const listrec::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return listrec::exit_data;
    } catch (const listrec::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return listrec::exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return listrec::exit_usage;
    }
    return listrec::exit_ok;
}
