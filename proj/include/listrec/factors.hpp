#ifndef LISTREC_FACTORS_HPP
#define LISTREC_FACTORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "listrec/errors.hpp"
#include "listrec/rng.hpp"
#include "listrec/util.hpp"

namespace listrec {

// Latent factor matrices U (n_users x d) and V (n_items x d), row-major.
// Constrained models keep every entry in [0, entry_cap] with
// entry_cap = sqrt(r_max / d), so every dot product stays in [0, r_max].
struct FactorModel {
    int n_users = 0;
    int n_items = 0;
    int d = 0;
    double r_min = 0.0;
    double r_max = 0.0;
    double entry_cap = 0.0;
    bool constrained = false;
    std::vector<double> u;
    std::vector<double> v;

    std::span<double> user_row(int i) { return {u.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)}; }
    std::span<const double> user_row(int i) const { return {u.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)}; }
    std::span<double> item_row(int j) { return {v.data() + static_cast<std::size_t>(j) * d, static_cast<std::size_t>(d)}; }
    std::span<const double> item_row(int j) const { return {v.data() + static_cast<std::size_t>(j) * d, static_cast<std::size_t>(d)}; }

    double dot(int user, int item) const {
        const double* a = u.data() + static_cast<std::size_t>(user) * d;
        const double* b = v.data() + static_cast<std::size_t>(item) * d;
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += a[k] * b[k];
        return s;
    }

    bool all_finite() const {
        for (double x : u)
            if (!std::isfinite(x)) return false;
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

enum class InitMode {
    uniform_capped, // entries ~ Uniform[0, entry_cap]; constrained
    gaussian,       // entries ~ Normal(0, 0.1); unconstrained
};

struct InitSpec {
    std::uint64_t seed = 0;
    InitMode mode = InitMode::uniform_capped;
};

inline FactorModel init_factors(int n_users, int n_items, int d, double r_min, double r_max,
                                const InitSpec& spec) {
    if (n_users < 1 || n_items < 1 || d < 1)
        throw UsageError("init_factors needs n_users, n_items, d >= 1");
    if (!(r_min < r_max)) throw UsageError("invalid rating scale: r_min must be < r_max");

    FactorModel m;
    m.n_users = n_users;
    m.n_items = n_items;
    m.d = d;
    m.r_min = r_min;
    m.r_max = r_max;
    m.entry_cap = std::sqrt(r_max / d);
    m.constrained = spec.mode == InitMode::uniform_capped;
    m.u.resize(static_cast<std::size_t>(n_users) * d);
    m.v.resize(static_cast<std::size_t>(n_items) * d);

    Rng rng(spec.seed);
    if (spec.mode == InitMode::uniform_capped) {
        for (double& x : m.u) x = rng.uniform(0.0, m.entry_cap);
        for (double& x : m.v) x = rng.uniform(0.0, m.entry_cap);
    } else {
        for (double& x : m.u) x = rng.gaussian(0.0, 0.1);
        for (double& x : m.v) x = rng.gaussian(0.0, 0.1);
    }
    return m;
}

// Dot product clamped to the rating scale.
inline double predict_rating(const FactorModel& m, int user, int item) {
    if (user < 0 || user >= m.n_users) throw UsageError("user index out of range");
    if (item < 0 || item >= m.n_items) throw UsageError("item index out of range");
    return std::clamp(m.dot(user, item), m.r_min, m.r_max);
}

// Clamps every entry to [0, entry_cap]. Idempotent.
inline void project(FactorModel& m) {
    if (!m.constrained) throw UsageError("project requires a constrained model");
    for (double& x : m.u) x = std::clamp(x, 0.0, m.entry_cap);
    for (double& x : m.v) x = std::clamp(x, 0.0, m.entry_cap);
}

// --- persistence -----------------------------------------------------------
// Text dump with hex floats; round-trips bit-exactly.

inline std::string model_to_text(const FactorModel& m) {
    std::string out = "listrec-model 1\n";
    out += std::string(m.constrained ? "constrained" : "unconstrained") + " " +
           std::to_string(m.n_users) + " " + std::to_string(m.n_items) + " " +
           std::to_string(m.d) + "\n";
    out += format_double_hex(m.r_min) + " " + format_double_hex(m.r_max) + " " +
           format_double_hex(m.entry_cap) + "\n";
    auto rows = [&out](const std::vector<double>& mat, int n, int d) {
        for (int r = 0; r < n; ++r) {
            for (int k = 0; k < d; ++k) {
                if (k) out += " ";
                out += format_double_hex(mat[static_cast<std::size_t>(r) * d + k]);
            }
            out += "\n";
        }
    };
    rows(m.u, m.n_users, m.d);
    rows(m.v, m.n_items, m.d);
    return out;
}

inline void save_model(const FactorModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << model_to_text(m);
    if (!out) throw DataError("failed writing model file: " + path);
}

inline FactorModel model_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw DataError("truncated model dump");
        return std::string_view(line);
    };
    if (next_line() != "listrec-model 1") throw DataError("not a listrec model dump (bad version tag)");

    auto head = split_view(next_line(), " ");
    if (head.size() != 4) throw DataError("malformed model header");
    FactorModel m;
    if (head[0] == "constrained")
        m.constrained = true;
    else if (head[0] == "unconstrained")
        m.constrained = false;
    else
        throw DataError("malformed model header: '" + std::string(head[0]) + "'");
    m.n_users = static_cast<int>(parse_int(head[1], "n_users"));
    m.n_items = static_cast<int>(parse_int(head[2], "n_items"));
    m.d = static_cast<int>(parse_int(head[3], "d"));
    if (m.n_users < 1 || m.n_items < 1 || m.d < 1) throw DataError("malformed model dimensions");

    auto scale = split_view(next_line(), " ");
    if (scale.size() != 3) throw DataError("malformed model scale line");
    m.r_min = parse_double_hex(scale[0], "r_min");
    m.r_max = parse_double_hex(scale[1], "r_max");
    m.entry_cap = parse_double_hex(scale[2], "entry_cap");

    auto rows = [&](std::vector<double>& mat, int n, int d) {
        mat.resize(static_cast<std::size_t>(n) * d);
        for (int r = 0; r < n; ++r) {
            auto fields = split_view(next_line(), " ");
            if (static_cast<int>(fields.size()) != d) throw DataError("malformed model row");
            for (int k = 0; k < d; ++k)
                mat[static_cast<std::size_t>(r) * d + k] = parse_double_hex(fields[k], "entry");
        }
    };
    rows(m.u, m.n_users, m.d);
    rows(m.v, m.n_items, m.d);
    return m;
}

inline FactorModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_text(buf.str());
}

} // namespace listrec

#endif // LISTREC_FACTORS_HPP
