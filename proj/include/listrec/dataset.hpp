#ifndef LISTREC_DATASET_HPP
#define LISTREC_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "listrec/errors.hpp"
#include "listrec/rng.hpp"
#include "listrec/util.hpp"

namespace listrec {

// One observed rating. Indices are dense and 0-based.
struct Rating {
    int user = 0;
    int item = 0;
    double value = 0.0;
};

enum class DataFormat { movielens_dat, csv };

inline const char* to_string(DataFormat f) {
    return f == DataFormat::movielens_dat ? "movielens_dat" : "csv";
}

inline DataFormat parse_format(std::string_view s) {
    if (s == "movielens_dat") return DataFormat::movielens_dat;
    if (s == "csv") return DataFormat::csv;
    throw UsageError("unknown dataset format: '" + std::string(s) + "'");
}

// Column names for the csv loader; defaults match MovieLens csv exports.
struct ColumnSpec {
    std::string user = "userId";
    std::string item = "itemId";
    std::string rating = "rating";
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

// Immutable sparse user-item rating table. At most one rating per (user, item),
// dense 0-based indices, values inside [r_min, r_max].
class RatingsDataset {
public:
    RatingsDataset() = default;

    // In-memory construction for synthetic data; labels are the decimal indices.
    static RatingsDataset make(int n_users, int n_items, std::vector<Rating> ratings,
                               double r_min, double r_max) {
        RatingsDataset ds;
        ds.n_users_ = n_users;
        ds.n_items_ = n_items;
        ds.r_min_ = r_min;
        ds.r_max_ = r_max;
        ds.ratings_ = std::move(ratings);
        ds.user_labels_.reserve(n_users);
        for (int u = 0; u < n_users; ++u) ds.user_labels_.push_back(std::to_string(u));
        ds.item_labels_.reserve(n_items);
        for (int i = 0; i < n_items; ++i) ds.item_labels_.push_back(std::to_string(i));
        ds.rebuild_maps();
        ds.validate();
        return ds;
    }

    const std::vector<Rating>& ratings() const { return ratings_; }
    int n_users() const { return n_users_; }
    int n_items() const { return n_items_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    bool integral_scale() const { return is_integral_value(r_min_) && is_integral_value(r_max_); }

    const std::string& user_label(int u) const { return user_labels_.at(u); }
    const std::string& item_label(int i) const { return item_labels_.at(i); }

    std::optional<int> user_index(const std::string& label) const {
        auto it = user_map_.find(label);
        if (it == user_map_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> item_index(const std::string& label) const {
        auto it = item_map_.find(label);
        if (it == item_map_.end()) return std::nullopt;
        return it->second;
    }

    // Observed items per user, ascending; used for top-K exclusions.
    std::vector<std::vector<int>> items_by_user() const {
        std::vector<std::vector<int>> by_user(n_users_);
        for (const Rating& r : ratings_) by_user[r.user].push_back(r.item);
        for (auto& v : by_user) std::sort(v.begin(), v.end());
        return by_user;
    }

    // Stable textual dump; equal datasets produce byte-identical text.
    std::string canonical_text() const {
        std::string out = "listrec-dataset 1\n";
        out += std::to_string(n_users_) + " " + std::to_string(n_items_) + " " +
               format_double(r_min_) + " " + format_double(r_max_) + "\n";
        for (int u = 0; u < n_users_; ++u) out += "user " + user_labels_[u] + "\n";
        for (int i = 0; i < n_items_; ++i) out += "item " + item_labels_[i] + "\n";
        for (const Rating& r : ratings_)
            out += std::to_string(r.user) + "\t" + std::to_string(r.item) + "\t" +
                   format_double(r.value) + "\n";
        return out;
    }

private:
    void rebuild_maps() {
        user_map_.clear();
        item_map_.clear();
        for (int u = 0; u < static_cast<int>(user_labels_.size()); ++u) user_map_[user_labels_[u]] = u;
        for (int i = 0; i < static_cast<int>(item_labels_.size()); ++i) item_map_[item_labels_[i]] = i;
    }

    void validate() const {
        if (n_users_ < 1 || n_items_ < 1) throw DataError("dataset needs at least one user and one item");
        if (!(r_min_ < r_max_)) throw DataError("invalid rating scale: r_min must be < r_max");
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(ratings_.size() * 2);
        for (const Rating& r : ratings_) {
            if (r.user < 0 || r.user >= n_users_ || r.item < 0 || r.item >= n_items_)
                throw DataError("rating index out of range");
            if (r.value < r_min_ || r.value > r_max_)
                throw DataError("rating value " + format_double(r.value) + " outside scale [" +
                                format_double(r_min_) + ", " + format_double(r_max_) + "]");
            std::uint64_t key = (static_cast<std::uint64_t>(r.user) << 32) |
                                static_cast<std::uint32_t>(r.item);
            if (!seen.insert(key).second)
                throw DataError("duplicate rating for user " + user_labels_[r.user] + ", item " +
                                item_labels_[r.item]);
        }
    }

    friend RatingsDataset load_ratings(const std::string&, DataFormat,
                                       const std::optional<ColumnSpec>&,
                                       const std::optional<std::pair<double, double>>&);
    friend std::pair<RatingsDataset, RatingsDataset> split_train_test(const RatingsDataset&,
                                                                       const SplitSpec&);

    std::vector<Rating> ratings_;
    int n_users_ = 0;
    int n_items_ = 0;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
    std::vector<std::string> user_labels_;
    std::vector<std::string> item_labels_;
    std::unordered_map<std::string, int> user_map_;
    std::unordered_map<std::string, int> item_map_;
};

namespace detail {

inline int intern_id(std::string_view label, std::unordered_map<std::string, int>& map,
                     std::vector<std::string>& labels) {
    auto it = map.find(std::string(label));
    if (it != map.end()) return it->second;
    int idx = static_cast<int>(labels.size());
    labels.emplace_back(label);
    map.emplace(labels.back(), idx);
    return idx;
}

} // namespace detail

// Loads MovieLens `.dat` (UserID::MovieID::Rating::Timestamp) or headered csv.
// Original ids are remapped to dense 0-based indices in order of first
// appearance; row order is preserved. Scale defaults: [1, 5] for movielens_dat,
// observed [min, max] for csv; `scale` overrides either.
inline RatingsDataset load_ratings(const std::string& path, DataFormat format,
                                   const std::optional<ColumnSpec>& columns = std::nullopt,
                                   const std::optional<std::pair<double, double>>& scale = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read dataset file: " + path);

    RatingsDataset ds;
    std::vector<long> line_numbers;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    long line_no = 0;

    auto add_rating = [&](std::string_view user, std::string_view item, double value) {
        int u = detail::intern_id(user, ds.user_map_, ds.user_labels_);
        int i = detail::intern_id(item, ds.item_map_, ds.item_labels_);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
        if (!seen.insert(key).second)
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate rating for user '" +
                            std::string(user) + "', item '" + std::string(item) + "'");
        ds.ratings_.push_back(Rating{u, i, value});
        line_numbers.push_back(line_no);
    };

    if (format == DataFormat::movielens_dat) {
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view sv = strip_cr(line);
            if (sv.empty()) continue;
            auto fields = split_view(sv, "::");
            if (fields.size() != 4)
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": expected UserID::MovieID::Rating::Timestamp, got " +
                                std::to_string(fields.size()) + " fields");
            const std::string where = path + ":" + std::to_string(line_no);
            double value = parse_double(fields[2], where + " rating");
            parse_int(fields[3], where + " timestamp"); // parsed, then discarded
            add_rating(fields[0], fields[1], value);
        }
    } else {
        ColumnSpec cols = columns.value_or(ColumnSpec{});
        if (!std::getline(in, line)) throw DataError(path + ": no ratings (empty file)");
        ++line_no;
        auto header = split_view(strip_cr(line), ",");
        auto col_of = [&](const std::string& name) {
            for (std::size_t c = 0; c < header.size(); ++c)
                if (header[c] == name) return c;
            throw DataError(path + ": column '" + name + "' not found in csv header");
        };
        std::size_t uc = col_of(cols.user), ic = col_of(cols.item), rc = col_of(cols.rating);
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view sv = strip_cr(line);
            if (sv.empty()) continue;
            auto fields = split_view(sv, ",");
            if (fields.size() != header.size())
                throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
            const std::string where = path + ":" + std::to_string(line_no);
            double value = parse_double(fields[rc], where + " rating");
            add_rating(fields[uc], fields[ic], value);
        }
    }

    if (ds.ratings_.empty()) throw DataError(path + ": no ratings");

    if (scale) {
        ds.r_min_ = scale->first;
        ds.r_max_ = scale->second;
    } else if (format == DataFormat::movielens_dat) {
        ds.r_min_ = 1.0;
        ds.r_max_ = 5.0;
    } else {
        double lo = ds.ratings_.front().value, hi = lo;
        for (const Rating& r : ds.ratings_) {
            lo = std::min(lo, r.value);
            hi = std::max(hi, r.value);
        }
        if (lo == hi) hi = lo + 1.0; // keep r_min < r_max for single-valued data
        ds.r_min_ = lo;
        ds.r_max_ = hi;
    }
    if (!(ds.r_min_ < ds.r_max_)) throw UsageError("invalid rating scale: r_min must be < r_max");

    for (std::size_t idx = 0; idx < ds.ratings_.size(); ++idx) {
        double v = ds.ratings_[idx].value;
        if (v < ds.r_min_ || v > ds.r_max_)
            throw DataError(path + ":" + std::to_string(line_numbers[idx]) + ": rating " +
                            format_double(v) + " outside scale [" + format_double(ds.r_min_) +
                            ", " + format_double(ds.r_max_) + "]");
    }

    ds.n_users_ = static_cast<int>(ds.user_labels_.size());
    ds.n_items_ = static_cast<int>(ds.item_labels_.size());
    return ds;
}

// Disjoint seeded partition with |train| = round(fraction * |ratings|).
// Both halves keep the full N, M, scale and id maps; each half preserves the
// original rating order.
inline std::pair<RatingsDataset, RatingsDataset> split_train_test(const RatingsDataset& ds,
                                                                   const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw UsageError("train_fraction must be in (0, 1)");
    const std::size_t n = ds.ratings().size();
    if (n == 0) throw DataError("cannot split an empty dataset");

    auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw DataError("split leaves an empty half (" + std::to_string(n_train) + " of " +
                        std::to_string(n) + " in train)");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(order);

    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

    RatingsDataset train = ds, test = ds;
    train.ratings_.clear();
    test.ratings_.clear();
    for (std::size_t i = 0; i < n; ++i)
        (in_train[i] ? train.ratings_ : test.ratings_).push_back(ds.ratings()[i]);
    return {std::move(train), std::move(test)};
}

// Counts per distinct rating value; keys ascend.
inline std::map<double, std::size_t> rating_histogram(const RatingsDataset& ds) {
    if (ds.ratings().empty()) throw DataError("cannot build a histogram of an empty dataset");
    std::map<double, std::size_t> hist;
    for (const Rating& r : ds.ratings()) ++hist[r.value];
    return hist;
}

} // namespace listrec

#endif // LISTREC_DATASET_HPP
