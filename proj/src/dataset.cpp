#include "datamin/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "datamin/rng.hpp"

namespace datamin {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

bool is_missing(const std::string& cell) {
    if (cell.empty()) return true;
    if (cell.size() == 3) {
        return (cell[0] == 'n' || cell[0] == 'N') &&
               (cell[1] == 'a' || cell[1] == 'A') &&
               (cell[2] == 'n' || cell[2] == 'N');
    }
    return false;
}

// Parses a finite double covering the whole cell; returns false otherwise.
bool parse_numeric(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) return false;
    if (!std::isfinite(value)) return false;
    out = value;
    return true;
}

void format_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

Labeling make_labeling(const std::vector<std::string>& raw) {
    if (raw.empty()) throw std::invalid_argument("labeling must be non-empty");
    std::vector<std::string> values(raw);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        index.emplace(values[i], static_cast<std::uint32_t>(i));
    }
    Labeling out;
    out.values = std::move(values);
    out.ids.reserve(raw.size());
    for (const auto& v : raw) out.ids.push_back(index.at(v));
    return out;
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(f.name);
    return names;
}

void validate(const Dataset& ds) {
    const std::size_t n = ds.task_labels.ids.size();
    if (n == 0) throw std::invalid_argument("dataset has no rows");
    if (ds.features.empty()) throw std::invalid_argument("dataset has no features");
    if (ds.user_labels.ids.size() != n) {
        throw std::invalid_argument("user labels length differs from task labels");
    }
    if (ds.task_labels.values.empty() || ds.user_labels.values.empty()) {
        throw std::invalid_argument("labelings must have at least one distinct value");
    }
    std::unordered_set<std::string> names;
    for (const auto& f : ds.features) {
        if (f.values.size() != n) {
            throw std::invalid_argument("feature '" + f.name +
                                        "' length differs from row count");
        }
        if (!names.insert(f.name).second) {
            throw std::invalid_argument("duplicate feature name '" + f.name + "'");
        }
        for (double v : f.values) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("feature '" + f.name +
                                            "' contains a non-finite value");
            }
        }
    }
    for (auto id : ds.task_labels.ids) {
        if (id >= ds.task_labels.values.size()) {
            throw std::invalid_argument("task label id out of range");
        }
    }
    for (auto id : ds.user_labels.ids) {
        if (id >= ds.user_labels.values.size()) {
            throw std::invalid_argument("user label id out of range");
        }
    }
}

FeatureSubset FeatureSubset::full(std::size_t d) {
    FeatureSubset s;
    s.indices.resize(d);
    for (std::size_t i = 0; i < d; ++i) s.indices[i] = i;
    return s;
}

void validate(const FeatureSubset& s, std::size_t d) {
    if (s.indices.empty()) throw std::invalid_argument("feature subset is empty");
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        if (s.indices[i] >= d) {
            throw std::invalid_argument("feature index " +
                                        std::to_string(s.indices[i]) +
                                        " out of range for dimension " +
                                        std::to_string(d));
        }
        if (i > 0 && s.indices[i] <= s.indices[i - 1]) {
            throw std::invalid_argument("feature subset indices must be strictly increasing");
        }
    }
}

Dataset load_csv(const std::string& path, const std::string& task_column,
                 const std::string& user_column, NaPolicy na_policy) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
    const std::vector<std::string> header = split_line(line);

    std::size_t task_idx = header.size();
    std::size_t user_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == task_column) task_idx = i;
        if (header[i] == user_column) user_idx = i;
    }
    if (task_idx == header.size()) {
        throw std::runtime_error("column '" + task_column + "' not found in header");
    }
    if (user_idx == header.size()) {
        throw std::runtime_error("column '" + user_column + "' not found in header");
    }
    if (task_idx == user_idx) {
        throw std::runtime_error("task and user columns must differ");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != task_idx && i != user_idx) feature_cols.push_back(i);
    }
    if (feature_cols.empty()) {
        throw std::runtime_error("'" + path + "' has no feature columns");
    }

    std::vector<std::vector<double>> columns(feature_cols.size());
    std::vector<std::string> task_raw;
    std::vector<std::string> user_raw;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        }

        bool drop = false;
        std::vector<double> row_values(feature_cols.size());
        for (std::size_t c = 0; c < feature_cols.size() && !drop; ++c) {
            const std::string& cell = cells[feature_cols[c]];
            if (is_missing(cell)) {
                if (na_policy == NaPolicy::error) {
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": missing value in column '" +
                                             header[feature_cols[c]] + "'");
                }
                drop = true;
            } else if (!parse_numeric(cell, row_values[c])) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": cell '" + cell + "' in column '" +
                                         header[feature_cols[c]] +
                                         "' is not numeric");
            }
        }
        if (!drop && (is_missing(cells[task_idx]) || is_missing(cells[user_idx]))) {
            if (na_policy == NaPolicy::error) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": missing label value");
            }
            drop = true;
        }
        if (drop) continue;

        for (std::size_t c = 0; c < feature_cols.size(); ++c) {
            columns[c].push_back(row_values[c]);
        }
        task_raw.push_back(cells[task_idx]);
        user_raw.push_back(cells[user_idx]);
    }

    if (task_raw.empty()) {
        throw std::runtime_error("'" + path + "' has no usable rows after cleaning");
    }

    Dataset ds;
    ds.features.reserve(feature_cols.size());
    for (std::size_t c = 0; c < feature_cols.size(); ++c) {
        ds.features.push_back({header[feature_cols[c]], std::move(columns[c])});
    }
    ds.task_labels = make_labeling(task_raw);
    ds.user_labels = make_labeling(user_raw);
    validate(ds);
    return ds;
}

std::string to_csv(const Dataset& ds, const std::string& task_column,
                   const std::string& user_column) {
    std::string out;
    for (const auto& f : ds.features) {
        out += f.name;
        out += ',';
    }
    out += task_column;
    out += ',';
    out += user_column;
    out += '\n';
    const std::size_t n = ds.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& f : ds.features) {
            format_double(out, f.values[r]);
            out += ',';
        }
        out += ds.task_labels.value_of(r);
        out += ',';
        out += ds.user_labels.value_of(r);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& task_column, const std::string& user_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_csv(ds, task_column, user_column);
}

Dataset project(const Dataset& ds, const FeatureSubset& s) {
    validate(s, ds.dim());
    Dataset out;
    out.features.reserve(s.indices.size());
    for (std::size_t idx : s.indices) out.features.push_back(ds.features[idx]);
    out.task_labels = ds.task_labels;
    out.user_labels = ds.user_labels;
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    const std::size_t n = ds.rows();
    if (n < 2) throw std::invalid_argument("split requires at least 2 rows");
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must lie in (0,1)");
    }

    const std::size_t user_card = ds.user_labels.cardinality();
    auto stratum_of = [&](std::size_t row) -> std::uint64_t {
        switch (spec.stratify_on) {
            case StratifyOn::task:
                return ds.task_labels.ids[row];
            case StratifyOn::user:
                return ds.user_labels.ids[row];
            case StratifyOn::joint:
                return static_cast<std::uint64_t>(ds.task_labels.ids[row]) * user_card +
                       ds.user_labels.ids[row];
        }
        return 0;
    };

    std::map<std::uint64_t, std::vector<std::size_t>> strata;
    for (std::size_t r = 0; r < n; ++r) strata[stratum_of(r)].push_back(r);

    std::vector<char> in_test(n, 0);
    // Per stratum: shuffled order, then test takes its first round(k * f) rows.
    struct StratumPick {
        std::uint64_t key;
        std::vector<std::size_t> order;
        std::size_t n_test;
    };
    std::vector<StratumPick> picks;
    picks.reserve(strata.size());
    std::size_t total_test = 0;
    for (auto& [key, rows] : strata) {
        Rng rng(mix_seed(spec.seed, key));
        std::vector<std::size_t> order = rows;
        rng.shuffle(order);
        auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(order.size()) * spec.test_fraction));
        n_test = std::min(n_test, order.size());
        total_test += n_test;
        picks.push_back({key, std::move(order), n_test});
    }

    // Keep both partitions non-empty; move one row in the largest stratum.
    auto largest = [&](bool want_train_rows) -> StratumPick* {
        StratumPick* best = nullptr;
        std::size_t best_count = 0;
        for (auto& p : picks) {
            const std::size_t count =
                want_train_rows ? p.order.size() - p.n_test : p.n_test;
            if (count > best_count) {
                best_count = count;
                best = &p;
            }
        }
        return best;
    };
    if (total_test == 0) {
        StratumPick* p = largest(true);
        p->n_test += 1;
        total_test = 1;
    } else if (total_test == n) {
        StratumPick* p = largest(false);
        p->n_test -= 1;
        total_test = n - 1;
    }

    for (const auto& p : picks) {
        for (std::size_t i = 0; i < p.n_test; ++i) in_test[p.order[i]] = 1;
    }

    auto take = [&](bool test) {
        Dataset out;
        out.features.reserve(ds.features.size());
        for (const auto& f : ds.features) {
            FeatureColumn col;
            col.name = f.name;
            col.values.reserve(test ? total_test : n - total_test);
            for (std::size_t r = 0; r < n; ++r) {
                if ((in_test[r] != 0) == test) col.values.push_back(f.values[r]);
            }
            out.features.push_back(std::move(col));
        }
        out.task_labels.values = ds.task_labels.values;
        out.user_labels.values = ds.user_labels.values;
        for (std::size_t r = 0; r < n; ++r) {
            if ((in_test[r] != 0) == test) {
                out.task_labels.ids.push_back(ds.task_labels.ids[r]);
                out.user_labels.ids.push_back(ds.user_labels.ids[r]);
            }
        }
        return out;
    };

    return {take(false), take(true)};
}

std::string dataset_fingerprint(const Dataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix_string = [&](const std::string& s) {
        mix_bytes(s.data(), s.size());
        mix_bytes("\x1f", 1);
    };
    for (const auto& f : ds.features) {
        mix_string(f.name);
        mix_bytes(f.values.data(), f.values.size() * sizeof(double));
    }
    for (const auto& v : ds.task_labels.values) mix_string(v);
    mix_bytes(ds.task_labels.ids.data(),
              ds.task_labels.ids.size() * sizeof(std::uint32_t));
    for (const auto& v : ds.user_labels.values) mix_string(v);
    mix_bytes(ds.user_labels.ids.data(),
              ds.user_labels.ids.size() * sizeof(std::uint32_t));

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace datamin
