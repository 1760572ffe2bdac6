#include "datamin/synthbench.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

#include "datamin/rng.hpp"

namespace datamin {

namespace {

using json = nlohmann::ordered_json;

void check_spec(const SynthSpec& spec) {
    if (spec.n_rows < 1) throw std::invalid_argument("n_rows must be >= 1");
    if (spec.n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");
    if (spec.n_users < 2) throw std::invalid_argument("n_users must be >= 2");
    if (spec.total_features() < 1) {
        throw std::invalid_argument("at least one feature is required");
    }
    if (!(spec.signal_strength > 0.0 && spec.signal_strength <= 1.0)) {
        throw std::invalid_argument("signal_strength must lie in (0,1]");
    }
}

// zero-padded so lexicographic label order equals numeric order
std::string padded(const char* prefix, std::size_t value, std::size_t width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, static_cast<int>(width),
                  value);
    return buf;
}

}  // namespace

Dataset generate(const SynthSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    const std::size_t n = spec.n_rows;

    std::vector<std::uint32_t> task_idx(n);
    std::vector<std::uint32_t> user_idx(n);
    for (std::size_t r = 0; r < n; ++r) {
        task_idx[r] = static_cast<std::uint32_t>(rng.next_below(spec.n_classes));
    }
    for (std::size_t r = 0; r < n; ++r) {
        user_idx[r] = static_cast<std::uint32_t>(rng.next_below(spec.n_users));
    }

    Dataset ds;
    ds.features.reserve(spec.total_features());
    auto emit = [&](const std::string& name, auto&& cell_value) {
        FeatureColumn col;
        col.name = name;
        col.values.resize(n);
        for (std::size_t r = 0; r < n; ++r) col.values[r] = cell_value(r);
        ds.features.push_back(std::move(col));
    };

    for (std::size_t j = 0; j < spec.task_only; ++j) {
        emit(padded("task", j, 2), [&](std::size_t r) {
            if (rng.bernoulli(spec.signal_strength)) {
                return static_cast<double>(task_idx[r]) + rng.next_double();
            }
            return rng.uniform(0.0, static_cast<double>(spec.n_classes));
        });
    }
    for (std::size_t j = 0; j < spec.user_only; ++j) {
        emit(padded("user", j, 2), [&](std::size_t r) {
            if (rng.bernoulli(spec.signal_strength)) {
                return static_cast<double>(user_idx[r]) + rng.next_double();
            }
            return rng.uniform(0.0, static_cast<double>(spec.n_users));
        });
    }
    const double joint_range =
        static_cast<double>(spec.n_classes) * static_cast<double>(spec.n_users);
    for (std::size_t j = 0; j < spec.shared; ++j) {
        emit(padded("shared", j, 3), [&](std::size_t r) {
            if (rng.bernoulli(spec.signal_strength)) {
                const double joint = static_cast<double>(task_idx[r]) *
                                         static_cast<double>(spec.n_users) +
                                     static_cast<double>(user_idx[r]);
                return joint + rng.next_double();
            }
            return rng.uniform(0.0, joint_range);
        });
    }
    for (std::size_t j = 0; j < spec.noise; ++j) {
        emit(padded("noise", j, 3), [&](std::size_t r) {
            (void)r;
            return rng.next_double();
        });
    }

    std::vector<std::string> task_raw(n);
    std::vector<std::string> user_raw(n);
    for (std::size_t r = 0; r < n; ++r) {
        task_raw[r] = padded("c", task_idx[r], 2);
        user_raw[r] = padded("u", user_idx[r], 3);
    }
    ds.task_labels = make_labeling(task_raw);
    ds.user_labels = make_labeling(user_raw);
    validate(ds);
    return ds;
}

OracleTable oracle_enumerate(const Dataset& ds, const SplitSpec& split_spec,
                             const ForestConfig& cfg) {
    const std::size_t d = ds.dim();
    if (d > 10) throw std::invalid_argument("oracle enumeration is capped at d <= 10");
    validate(ds);

    OracleTable table;
    table.split = split_spec;
    table.config = cfg;
    table.entries.reserve((1ull << d) - 1);

    // deliberately simple sequential pass over every non-empty subset
    for (std::uint64_t mask = 1; mask < (1ull << d); ++mask) {
        OracleEntry entry;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask & (1ull << i)) entry.subset.indices.push_back(i);
        }
        const ForestConfig sub_cfg = subset_config(cfg, entry.subset);
        const PairEvaluation eval =
            evaluate_pair(ds, entry.subset, split_spec, sub_cfg, 1);
        entry.task_accuracy = eval.task_accuracy;
        entry.identifiability = eval.identifiability;
        table.entries.push_back(std::move(entry));
    }
    return table;
}

OracleEntry oracle_argmin(const OracleTable& table, double l, ThresholdBase base) {
    if (table.entries.empty()) throw std::invalid_argument("empty oracle table");
    if (!(l >= 0.0 && l <= 1.0)) {
        throw std::invalid_argument("threshold must lie in [0,1]");
    }

    double base_accuracy;
    if (base == ThresholdBase::full_feature_set) {
        base_accuracy = table.entries.back().task_accuracy;
    } else {
        base_accuracy = 0.0;
        for (const auto& e : table.entries) {
            if (e.task_accuracy > base_accuracy) base_accuracy = e.task_accuracy;
        }
    }
    const double required = (1.0 - l) * base_accuracy;

    const OracleEntry* best = nullptr;
    for (const auto& e : table.entries) {
        if (e.task_accuracy < required) continue;
        if (best == nullptr) {
            best = &e;
            continue;
        }
        bool take = false;
        if (e.identifiability != best->identifiability) {
            take = e.identifiability < best->identifiability;
        } else if (e.subset.size() != best->subset.size()) {
            take = e.subset.size() < best->subset.size();
        } else if (e.task_accuracy != best->task_accuracy) {
            take = e.task_accuracy > best->task_accuracy;
        } else {
            take = std::lexicographical_compare(
                e.subset.indices.begin(), e.subset.indices.end(),
                best->subset.indices.begin(), best->subset.indices.end());
        }
        if (take) best = &e;
    }
    if (best == nullptr) {
        throw std::runtime_error("no feasible subset in oracle table");
    }
    return *best;
}

std::string oracle_table_to_json(const OracleTable& table) {
    json doc;
    doc["format"] = "datamin.oracle";
    doc["version"] = 1;
    json split;
    split["test_fraction"] = table.split.test_fraction;
    split["seed"] = table.split.seed;
    split["stratify_on"] = table.split.stratify_on == StratifyOn::task ? "task"
                           : table.split.stratify_on == StratifyOn::user
                               ? "user"
                               : "joint";
    doc["split"] = std::move(split);
    json cfg;
    cfg["n_trees"] = table.config.n_trees;
    cfg["max_depth"] =
        table.config.max_depth ? json(*table.config.max_depth) : json(nullptr);
    cfg["min_samples_split"] = table.config.min_samples_split;
    cfg["features_per_split"] = table.config.features_per_split
                                    ? json(*table.config.features_per_split)
                                    : json(nullptr);
    cfg["seed"] = table.config.seed;
    doc["config"] = std::move(cfg);
    json entries = json::array();
    for (const auto& e : table.entries) {
        json je;
        je["subset"] = e.subset.indices;
        je["task_accuracy"] = e.task_accuracy;
        je["identifiability"] = e.identifiability;
        entries.push_back(std::move(je));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2);
}

OracleTable oracle_table_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format") != "datamin.oracle" || doc.at("version") != 1) {
        throw std::runtime_error("unrecognized oracle document");
    }
    OracleTable table;
    const json& split = doc.at("split");
    table.split.test_fraction = split.at("test_fraction").get<double>();
    table.split.seed = split.at("seed").get<std::uint64_t>();
    const std::string strat = split.at("stratify_on").get<std::string>();
    table.split.stratify_on = strat == "task"   ? StratifyOn::task
                              : strat == "user" ? StratifyOn::user
                                                : StratifyOn::joint;
    const json& cfg = doc.at("config");
    table.config.n_trees = cfg.at("n_trees").get<std::size_t>();
    if (!cfg.at("max_depth").is_null()) {
        table.config.max_depth = cfg.at("max_depth").get<std::size_t>();
    }
    table.config.min_samples_split = cfg.at("min_samples_split").get<std::size_t>();
    if (!cfg.at("features_per_split").is_null()) {
        table.config.features_per_split =
            cfg.at("features_per_split").get<std::size_t>();
    }
    table.config.seed = cfg.at("seed").get<std::uint64_t>();
    for (const json& je : doc.at("entries")) {
        OracleEntry e;
        e.subset.indices = je.at("subset").get<std::vector<std::size_t>>();
        e.task_accuracy = je.at("task_accuracy").get<double>();
        e.identifiability = je.at("identifiability").get<double>();
        table.entries.push_back(std::move(e));
    }
    return table;
}

SynthSpec dense_preset() {
    SynthSpec spec;
    spec.n_rows = 600;
    spec.n_classes = 4;
    spec.n_users = 8;
    spec.task_only = 6;
    spec.user_only = 4;
    spec.shared = 4;
    spec.noise = 6;
    spec.signal_strength = 0.9;
    spec.seed = 0x5d31u;
    return spec;
}

SynthSpec sparse_preset() {
    SynthSpec spec;
    spec.n_rows = 600;
    spec.n_classes = 4;
    spec.n_users = 8;
    spec.task_only = 0;
    spec.user_only = 0;
    spec.shared = 200;
    spec.noise = 0;
    spec.signal_strength = 0.35;
    spec.seed = 0x5d32u;
    return spec;
}

SynthSpec preset_by_name(const std::string& name) {
    if (name == "dense") return dense_preset();
    if (name == "sparse") return sparse_preset();
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<SynthSpec> fixture_specs(std::size_t count) {
    std::vector<SynthSpec> specs;
    specs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SynthSpec spec;
        spec.n_rows = 160 + 20 * (i % 3);
        spec.n_classes = 2 + (i % 3);
        spec.n_users = 4 + (i % 4);
        spec.task_only = 1 + (i % 3);
        spec.user_only = 1 + ((i / 3) % 2);
        spec.shared = (i % 2);
        spec.noise = (i / 2) % 3;
        spec.signal_strength = 0.85 + 0.05 * (i % 4);
        spec.seed = mix_seed(0xf1c5u, i);
        // keep d within the oracle cap
        while (spec.total_features() > 8) {
            if (spec.noise > 0) {
                --spec.noise;
            } else if (spec.shared > 0) {
                --spec.shared;
            } else {
                --spec.task_only;
            }
        }
        specs.push_back(spec);
    }
    return specs;
}

}  // namespace datamin
