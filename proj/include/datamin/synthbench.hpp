#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datamin/dataset.hpp"
#include "datamin/forest.hpp"
#include "datamin/solvers.hpp"

namespace datamin {

// Synthetic tabular benchmark with planted per-feature roles. Label-dependent
// features emit their label's index plus uniform jitter with probability
// signal_strength, otherwise a uniform draw over the index range; shared
// features use the joint (task, user) index; noise features are uniform.
// Task and user labels are drawn independently.
struct SynthSpec {
    std::size_t n_rows = 200;
    std::size_t n_classes = 2;
    std::size_t n_users = 2;
    std::size_t task_only = 1;
    std::size_t user_only = 1;
    std::size_t shared = 0;
    std::size_t noise = 0;
    double signal_strength = 1.0;  // in (0, 1]
    std::uint64_t seed = 0;

    std::size_t total_features() const {
        return task_only + user_only + shared + noise;
    }
};

// Feature order: task*, user*, shared*, noise* (names carry role and index).
Dataset generate(const SynthSpec& spec);

struct OracleEntry {
    FeatureSubset subset;
    double task_accuracy = 0.0;
    double identifiability = 0.0;

    bool operator==(const OracleEntry&) const = default;
};

// Ground truth for cross-checking the solvers: every non-empty subset of the
// full feature set, evaluated sequentially with the shared per-subset seed
// convention. Capped at d <= 10.
struct OracleTable {
    std::vector<OracleEntry> entries;  // entries[mask - 1]
    SplitSpec split;
    ForestConfig config;
};

OracleTable oracle_enumerate(const Dataset& ds, const SplitSpec& split_spec,
                             const ForestConfig& cfg);

// Filtered argmin, re-implemented independently of the solver module's
// selection: keeps subsets with accuracy >= (1-l) * base, then takes the
// least identifiable (ties: fewer features, higher accuracy, lexicographic).
OracleEntry oracle_argmin(const OracleTable& table, double l,
                          ThresholdBase base = ThresholdBase::max_over_subsets);

std::string oracle_table_to_json(const OracleTable& table);
OracleTable oracle_table_from_json(const std::string& text);

// Desk-scale stand-ins for dense (NetML-like) and sparse (nPrint-like)
// feature spaces, tuned to comparable full-set task accuracy.
SynthSpec dense_preset();
SynthSpec sparse_preset();
SynthSpec preset_by_name(const std::string& name);  // "dense" | "sparse"

// Small instances (d <= 8) used as oracle-agreement fixtures; seeds fixed.
std::vector<SynthSpec> fixture_specs(std::size_t count);

}  // namespace datamin
