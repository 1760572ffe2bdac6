#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace datamin {

struct FeatureColumn {
    std::string name;
    std::vector<double> values;

    bool operator==(const FeatureColumn&) const = default;
};

// Categorical labeling: per-row ids into a lexicographically sorted list of
// distinct values. Partitions made by split() share the parent's value list,
// so ids stay comparable across train/test.
struct Labeling {
    std::vector<std::uint32_t> ids;
    std::vector<std::string> values;

    std::size_t cardinality() const { return values.size(); }
    const std::string& value_of(std::size_t row) const { return values[ids[row]]; }

    bool operator==(const Labeling&) const = default;
};

Labeling make_labeling(const std::vector<std::string>& raw);

struct Dataset {
    std::vector<FeatureColumn> features;
    Labeling task_labels;
    Labeling user_labels;

    std::size_t rows() const { return task_labels.ids.size(); }
    std::size_t dim() const { return features.size(); }
    std::vector<std::string> feature_names() const;

    bool operator==(const Dataset&) const = default;
};

// Throws std::invalid_argument on any violated invariant (length mismatch,
// duplicate feature names, empty labelings, non-finite values).
void validate(const Dataset& ds);

// Ordered set of feature indices into a Dataset's feature list.
struct FeatureSubset {
    std::vector<std::size_t> indices;  // strictly increasing, non-empty

    std::size_t size() const { return indices.size(); }
    static FeatureSubset full(std::size_t d);

    bool operator==(const FeatureSubset&) const = default;
};

// Checks the subset against a dataset of dimension d: non-empty, strictly
// increasing, all indices < d.
void validate(const FeatureSubset& s, std::size_t d);

enum class StratifyOn { task, user, joint };

struct SplitSpec {
    double test_fraction = 0.3;
    std::uint64_t seed = 0;
    StratifyOn stratify_on = StratifyOn::task;

    bool operator==(const SplitSpec&) const = default;
};

enum class NaPolicy { drop_rows, error };

// CSV contract: first row is the header, comma delimiter, '.' decimal point,
// empty cell or literal NaN means missing. Label columns hold arbitrary
// text; all other cells must parse as finite numbers or be missing.
Dataset load_csv(const std::string& path, const std::string& task_column,
                 const std::string& user_column, NaPolicy na_policy);

std::string to_csv(const Dataset& ds, const std::string& task_column = "task",
                   const std::string& user_column = "user");
void write_csv(const Dataset& ds, const std::string& path,
               const std::string& task_column = "task",
               const std::string& user_column = "user");

// Keeps exactly the columns in s, in s's order; labels unchanged.
Dataset project(const Dataset& ds, const FeatureSubset& s);

// Deterministic stratified holdout. Row order within each partition follows
// the original dataset; per-stratum test counts are round(size * fraction),
// nudged by at most one row globally so both partitions are non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

// Stable 64-bit digest of names, labels and feature bytes, as 16 hex chars.
std::string dataset_fingerprint(const Dataset& ds);

}  // namespace datamin
