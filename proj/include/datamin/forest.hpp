#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datamin/dataset.hpp"

namespace datamin {

enum class Target { task, user };

struct ForestConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;           // unset = unbounded
    std::size_t min_samples_split = 2;
    std::optional<std::size_t> features_per_split;  // unset = ceil(sqrt(d))
    std::uint64_t seed = 0;

    bool operator==(const ForestConfig&) const = default;
};

struct TreeNode {
    std::int32_t feature = -1;  // position within trained_on; -1 marks a leaf
    double threshold = 0.0;     // left branch takes values <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t n_samples = 0;
    double impurity = 0.0;
    std::vector<std::uint32_t> counts;  // leaf only: in-bag class counts

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // preorder; nodes[0] is the root

    bool operator==(const DecisionTree&) const = default;
};

// Random forest of Gini-split decision trees. One family serves both the
// provider's task model and the adversary's user model; prediction is the
// majority vote over per-tree argmax leaves, ties broken by class order.
struct Forest {
    std::vector<DecisionTree> trees;
    std::vector<std::string> class_labels;
    FeatureSubset trained_on;                // indices into the source dataset
    std::vector<std::string> feature_names;  // names of the trained_on columns
    ForestConfig config;
    Target target = Target::task;

    std::size_t n_classes() const { return class_labels.size(); }
    // `row` holds the projected feature values, one per trained_on column.
    std::uint32_t predict(const double* row) const;
    // Fraction of trees voting for each class.
    std::vector<double> vote_fractions(const double* row) const;

    bool operator==(const Forest&) const = default;
};

// Deterministic for a fixed cfg.seed: each tree's bootstrap and feature
// sampling derive from (cfg.seed, tree index) only, so results do not depend
// on thread count or on cfg.n_trees for earlier trees.
Forest train(const Dataset& ds, Target target, const FeatureSubset& subset,
             const ForestConfig& cfg, unsigned threads = 0);

// Top-1 accuracy on `test`. Accepts either the projected view (features equal
// to f.feature_names) or any dataset in which f.trained_on indices resolve to
// the same names; anything else is a column mismatch error.
double accuracy(const Forest& f, const Dataset& test);

struct PairEvaluation {
    double task_accuracy = 0.0;
    double identifiability = 0.0;
};

struct PairModels {
    Forest task_model;
    Forest user_model;
    PairEvaluation evaluation;
};

// Trains the provider and adversary forests on the train partition of
// project(ds, subset) with one shared config (model class parity) and
// returns both test accuracies.
PairEvaluation evaluate_pair(const Dataset& ds, const FeatureSubset& subset,
                             const SplitSpec& split_spec, const ForestConfig& cfg,
                             unsigned threads = 0);
PairModels evaluate_pair_models(const Dataset& ds, const FeatureSubset& subset,
                                const SplitSpec& split_spec,
                                const ForestConfig& cfg, unsigned threads = 0);

// Mean decrease in Gini impurity per trained_on position, averaged over
// trees and normalized to sum to 1 (uniform when no split exists).
std::vector<double> gini_importance(const Forest& f);

// Versioned JSON document with full node structure; round-trips exactly.
std::string forest_to_json(const Forest& f);
Forest forest_from_json(const std::string& text);

}  // namespace datamin
