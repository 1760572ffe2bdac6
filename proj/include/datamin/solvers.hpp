#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datamin/attribution.hpp"
#include "datamin/dataset.hpp"
#include "datamin/forest.hpp"

namespace datamin {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ThresholdBase { max_over_subsets, full_feature_set };

// l is the tolerated fractional accuracy loss; a subset is feasible when its
// accuracy is at least (1 - l) times the base accuracy.
struct ThresholdPolicy {
    double l = 0.01;
    ThresholdBase base = ThresholdBase::max_over_subsets;
};

struct SubsetEvaluation {
    FeatureSubset subset;
    double task_accuracy = 0.0;
    double identifiability = 0.0;

    bool operator==(const SubsetEvaluation&) const = default;
};

enum class GreedyOrder { utility_desc, identifiability_asc, ctv_asc };

struct GreedyStop {
    enum class Kind { utility_sum, top_k };
    Kind kind = Kind::top_k;
    double min_total_utility = 0.0;  // V, when kind == utility_sum
    std::size_t k = 1;               // when kind == top_k

    static GreedyStop utility_sum(double v) {
        return {Kind::utility_sum, v, 0};
    }
    static GreedyStop top_k(std::size_t k) { return {Kind::top_k, 0.0, k}; }
};

struct GreedyStrategy {
    GreedyOrder order_by = GreedyOrder::ctv_asc;
    GreedyStop stop = GreedyStop::top_k(1);
};

struct MinimizationResult {
    FeatureSubset chosen;
    SubsetEvaluation evaluation;
    SubsetEvaluation baseline;  // the base the threshold was applied against
    std::size_t candidates_evaluated = 0;
    std::string method;
};

// Log of every evaluated subset. evaluations[mask - 1] belongs to the subset
// whose bit i (over positions in `candidates`) is set in `mask`.
struct EvaluationLog {
    FeatureSubset candidates;
    std::vector<SubsetEvaluation> evaluations;
    SplitSpec split;
    ForestConfig config;
};

// called as progress(done, total); may be invoked from worker threads
using SubsetProgress = std::function<void(std::size_t, std::size_t)>;

struct SearchOptions {
    std::size_t max_exhaustive = 20;   // hard cap on candidate count
    std::size_t warn_threshold = 15;   // stderr warning above this
    unsigned threads = 0;
    SubsetProgress progress;
};

// The config a solver hands to evaluate_pair for one subset: the forest seed
// is re-derived from (cfg.seed, subset_key) so any search reproduces the
// same numbers for the same subset, on any schedule.
ForestConfig subset_config(const ForestConfig& cfg, const FeatureSubset& subset);

// Evaluates all 2^k - 1 non-empty subsets of the candidate features.
EvaluationLog enumerate_subsets(const Dataset& ds, const FeatureSubset& candidates,
                                const SplitSpec& split_spec, const ForestConfig& cfg,
                                const SearchOptions& options = {});

// Threshold filter + argmin-identifiability over an existing log. Ties break
// toward fewer features, then higher accuracy, then lexicographic indices.
MinimizationResult select_minimal(const EvaluationLog& log,
                                  const ThresholdPolicy& policy);

MinimizationResult exhaustive_search(const Dataset& ds,
                                     const FeatureSubset& candidate_features,
                                     const ThresholdPolicy& policy,
                                     const SplitSpec& split_spec,
                                     const ForestConfig& cfg,
                                     const SearchOptions& options = {});

// CSV export of the full log: subset indices joined by ';'.
std::string evaluation_log_to_csv(const EvaluationLog& log);

// Takes features in strategy order until the stop condition is met. Returned
// indices refer to positions in the score table and are sorted ascending.
FeatureSubset greedy_select(const ScoreTable& scores, const GreedyStrategy& strategy);

// Exact reference: min sum of c subject to sum of v >= V, by enumeration
// (d <= 20). Ties break toward fewer features, then lexicographic.
FeatureSubset knapsack_oracle(const ScoreTable& scores, double min_total_utility);

struct HybridOptions {
    BinningSpec bins;                 // entropy / MI / tradeoff scoring
    std::size_t permutations = 64;    // SHAP scoring
    std::uint64_t attribution_seed = 0;
    SearchOptions search;
};

// The greedy preselection order each scoring method implies for stage 1.
GreedyOrder stage_order_for(ScoreMethod scoring);

// Stage 1 ranks features by the scoring method and keeps `keep` of them;
// stage 2 runs the exhaustive search within the kept set.
MinimizationResult hybrid_minimize(const Dataset& ds, const ThresholdPolicy& policy,
                                   const SplitSpec& split_spec, const ForestConfig& cfg,
                                   ScoreMethod scoring, std::size_t keep,
                                   const HybridOptions& options = {});

struct MinimizeDefaults {
    SplitSpec split{0.3, 17, StratifyOn::task};
    ForestConfig forest{100, {}, 2, {}, 7};
    std::size_t keep = 12;
    std::size_t permutations = 32;
    SearchOptions search;
};

// Provider API: exhaustive when the dimension fits under the cap, otherwise
// hybrid with SHAP scoring and the default keep count.
FeatureSubset feature_minimize(const Dataset& features_with_labels, double threshold,
                               const MinimizeDefaults& defaults = {});
FeatureSubset feature_minimize(const std::vector<FeatureColumn>& features,
                               const std::vector<std::string>& utility_labels,
                               const std::vector<std::string>& user_labels,
                               double threshold,
                               const MinimizeDefaults& defaults = {});

}  // namespace datamin
