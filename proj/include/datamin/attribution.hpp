#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datamin/dataset.hpp"
#include "datamin/forest.hpp"

namespace datamin {

enum class BinStrategy { quantile };

struct BinningSpec {
    std::size_t bins = 16;
    BinStrategy strategy = BinStrategy::quantile;
};

// Shannon entropy (bits) of the column after quantile binning. This is the
// privacy score c_f of the entropy method.
double marginal_entropy(const FeatureColumn& col, const BinningSpec& b);

// I(X;Y) in bits with X quantile-binned and Y the given labeling. This is
// the utility score v_f of the mutual-information method.
double mutual_information(const FeatureColumn& col, const Labeling& labels,
                          const BinningSpec& b);

// Min-max normalizes both vectors to [0,1] (a constant vector maps to all
// 0.5) and returns normalized utility minus normalized privacy score.
std::vector<double> tradeoff_score(const std::vector<double>& utility,
                                   const std::vector<double>& privacy);

// Signed per-(row, class, feature) contributions to the forest's vote
// fractions, plus the per-class expected output over the background sample.
struct ShapAttribution {
    std::size_t n_rows = 0;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    std::vector<double> values;    // indexed (row, class, feature)
    std::vector<double> baseline;  // per class

    double value(std::size_t row, std::size_t cls, std::size_t feature) const {
        return values[(row * n_classes + cls) * n_features + feature];
    }
};

// Monte Carlo permutation-sampling Shapley estimate with marginal feature
// replacement. Each insertion step averages the model output over the
// background sample, so per-row efficiency holds up to float rounding.
// Rows attribute independently with per-(seed, row) streams; results are
// identical for any thread count. At most 256 background rows are used
// (deterministic seeded subsample beyond that).
ShapAttribution shapley(const Forest& f, const Dataset& data,
                        const Dataset& background, std::size_t permutations,
                        std::uint64_t seed, unsigned threads = 0);

// Background defaults to the data itself.
ShapAttribution shapley(const Forest& f, const Dataset& data,
                        std::size_t permutations, std::uint64_t seed,
                        unsigned threads = 0);

enum class ScoreMethod { entropy_privacy, mi_utility, tradeoff, shap, gini };

std::string score_method_name(ScoreMethod m);
ScoreMethod score_method_from_name(const std::string& name);

// Per-feature utility scores v and identifiability scores c. Vectors are
// absent when the method does not define them; present vectors match
// feature_names in length.
struct ScoreTable {
    ScoreMethod method = ScoreMethod::gini;
    std::vector<std::string> feature_names;
    std::optional<std::vector<double>> utility;
    std::optional<std::vector<double>> identifiability;
};

void validate(const ScoreTable& t);

// Trains the provider/adversary pair on the train partition, attributes both
// over the training rows, and reduces v_f = mean over rows of max over
// classes of |S|, c_f likewise from the adversary's attributions.
ScoreTable shap_scores(const Dataset& ds, const FeatureSubset& subset,
                       const SplitSpec& split_spec, const ForestConfig& cfg,
                       std::size_t permutations, std::uint64_t seed,
                       unsigned threads = 0);

// Same pair of models, scores from Gini importances instead.
ScoreTable gini_scores(const Dataset& ds, const FeatureSubset& subset,
                       const SplitSpec& split_spec, const ForestConfig& cfg,
                       unsigned threads = 0);

ScoreTable entropy_scores(const Dataset& ds, const BinningSpec& b = {});
ScoreTable mi_scores(const Dataset& ds, const BinningSpec& b = {});
ScoreTable tradeoff_scores(const Dataset& ds, const BinningSpec& b = {});

// CSV columns: feature,name,v,c with blank cells for absent vectors.
std::string score_table_to_csv(const ScoreTable& t);
std::string score_table_to_json(const ScoreTable& t);

}  // namespace datamin
