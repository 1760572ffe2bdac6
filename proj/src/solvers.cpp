#include "datamin/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "datamin/parallel.hpp"
#include "datamin/rng.hpp"

namespace datamin {

namespace {

FeatureSubset subset_from_mask(std::uint64_t mask, const FeatureSubset& candidates) {
    FeatureSubset s;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (mask & (1ull << i)) s.indices.push_back(candidates.indices[i]);
    }
    return s;
}

// chosen < incumbent under (identifiability asc, count asc, accuracy desc,
// lexicographic indices asc)
bool better_choice(const SubsetEvaluation& a, const SubsetEvaluation& b) {
    if (a.identifiability != b.identifiability) {
        return a.identifiability < b.identifiability;
    }
    if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
    if (a.task_accuracy != b.task_accuracy) return a.task_accuracy > b.task_accuracy;
    return std::lexicographical_compare(a.subset.indices.begin(),
                                        a.subset.indices.end(),
                                        b.subset.indices.begin(),
                                        b.subset.indices.end());
}

std::string format_policy(const ThresholdPolicy& policy) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "l=%g, base=%s", policy.l,
                  policy.base == ThresholdBase::max_over_subsets
                      ? "max_over_subsets"
                      : "full_feature_set");
    return buf;
}

void check_policy(const ThresholdPolicy& policy) {
    if (!(policy.l >= 0.0 && policy.l <= 1.0)) {
        throw std::invalid_argument("threshold must lie in [0,1]");
    }
}

}  // namespace

ForestConfig subset_config(const ForestConfig& cfg, const FeatureSubset& subset) {
    ForestConfig sub = cfg;
    sub.seed = mix_seed(cfg.seed, subset_key(subset.indices));
    return sub;
}

EvaluationLog enumerate_subsets(const Dataset& ds, const FeatureSubset& candidates,
                                const SplitSpec& split_spec, const ForestConfig& cfg,
                                const SearchOptions& options) {
    validate(candidates, ds.dim());
    const std::size_t k = candidates.size();
    if (k > options.max_exhaustive) {
        throw std::invalid_argument(
            "exhaustive search over " + std::to_string(k) +
            " features exceeds the cap of " + std::to_string(options.max_exhaustive));
    }
    if (k > options.warn_threshold) {
        std::cerr << "warning: exhaustive search over " << k << " features ("
                  << ((1ull << k) - 1) << " subsets) may take a long time\n";
    }

    const std::size_t total = (1ull << k) - 1;
    EvaluationLog log;
    log.candidates = candidates;
    log.split = split_spec;
    log.config = cfg;
    log.evaluations.resize(total);

    // the split depends only on labels and seed, so share it across subsets
    auto parts = split(ds, split_spec);
    const Dataset& train_ds = parts.first;
    const Dataset& test_ds = parts.second;

    std::atomic<std::size_t> done{0};
    parallel_for(total, options.threads, [&](std::size_t i) {
        const std::uint64_t mask = i + 1;
        SubsetEvaluation eval;
        eval.subset = subset_from_mask(mask, candidates);
        const ForestConfig sub_cfg = subset_config(cfg, eval.subset);
        const Forest f_task = train(train_ds, Target::task, eval.subset, sub_cfg, 1);
        const Forest f_user = train(train_ds, Target::user, eval.subset, sub_cfg, 1);
        eval.task_accuracy = accuracy(f_task, test_ds);
        eval.identifiability = accuracy(f_user, test_ds);
        log.evaluations[i] = std::move(eval);
        if (options.progress) {
            options.progress(done.fetch_add(1) + 1, total);
        }
    });
    return log;
}

MinimizationResult select_minimal(const EvaluationLog& log,
                                  const ThresholdPolicy& policy) {
    check_policy(policy);
    if (log.evaluations.empty()) throw std::invalid_argument("empty evaluation log");

    const SubsetEvaluation* baseline = nullptr;
    if (policy.base == ThresholdBase::full_feature_set) {
        baseline = &log.evaluations.back();  // mask with every candidate bit set
    } else {
        // threshold-0 pick: least identifiable among the accuracy maximizers
        double best_acc = -1.0;
        for (const auto& eval : log.evaluations) {
            best_acc = std::max(best_acc, eval.task_accuracy);
        }
        for (const auto& eval : log.evaluations) {
            if (eval.task_accuracy != best_acc) continue;
            if (baseline == nullptr || better_choice(eval, *baseline)) {
                baseline = &eval;
            }
        }
    }

    const double required = (1.0 - policy.l) * baseline->task_accuracy;
    const SubsetEvaluation* chosen = nullptr;
    for (const auto& eval : log.evaluations) {
        if (eval.task_accuracy < required) continue;
        if (chosen == nullptr || better_choice(eval, *chosen)) chosen = &eval;
    }
    // the baseline subset itself is always feasible
    if (chosen == nullptr) chosen = baseline;

    MinimizationResult result;
    result.chosen = chosen->subset;
    result.evaluation = *chosen;
    result.baseline = *baseline;
    result.candidates_evaluated = log.evaluations.size();
    result.method = "exhaustive(" + format_policy(policy) + ")";
    return result;
}

MinimizationResult exhaustive_search(const Dataset& ds,
                                     const FeatureSubset& candidate_features,
                                     const ThresholdPolicy& policy,
                                     const SplitSpec& split_spec,
                                     const ForestConfig& cfg,
                                     const SearchOptions& options) {
    check_policy(policy);
    const EvaluationLog log =
        enumerate_subsets(ds, candidate_features, split_spec, cfg, options);
    return select_minimal(log, policy);
}

std::string evaluation_log_to_csv(const EvaluationLog& log) {
    std::string out = "subset,n_features,task_accuracy,identifiability\n";
    char buf[64];
    for (const auto& eval : log.evaluations) {
        for (std::size_t i = 0; i < eval.subset.size(); ++i) {
            if (i > 0) out += ';';
            out += std::to_string(eval.subset.indices[i]);
        }
        std::snprintf(buf, sizeof(buf), ",%zu,%.17g,%.17g\n", eval.subset.size(),
                      eval.task_accuracy, eval.identifiability);
        out += buf;
    }
    return out;
}

FeatureSubset greedy_select(const ScoreTable& scores, const GreedyStrategy& strategy) {
    validate(scores);
    const std::size_t d = scores.feature_names.size();

    const bool needs_utility =
        strategy.order_by == GreedyOrder::utility_desc ||
        strategy.order_by == GreedyOrder::ctv_asc ||
        strategy.stop.kind == GreedyStop::Kind::utility_sum;
    const bool needs_identifiability =
        strategy.order_by == GreedyOrder::identifiability_asc ||
        strategy.order_by == GreedyOrder::ctv_asc;
    if (needs_utility && !scores.utility) {
        throw std::invalid_argument("strategy requires utility scores");
    }
    if (needs_identifiability && !scores.identifiability) {
        throw std::invalid_argument("strategy requires identifiability scores");
    }

    std::vector<double> key(d);
    for (std::size_t i = 0; i < d; ++i) {
        switch (strategy.order_by) {
            case GreedyOrder::utility_desc:
                key[i] = -(*scores.utility)[i];
                break;
            case GreedyOrder::identifiability_asc:
                key[i] = (*scores.identifiability)[i];
                break;
            case GreedyOrder::ctv_asc: {
                const double v = (*scores.utility)[i];
                const double c = (*scores.identifiability)[i];
                // zero-utility features sort last
                key[i] = (v > 0.0) ? c / v : std::numeric_limits<double>::infinity();
                break;
            }
        }
    }
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        return a < b;
    });

    FeatureSubset chosen;
    if (strategy.stop.kind == GreedyStop::Kind::top_k) {
        const std::size_t k = strategy.stop.k;
        if (k < 1 || k > d) {
            throw std::invalid_argument("top_k must lie in [1, d]");
        }
        chosen.indices.assign(order.begin(), order.begin() + k);
    } else {
        const double v_target = strategy.stop.min_total_utility;
        if (!(v_target > 0.0)) {
            throw std::invalid_argument("utility_sum stop requires V > 0");
        }
        double cum = 0.0;
        for (std::size_t i = 0; i < d && cum < v_target; ++i) {
            chosen.indices.push_back(order[i]);
            cum += (*scores.utility)[order[i]];
        }
        if (cum < v_target) {
            throw InfeasibleError("total utility " + std::to_string(cum) +
                                  " cannot reach V = " + std::to_string(v_target));
        }
    }
    std::sort(chosen.indices.begin(), chosen.indices.end());
    return chosen;
}

FeatureSubset knapsack_oracle(const ScoreTable& scores, double min_total_utility) {
    validate(scores);
    if (!scores.utility || !scores.identifiability) {
        throw std::invalid_argument("knapsack oracle needs both score vectors");
    }
    const std::size_t d = scores.feature_names.size();
    if (d > 20) throw std::invalid_argument("knapsack oracle is capped at d <= 20");
    const std::vector<double>& v = *scores.utility;
    const std::vector<double>& c = *scores.identifiability;

    bool found = false;
    double best_cost = 0.0;
    std::uint64_t best_mask = 0;
    std::size_t best_count = 0;
    std::vector<std::size_t> indices;
    std::vector<std::size_t> best_indices;

    for (std::uint64_t mask = 1; mask < (1ull << d); ++mask) {
        double sum_v = 0.0;
        double sum_c = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask & (1ull << i)) {
                sum_v += v[i];
                sum_c += c[i];
            }
        }
        if (sum_v < min_total_utility) continue;
        const std::size_t count = static_cast<std::size_t>(__builtin_popcountll(mask));
        bool take = false;
        if (!found || sum_c < best_cost) {
            take = true;
        } else if (sum_c == best_cost) {
            if (count < best_count) {
                take = true;
            } else if (count == best_count) {
                indices.clear();
                for (std::size_t i = 0; i < d; ++i) {
                    if (mask & (1ull << i)) indices.push_back(i);
                }
                take = std::lexicographical_compare(indices.begin(), indices.end(),
                                                    best_indices.begin(),
                                                    best_indices.end());
            }
        }
        if (take) {
            found = true;
            best_cost = sum_c;
            best_mask = mask;
            best_count = count;
            best_indices.clear();
            for (std::size_t i = 0; i < d; ++i) {
                if (best_mask & (1ull << i)) best_indices.push_back(i);
            }
        }
    }
    if (!found) {
        throw InfeasibleError("no subset reaches V = " +
                              std::to_string(min_total_utility));
    }
    FeatureSubset s;
    s.indices = std::move(best_indices);
    return s;
}

GreedyOrder stage_order_for(ScoreMethod scoring) {
    switch (scoring) {
        case ScoreMethod::shap:
        case ScoreMethod::gini:
            return GreedyOrder::ctv_asc;
        case ScoreMethod::mi_utility:
        case ScoreMethod::tradeoff:
            return GreedyOrder::utility_desc;
        case ScoreMethod::entropy_privacy:
            return GreedyOrder::identifiability_asc;
    }
    return GreedyOrder::ctv_asc;
}

MinimizationResult hybrid_minimize(const Dataset& ds, const ThresholdPolicy& policy,
                                   const SplitSpec& split_spec, const ForestConfig& cfg,
                                   ScoreMethod scoring, std::size_t keep,
                                   const HybridOptions& options) {
    check_policy(policy);
    const std::size_t d = ds.dim();
    if (keep < 1 || keep > std::min(d, options.search.max_exhaustive)) {
        throw std::invalid_argument("keep must lie in [1, min(d, exhaustive cap)]");
    }

    const FeatureSubset all = FeatureSubset::full(d);
    ScoreTable table;
    switch (scoring) {
        case ScoreMethod::shap:
            table = shap_scores(ds, all, split_spec, cfg, options.permutations,
                                options.attribution_seed, options.search.threads);
            break;
        case ScoreMethod::gini:
            table = gini_scores(ds, all, split_spec, cfg, options.search.threads);
            break;
        case ScoreMethod::mi_utility:
            table = mi_scores(ds, options.bins);
            break;
        case ScoreMethod::entropy_privacy:
            table = entropy_scores(ds, options.bins);
            break;
        case ScoreMethod::tradeoff:
            table = tradeoff_scores(ds, options.bins);
            break;
    }

    GreedyStrategy stage1;
    stage1.order_by = stage_order_for(scoring);
    stage1.stop = GreedyStop::top_k(keep);
    const FeatureSubset kept = greedy_select(table, stage1);

    MinimizationResult result =
        exhaustive_search(ds, kept, policy, split_spec, cfg, options.search);
    result.method = "hybrid(scoring=" + score_method_name(scoring) +
                    ", keep=" + std::to_string(keep) + ") + " + result.method;
    return result;
}

FeatureSubset feature_minimize(const Dataset& features_with_labels, double threshold,
                               const MinimizeDefaults& defaults) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must lie in [0,1]");
    }
    validate(features_with_labels);
    const std::size_t d = features_with_labels.dim();
    const ThresholdPolicy policy{threshold, ThresholdBase::max_over_subsets};

    if (d <= defaults.search.max_exhaustive) {
        return exhaustive_search(features_with_labels, FeatureSubset::full(d), policy,
                                 defaults.split, defaults.forest, defaults.search)
            .chosen;
    }
    HybridOptions options;
    options.permutations = defaults.permutations;
    options.search = defaults.search;
    return hybrid_minimize(features_with_labels, policy, defaults.split,
                           defaults.forest, ScoreMethod::shap, defaults.keep, options)
        .chosen;
}

FeatureSubset feature_minimize(const std::vector<FeatureColumn>& features,
                               const std::vector<std::string>& utility_labels,
                               const std::vector<std::string>& user_labels,
                               double threshold, const MinimizeDefaults& defaults) {
    Dataset ds;
    ds.features = features;
    ds.task_labels = make_labeling(utility_labels);
    ds.user_labels = make_labeling(user_labels);
    return feature_minimize(ds, threshold, defaults);
}

}  // namespace datamin
