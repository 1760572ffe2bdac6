#include "datamin/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "datamin/kernels.hpp"
#include "datamin/parallel.hpp"
#include "datamin/rng.hpp"

namespace datamin {

namespace {

using json = nlohmann::ordered_json;

double gini_from_counts(const std::vector<std::uint64_t>& counts,
                        std::uint64_t total) {
    if (total == 0) return 0.0;
    std::uint64_t sum_sq = 0;
    for (auto c : counts) sum_sq += c * c;
    const double t = static_cast<double>(total);
    return 1.0 - static_cast<double>(sum_sq) / (t * t);
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;  // position within the subset
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

// Grows one tree on the bootstrap sample. Columns are the projected feature
// columns; labels are class ids. Nodes are appended in preorder (left before
// right), and all randomness comes from `rng` in that fixed order.
DecisionTree build_tree(const std::vector<const std::vector<double>*>& columns,
                        const std::vector<std::uint32_t>& labels,
                        std::size_t n_classes, const ForestConfig& cfg,
                        std::size_t mtry, Rng& rng) {
    const std::size_t d = columns.size();
    DecisionTree tree;

    std::vector<std::size_t> bootstrap(labels.size());
    for (auto& r : bootstrap) {
        r = static_cast<std::size_t>(rng.next_below(labels.size()));
    }

    struct Pending {
        std::int32_t node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };

    std::vector<std::size_t> feature_pool(d);
    std::vector<std::pair<double, std::uint32_t>> sorted;  // (value, class)
    std::vector<std::uint64_t> left_counts(n_classes);
    std::vector<std::uint64_t> right_counts(n_classes);
    std::vector<std::uint64_t> node_counts64(n_classes);

    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(bootstrap), 0});

    while (!stack.empty()) {
        Pending item = std::move(stack.back());
        stack.pop_back();
        const std::size_t n_node = item.rows.size();

        std::fill(node_counts64.begin(), node_counts64.end(), 0);
        for (std::size_t r : item.rows) node_counts64[labels[r]] += 1;
        const double impurity = gini_from_counts(node_counts64, n_node);

        TreeNode& node = tree.nodes[item.node];
        node.n_samples = static_cast<std::uint32_t>(n_node);
        node.impurity = impurity;

        const bool depth_capped =
            cfg.max_depth.has_value() && item.depth >= *cfg.max_depth;
        BestSplit best;
        if (!depth_capped && n_node >= cfg.min_samples_split && impurity > 0.0) {
            for (std::size_t i = 0; i < d; ++i) feature_pool[i] = i;
            rng.sample_front(feature_pool, mtry);
            std::sort(feature_pool.begin(), feature_pool.begin() + mtry);

            for (std::size_t c = 0; c < mtry; ++c) {
                const std::size_t feat = feature_pool[c];
                const std::vector<double>& col = *columns[feat];
                sorted.clear();
                sorted.reserve(n_node);
                for (std::size_t r : item.rows) {
                    sorted.emplace_back(col[r], labels[r]);
                }
                std::sort(sorted.begin(), sorted.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                if (sorted.front().first == sorted.back().first) continue;

                std::fill(left_counts.begin(), left_counts.end(), 0);
                right_counts = node_counts64;
                std::uint64_t sum_sq_left = 0;
                std::uint64_t sum_sq_right = 0;
                for (auto c64 : node_counts64) sum_sq_right += c64 * c64;

                for (std::size_t i = 0; i + 1 < n_node; ++i) {
                    const std::uint32_t y = sorted[i].second;
                    sum_sq_left += 2 * left_counts[y] + 1;
                    left_counts[y] += 1;
                    sum_sq_right -= 2 * right_counts[y] - 1;
                    right_counts[y] -= 1;
                    if (sorted[i].first == sorted[i + 1].first) continue;

                    const double n_left = static_cast<double>(i + 1);
                    const double n_right = static_cast<double>(n_node - i - 1);
                    const double score =
                        (n_left - static_cast<double>(sum_sq_left) / n_left) +
                        (n_right - static_cast<double>(sum_sq_right) / n_right);
                    // candidates arrive in ascending (feature, threshold) order,
                    // so keeping strict '<' breaks ties toward the lowest
                    // feature index and then the lowest threshold
                    if (score < best.score) {
                        best.found = true;
                        best.feature = feat;
                        best.threshold =
                            sorted[i].first +
                            (sorted[i + 1].first - sorted[i].first) / 2.0;
                        best.score = score;
                    }
                }
            }
        }

        if (!best.found) {
            TreeNode& leaf = tree.nodes[item.node];
            leaf.feature = -1;
            leaf.counts.resize(n_classes);
            for (std::size_t k = 0; k < n_classes; ++k) {
                leaf.counts[k] = static_cast<std::uint32_t>(node_counts64[k]);
            }
            continue;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        const std::vector<double>& col = *columns[best.feature];
        for (std::size_t r : item.rows) {
            if (col[r] <= best.threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }

        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        const auto right_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[item.node];
        parent.feature = static_cast<std::int32_t>(best.feature);
        parent.threshold = best.threshold;
        parent.left = left_id;
        parent.right = right_id;

        // preorder: left child processed before right
        stack.push_back({right_id, std::move(right_rows), item.depth + 1});
        stack.push_back({left_id, std::move(left_rows), item.depth + 1});
    }

    return tree;
}

std::uint32_t tree_vote(const DecisionTree& tree, const double* row) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        node = (row[node->feature] <= node->threshold)
                   ? &tree.nodes[node->left]
                   : &tree.nodes[node->right];
    }
    std::uint32_t best = 0;
    std::uint32_t best_count = node->counts[0];
    for (std::uint32_t k = 1; k < node->counts.size(); ++k) {
        if (node->counts[k] > best_count) {
            best = k;
            best_count = node->counts[k];
        }
    }
    return best;
}

// Returns the columns of `ds` matching the forest's projected view, either
// directly or through the trained_on indices.
std::vector<const std::vector<double>*> resolve_columns(const Forest& f,
                                                        const Dataset& ds) {
    const std::size_t k = f.feature_names.size();
    std::vector<const std::vector<double>*> cols(k);
    if (ds.dim() == k) {
        bool names_match = true;
        for (std::size_t i = 0; i < k; ++i) {
            if (ds.features[i].name != f.feature_names[i]) {
                names_match = false;
                break;
            }
        }
        if (names_match) {
            for (std::size_t i = 0; i < k; ++i) cols[i] = &ds.features[i].values;
            return cols;
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = f.trained_on.indices[i];
        if (idx >= ds.dim() || ds.features[idx].name != f.feature_names[i]) {
            throw std::invalid_argument(
                "dataset columns do not match the forest's training features");
        }
        cols[i] = &ds.features[idx].values;
    }
    return cols;
}

std::vector<std::uint32_t> predict_rows(
    const Forest& f, const std::vector<const std::vector<double>*>& cols,
    std::size_t n_rows) {
    std::vector<std::uint32_t> preds(n_rows);
    std::vector<double> row(cols.size());
    std::vector<std::uint32_t> votes(f.n_classes());
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) row[c] = (*cols[c])[r];
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& tree : f.trees) votes[tree_vote(tree, row.data())] += 1;
        std::uint32_t best = 0;
        for (std::uint32_t k = 1; k < votes.size(); ++k) {
            if (votes[k] > votes[best]) best = k;
        }
        preds[r] = best;
    }
    return preds;
}

}  // namespace

std::uint32_t Forest::predict(const double* row) const {
    const std::vector<double> fractions = vote_fractions(row);
    std::uint32_t best = 0;
    for (std::uint32_t k = 1; k < fractions.size(); ++k) {
        if (fractions[k] > fractions[best]) best = k;
    }
    return best;
}

std::vector<double> Forest::vote_fractions(const double* row) const {
    std::vector<std::uint32_t> votes(n_classes(), 0);
    for (const auto& tree : trees) votes[tree_vote(tree, row)] += 1;
    std::vector<double> fractions(votes.size());
    const double t = static_cast<double>(trees.size());
    for (std::size_t k = 0; k < votes.size(); ++k) {
        fractions[k] = static_cast<double>(votes[k]) / t;
    }
    return fractions;
}

Forest train(const Dataset& ds, Target target, const FeatureSubset& subset,
             const ForestConfig& cfg, unsigned threads) {
    validate(subset, ds.dim());
    if (ds.rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
    if (cfg.n_trees == 0) throw std::invalid_argument("n_trees must be >= 1");
    if (cfg.min_samples_split == 0) {
        throw std::invalid_argument("min_samples_split must be >= 1");
    }
    if (cfg.max_depth && *cfg.max_depth == 0) {
        throw std::invalid_argument("max_depth must be >= 1 when set");
    }

    const std::size_t d = subset.size();
    std::size_t mtry = cfg.features_per_split.value_or(
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
    if (mtry < 1 || mtry > d) {
        throw std::invalid_argument("features_per_split must lie in [1, d]");
    }

    const Labeling& labeling =
        (target == Target::task) ? ds.task_labels : ds.user_labels;

    std::vector<const std::vector<double>*> columns(d);
    Forest forest;
    forest.trained_on = subset;
    forest.feature_names.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        columns[i] = &ds.features[subset.indices[i]].values;
        forest.feature_names.push_back(ds.features[subset.indices[i]].name);
    }
    forest.class_labels = labeling.values;
    forest.config = cfg;
    forest.target = target;
    forest.trees.resize(cfg.n_trees);

    const std::size_t n_classes = labeling.cardinality();
    parallel_for(cfg.n_trees, threads, [&](std::size_t t) {
        Rng rng(mix_seed(cfg.seed, t));
        forest.trees[t] =
            build_tree(columns, labeling.ids, n_classes, cfg, mtry, rng);
    });
    return forest;
}

double accuracy(const Forest& f, const Dataset& test) {
    const std::size_t n = test.rows();
    if (n == 0) throw std::invalid_argument("empty test set");
    const auto cols = resolve_columns(f, test);
    const std::vector<std::uint32_t> preds = predict_rows(f, cols, n);

    const Labeling& labeling =
        (f.target == Target::task) ? test.task_labels : test.user_labels;
    // map test label ids to forest class ids by name; unseen labels never match
    constexpr std::uint32_t kUnseen = 0xffffffffu;
    std::vector<std::uint32_t> mapping(labeling.values.size(), kUnseen);
    for (std::size_t i = 0; i < labeling.values.size(); ++i) {
        const auto it = std::find(f.class_labels.begin(), f.class_labels.end(),
                                  labeling.values[i]);
        if (it != f.class_labels.end()) {
            mapping[i] = static_cast<std::uint32_t>(it - f.class_labels.begin());
        }
    }
    std::vector<std::uint32_t> expected(n);
    for (std::size_t r = 0; r < n; ++r) expected[r] = mapping[labeling.ids[r]];

    const std::size_t correct =
        kernels::count_equal_u32(preds.data(), expected.data(), n);
    return static_cast<double>(correct) / static_cast<double>(n);
}

PairModels evaluate_pair_models(const Dataset& ds, const FeatureSubset& subset,
                                const SplitSpec& split_spec,
                                const ForestConfig& cfg, unsigned threads) {
    auto [train_ds, test_ds] = split(ds, split_spec);
    PairModels out;
    out.task_model = train(train_ds, Target::task, subset, cfg, threads);
    out.user_model = train(train_ds, Target::user, subset, cfg, threads);
    out.evaluation.task_accuracy = accuracy(out.task_model, test_ds);
    out.evaluation.identifiability = accuracy(out.user_model, test_ds);
    return out;
}

PairEvaluation evaluate_pair(const Dataset& ds, const FeatureSubset& subset,
                             const SplitSpec& split_spec, const ForestConfig& cfg,
                             unsigned threads) {
    return evaluate_pair_models(ds, subset, split_spec, cfg, threads).evaluation;
}

std::vector<double> gini_importance(const Forest& f) {
    const std::size_t d = f.feature_names.size();
    std::vector<double> importance(d, 0.0);
    for (const auto& tree : f.trees) {
        const double n_root = static_cast<double>(tree.nodes[0].n_samples);
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const TreeNode& l = tree.nodes[node.left];
            const TreeNode& r = tree.nodes[node.right];
            const double decrease =
                (static_cast<double>(node.n_samples) * node.impurity -
                 static_cast<double>(l.n_samples) * l.impurity -
                 static_cast<double>(r.n_samples) * r.impurity) /
                n_root;
            importance[static_cast<std::size_t>(node.feature)] += decrease;
        }
    }
    double total = 0.0;
    for (auto& v : importance) {
        v /= static_cast<double>(f.trees.size());
        total += v;
    }
    if (total <= 0.0) {
        std::fill(importance.begin(), importance.end(),
                  1.0 / static_cast<double>(d));
        return importance;
    }
    for (auto& v : importance) v /= total;
    return importance;
}

std::string forest_to_json(const Forest& f) {
    json doc;
    doc["format"] = "datamin.forest";
    doc["version"] = 1;
    doc["target"] = (f.target == Target::task) ? "task" : "user";
    doc["class_labels"] = f.class_labels;
    doc["trained_on"] = f.trained_on.indices;
    doc["feature_names"] = f.feature_names;
    json cfg;
    cfg["n_trees"] = f.config.n_trees;
    if (f.config.max_depth) {
        cfg["max_depth"] = *f.config.max_depth;
    } else {
        cfg["max_depth"] = nullptr;
    }
    cfg["min_samples_split"] = f.config.min_samples_split;
    if (f.config.features_per_split) {
        cfg["features_per_split"] = *f.config.features_per_split;
    } else {
        cfg["features_per_split"] = nullptr;
    }
    cfg["seed"] = f.config.seed;
    doc["config"] = std::move(cfg);

    json trees = json::array();
    for (const auto& tree : f.trees) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            json jn;
            jn["f"] = node.feature;
            jn["t"] = node.threshold;
            jn["l"] = node.left;
            jn["r"] = node.right;
            jn["n"] = node.n_samples;
            jn["g"] = node.impurity;
            if (node.is_leaf()) jn["c"] = node.counts;
            nodes.push_back(std::move(jn));
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2);
}

Forest forest_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format") != "datamin.forest" || doc.at("version") != 1) {
        throw std::runtime_error("unrecognized forest document");
    }
    Forest f;
    f.target = (doc.at("target") == "task") ? Target::task : Target::user;
    f.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    f.trained_on.indices = doc.at("trained_on").get<std::vector<std::size_t>>();
    f.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const json& cfg = doc.at("config");
    f.config.n_trees = cfg.at("n_trees").get<std::size_t>();
    if (!cfg.at("max_depth").is_null()) {
        f.config.max_depth = cfg.at("max_depth").get<std::size_t>();
    }
    f.config.min_samples_split = cfg.at("min_samples_split").get<std::size_t>();
    if (!cfg.at("features_per_split").is_null()) {
        f.config.features_per_split = cfg.at("features_per_split").get<std::size_t>();
    }
    f.config.seed = cfg.at("seed").get<std::uint64_t>();

    for (const json& jt : doc.at("trees")) {
        DecisionTree tree;
        for (const json& jn : jt.at("nodes")) {
            TreeNode node;
            node.feature = jn.at("f").get<std::int32_t>();
            node.threshold = jn.at("t").get<double>();
            node.left = jn.at("l").get<std::int32_t>();
            node.right = jn.at("r").get<std::int32_t>();
            node.n_samples = jn.at("n").get<std::uint32_t>();
            node.impurity = jn.at("g").get<double>();
            if (node.is_leaf()) {
                node.counts = jn.at("c").get<std::vector<std::uint32_t>>();
            }
            tree.nodes.push_back(std::move(node));
        }
        f.trees.push_back(std::move(tree));
    }
    return f;
}

}  // namespace datamin
