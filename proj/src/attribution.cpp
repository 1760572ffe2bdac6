#include "datamin/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

#include "datamin/kernels.hpp"
#include "datamin/parallel.hpp"
#include "datamin/rng.hpp"

namespace datamin {

namespace {

using json = nlohmann::ordered_json;

// Quantile bin assignment: edges at the k/bins quantiles (duplicates
// collapsed), bin(x) = number of edges <= x. Constant columns land in one bin.
std::vector<std::uint32_t> quantile_bins(const std::vector<double>& values,
                                         std::size_t bins) {
    std::vector<double> sorted_values(values);
    std::sort(sorted_values.begin(), sorted_values.end());
    const std::size_t n = sorted_values.size();
    std::vector<double> edges;
    edges.reserve(bins - 1);
    for (std::size_t k = 1; k < bins; ++k) {
        edges.push_back(sorted_values[k * n / bins]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::uint32_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
        assignment[i] = static_cast<std::uint32_t>(
            std::upper_bound(edges.begin(), edges.end(), values[i]) -
            edges.begin());
    }
    return assignment;
}

double entropy_bits(const std::vector<std::uint64_t>& counts,
                    std::uint64_t total) {
    double h = 0.0;
    const double t = static_cast<double>(total);
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / t;
        h -= p * std::log2(p);
    }
    return h;
}

void check_binning(const BinningSpec& b) {
    if (b.bins < 2) throw std::invalid_argument("bins must be >= 2");
}

double max_abs_over_classes(const ShapAttribution& a, std::size_t row,
                            std::size_t feature) {
    double m = 0.0;
    for (std::size_t c = 0; c < a.n_classes; ++c) {
        m = std::max(m, std::abs(a.value(row, c, feature)));
    }
    return m;
}

std::vector<double> mean_max_abs(const ShapAttribution& a) {
    std::vector<double> out(a.n_features, 0.0);
    for (std::size_t f = 0; f < a.n_features; ++f) {
        double sum = 0.0;
        for (std::size_t r = 0; r < a.n_rows; ++r) {
            sum += max_abs_over_classes(a, r, f);
        }
        out[f] = sum / static_cast<double>(a.n_rows);
    }
    return out;
}

void format_cell(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

double marginal_entropy(const FeatureColumn& col, const BinningSpec& b) {
    check_binning(b);
    if (col.values.empty()) throw std::invalid_argument("empty column");
    const auto assignment = quantile_bins(col.values, b.bins);
    std::vector<std::uint64_t> counts(b.bins, 0);
    for (auto a : assignment) counts[a] += 1;
    return entropy_bits(counts, col.values.size());
}

double mutual_information(const FeatureColumn& col, const Labeling& labels,
                          const BinningSpec& b) {
    check_binning(b);
    if (col.values.size() != labels.ids.size()) {
        throw std::invalid_argument("column and labeling lengths differ");
    }
    if (col.values.empty()) throw std::invalid_argument("empty column");

    const auto xs = quantile_bins(col.values, b.bins);
    const std::size_t kx = b.bins;
    const std::size_t ky = labels.cardinality();
    const std::uint64_t n = col.values.size();

    std::vector<std::uint64_t> joint(kx * ky, 0);
    std::vector<std::uint64_t> mx(kx, 0);
    std::vector<std::uint64_t> my(ky, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        joint[xs[i] * ky + labels.ids[i]] += 1;
        mx[xs[i]] += 1;
        my[labels.ids[i]] += 1;
    }
    const double mi =
        entropy_bits(mx, n) + entropy_bits(my, n) - entropy_bits(joint, n);
    return std::max(mi, 0.0);
}

std::vector<double> tradeoff_score(const std::vector<double>& utility,
                                   const std::vector<double>& privacy) {
    if (utility.size() != privacy.size()) {
        throw std::invalid_argument("utility and privacy score lengths differ");
    }
    if (utility.empty()) throw std::invalid_argument("empty score vectors");
    for (double v : utility) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite utility score");
    }
    for (double v : privacy) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite privacy score");
    }

    auto normalize = [](const std::vector<double>& x) {
        const auto mm = kernels::min_max(x.data(), x.size());
        std::vector<double> out(x.size());
        if (mm.max == mm.min) {
            std::fill(out.begin(), out.end(), 0.5);
            return out;
        }
        const double range = mm.max - mm.min;
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = (x[i] - mm.min) / range;
        }
        return out;
    };

    const std::vector<double> u = normalize(utility);
    const std::vector<double> p = normalize(privacy);
    std::vector<double> score(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) score[i] = u[i] - p[i];
    return score;
}

ShapAttribution shapley(const Forest& f, const Dataset& data,
                        const Dataset& background, std::size_t permutations,
                        std::uint64_t seed, unsigned threads) {
    if (permutations == 0) throw std::invalid_argument("permutations must be >= 1");
    const std::size_t d = f.feature_names.size();
    const std::size_t n_classes = f.n_classes();
    const std::size_t n_rows = data.rows();
    if (n_rows == 0) throw std::invalid_argument("empty attribution dataset");

    // row-major copies of the projected views
    auto matrix_of = [&](const Dataset& ds) {
        std::vector<double> m;
        const auto proj_names = f.feature_names;
        std::vector<const std::vector<double>*> cols(d);
        if (ds.dim() == d) {
            bool match = true;
            for (std::size_t i = 0; i < d; ++i) {
                if (ds.features[i].name != proj_names[i]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                for (std::size_t i = 0; i < d; ++i) cols[i] = &ds.features[i].values;
            } else {
                throw std::invalid_argument("dataset columns do not match the forest");
            }
        } else {
            for (std::size_t i = 0; i < d; ++i) {
                const std::size_t idx = f.trained_on.indices[i];
                if (idx >= ds.dim() || ds.features[idx].name != proj_names[i]) {
                    throw std::invalid_argument(
                        "dataset columns do not match the forest");
                }
                cols[i] = &ds.features[idx].values;
            }
        }
        m.resize(ds.rows() * d);
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            for (std::size_t c = 0; c < d; ++c) m[r * d + c] = (*cols[c])[r];
        }
        return m;
    };

    const std::vector<double> rows_matrix = matrix_of(data);
    std::vector<double> bg_matrix = matrix_of(background);
    std::size_t n_bg = background.rows();

    constexpr std::size_t kMaxBackground = 256;
    if (n_bg > kMaxBackground) {
        std::vector<std::size_t> pick(n_bg);
        for (std::size_t i = 0; i < n_bg; ++i) pick[i] = i;
        Rng rng(mix_seed(seed, 0xb4c6u));
        rng.sample_front(pick, kMaxBackground);
        pick.resize(kMaxBackground);
        std::sort(pick.begin(), pick.end());
        std::vector<double> reduced(kMaxBackground * d);
        for (std::size_t i = 0; i < kMaxBackground; ++i) {
            std::copy_n(bg_matrix.data() + pick[i] * d, d, reduced.data() + i * d);
        }
        bg_matrix = std::move(reduced);
        n_bg = kMaxBackground;
    }

    // expected model output over the background sample
    std::vector<double> baseline(n_classes, 0.0);
    for (std::size_t b = 0; b < n_bg; ++b) {
        const auto out = f.vote_fractions(bg_matrix.data() + b * d);
        for (std::size_t c = 0; c < n_classes; ++c) baseline[c] += out[c];
    }
    for (auto& v : baseline) v /= static_cast<double>(n_bg);

    ShapAttribution result;
    result.n_rows = n_rows;
    result.n_classes = n_classes;
    result.n_features = d;
    result.values.assign(n_rows * n_classes * d, 0.0);
    result.baseline = baseline;

    parallel_for(n_rows, threads, [&](std::size_t row) {
        Rng rng(mix_seed(seed, row));
        const double* x = rows_matrix.data() + row * d;
        double* phi = result.values.data() + row * n_classes * d;

        std::vector<double> hybrid = bg_matrix;  // progressively overwritten
        std::vector<std::size_t> order(d);
        std::vector<double> prev(n_classes);
        std::vector<double> cur(n_classes);

        for (std::size_t p = 0; p < permutations; ++p) {
            std::copy(bg_matrix.begin(), bg_matrix.end(), hybrid.begin());
            for (std::size_t i = 0; i < d; ++i) order[i] = i;
            rng.shuffle(order);
            prev = baseline;
            for (std::size_t step = 0; step < d; ++step) {
                const std::size_t feat = order[step];
                std::fill(cur.begin(), cur.end(), 0.0);
                for (std::size_t b = 0; b < n_bg; ++b) {
                    hybrid[b * d + feat] = x[feat];
                    const auto out = f.vote_fractions(hybrid.data() + b * d);
                    for (std::size_t c = 0; c < n_classes; ++c) cur[c] += out[c];
                }
                for (auto& v : cur) v /= static_cast<double>(n_bg);
                for (std::size_t c = 0; c < n_classes; ++c) {
                    phi[c * d + feat] += cur[c] - prev[c];
                }
                prev = cur;
            }
        }
        const double scale = 1.0 / static_cast<double>(permutations);
        for (std::size_t i = 0; i < n_classes * d; ++i) phi[i] *= scale;
    });

    return result;
}

ShapAttribution shapley(const Forest& f, const Dataset& data,
                        std::size_t permutations, std::uint64_t seed,
                        unsigned threads) {
    return shapley(f, data, data, permutations, seed, threads);
}

std::string score_method_name(ScoreMethod m) {
    switch (m) {
        case ScoreMethod::entropy_privacy: return "entropy_privacy";
        case ScoreMethod::mi_utility: return "mi_utility";
        case ScoreMethod::tradeoff: return "tradeoff";
        case ScoreMethod::shap: return "shap";
        case ScoreMethod::gini: return "gini";
    }
    return "unknown";
}

ScoreMethod score_method_from_name(const std::string& name) {
    if (name == "entropy_privacy" || name == "entropy") return ScoreMethod::entropy_privacy;
    if (name == "mi_utility" || name == "mi") return ScoreMethod::mi_utility;
    if (name == "tradeoff") return ScoreMethod::tradeoff;
    if (name == "shap") return ScoreMethod::shap;
    if (name == "gini") return ScoreMethod::gini;
    throw std::invalid_argument("unknown scoring method '" + name + "'");
}

void validate(const ScoreTable& t) {
    const std::size_t d = t.feature_names.size();
    if (d == 0) throw std::invalid_argument("score table has no features");
    for (const auto* vec : {&t.utility, &t.identifiability}) {
        if (!vec->has_value()) continue;
        if ((*vec)->size() != d) {
            throw std::invalid_argument("score vector length differs from d");
        }
        for (double v : **vec) {
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite score");
        }
    }
    if (!t.utility && !t.identifiability) {
        throw std::invalid_argument("score table has no score vectors");
    }
}

ScoreTable shap_scores(const Dataset& ds, const FeatureSubset& subset,
                       const SplitSpec& split_spec, const ForestConfig& cfg,
                       std::size_t permutations, std::uint64_t seed,
                       unsigned threads) {
    auto [train_ds, test_ds] = split(ds, split_spec);
    const Forest f_task = train(train_ds, Target::task, subset, cfg, threads);
    const Forest f_user = train(train_ds, Target::user, subset, cfg, threads);
    const Dataset proj_train = project(train_ds, subset);

    const ShapAttribution s_task = shapley(f_task, proj_train, proj_train,
                                           permutations, mix_seed(seed, 1), threads);
    const ShapAttribution s_user = shapley(f_user, proj_train, proj_train,
                                           permutations, mix_seed(seed, 2), threads);

    ScoreTable table;
    table.method = ScoreMethod::shap;
    table.feature_names = proj_train.feature_names();
    table.utility = mean_max_abs(s_task);
    table.identifiability = mean_max_abs(s_user);
    validate(table);
    return table;
}

ScoreTable gini_scores(const Dataset& ds, const FeatureSubset& subset,
                       const SplitSpec& split_spec, const ForestConfig& cfg,
                       unsigned threads) {
    auto [train_ds, test_ds] = split(ds, split_spec);
    const Forest f_task = train(train_ds, Target::task, subset, cfg, threads);
    const Forest f_user = train(train_ds, Target::user, subset, cfg, threads);

    ScoreTable table;
    table.method = ScoreMethod::gini;
    table.feature_names = f_task.feature_names;
    table.utility = gini_importance(f_task);
    table.identifiability = gini_importance(f_user);
    validate(table);
    return table;
}

ScoreTable entropy_scores(const Dataset& ds, const BinningSpec& b) {
    ScoreTable table;
    table.method = ScoreMethod::entropy_privacy;
    table.feature_names = ds.feature_names();
    std::vector<double> c;
    c.reserve(ds.dim());
    for (const auto& col : ds.features) c.push_back(marginal_entropy(col, b));
    table.identifiability = std::move(c);
    validate(table);
    return table;
}

ScoreTable mi_scores(const Dataset& ds, const BinningSpec& b) {
    ScoreTable table;
    table.method = ScoreMethod::mi_utility;
    table.feature_names = ds.feature_names();
    std::vector<double> v;
    v.reserve(ds.dim());
    for (const auto& col : ds.features) {
        v.push_back(mutual_information(col, ds.task_labels, b));
    }
    table.utility = std::move(v);
    validate(table);
    return table;
}

ScoreTable tradeoff_scores(const Dataset& ds, const BinningSpec& b) {
    std::vector<double> util;
    std::vector<double> priv;
    util.reserve(ds.dim());
    priv.reserve(ds.dim());
    for (const auto& col : ds.features) {
        util.push_back(mutual_information(col, ds.task_labels, b));
        priv.push_back(marginal_entropy(col, b));
    }
    ScoreTable table;
    table.method = ScoreMethod::tradeoff;
    table.feature_names = ds.feature_names();
    table.utility = tradeoff_score(util, priv);
    validate(table);
    return table;
}

std::string score_table_to_csv(const ScoreTable& t) {
    std::string out = "feature,name,v,c\n";
    for (std::size_t i = 0; i < t.feature_names.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += t.feature_names[i];
        out += ',';
        if (t.utility) format_cell(out, (*t.utility)[i]);
        out += ',';
        if (t.identifiability) format_cell(out, (*t.identifiability)[i]);
        out += '\n';
    }
    return out;
}

std::string score_table_to_json(const ScoreTable& t) {
    json doc;
    doc["format"] = "datamin.scores";
    doc["version"] = 1;
    doc["method"] = score_method_name(t.method);
    doc["feature_names"] = t.feature_names;
    doc["utility"] = t.utility ? json(*t.utility) : json(nullptr);
    doc["identifiability"] =
        t.identifiability ? json(*t.identifiability) : json(nullptr);
    return doc.dump(2);
}

}  // namespace datamin
