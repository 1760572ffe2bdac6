#include "datamin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace datamin {

namespace {

using json = nlohmann::ordered_json;

json row_to_json(const TradeoffRow& row) {
    json j;
    j["threshold"] = row.threshold;
    j["accuracy"] = row.accuracy;
    j["identifiability"] = row.identifiability;
    j["rel_eff"] = row.rel_eff ? json(*row.rel_eff) : json(nullptr);
    j["n_features"] = row.n_features;
    j["subset"] = row.subset.indices;
    return j;
}

TradeoffRow row_from_json(const json& j) {
    TradeoffRow row;
    row.threshold = j.at("threshold").get<double>();
    row.accuracy = j.at("accuracy").get<double>();
    row.identifiability = j.at("identifiability").get<double>();
    if (!j.at("rel_eff").is_null()) row.rel_eff = j.at("rel_eff").get<double>();
    row.n_features = j.at("n_features").get<std::size_t>();
    row.subset.indices = j.at("subset").get<std::vector<std::size_t>>();
    return row;
}

TradeoffRow make_row(double threshold, const MinimizationResult& result,
                     const TradeoffRow& baseline, bool against_baseline) {
    TradeoffRow row;
    row.threshold = threshold;
    row.accuracy = result.evaluation.task_accuracy;
    row.identifiability = result.evaluation.identifiability;
    row.n_features = result.chosen.size();
    row.subset = result.chosen;
    if (against_baseline) {
        row.rel_eff = relative_effectiveness(row.accuracy, row.identifiability,
                                             baseline.accuracy,
                                             baseline.identifiability);
    }
    return row;
}

}  // namespace

std::optional<double> relative_effectiveness(double acc_i, double ident_i,
                                             double acc_0, double ident_0) {
    // accepts fractions or percentage-scaled values; the result is the same
    for (double v : {acc_i, ident_i, acc_0, ident_0}) {
        if (!(v >= 0.0 && v <= 100.0)) {
            throw std::invalid_argument(
                "relative_effectiveness inputs must lie in [0,1] (or [0,100])");
        }
    }
    const double d_acc = acc_i - acc_0;
    if (d_acc == 0.0) return std::nullopt;
    const double ratio = (ident_i - ident_0) / d_acc;
    if (!(ratio > 0.0)) return std::nullopt;
    return std::log(ratio);
}

TradeoffReport sweep_from_log(const EvaluationLog& log,
                              std::vector<double> thresholds, ThresholdBase base,
                              const std::string& method,
                              const std::string& dataset_name,
                              const std::string& fingerprint,
                              const std::vector<std::string>& feature_names) {
    if (thresholds.empty()) throw std::invalid_argument("no thresholds given");
    for (double l : thresholds) {
        if (!(l >= 0.0 && l <= 1.0)) {
            throw std::invalid_argument("thresholds must lie in [0,1]");
        }
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    TradeoffReport report;
    const MinimizationResult zero = select_minimal(log, {0.0, base});
    report.baseline = make_row(0.0, zero, {}, false);

    for (double l : thresholds) {
        const MinimizationResult result = select_minimal(log, {l, base});
        report.rows.push_back(make_row(l, result, report.baseline, true));
    }
    report.dataset_name = dataset_name;
    report.dataset_fingerprint = fingerprint;
    report.method = method;
    report.seed = log.config.seed;
    report.feature_names = feature_names;
    return report;
}

TradeoffReport threshold_sweep(const Dataset& ds, std::vector<double> thresholds,
                               const SweepConfig& cfg,
                               const std::string& dataset_name) {
    FeatureSubset candidates = FeatureSubset::full(ds.dim());
    std::string method = "exhaustive";
    if (cfg.mode == SweepConfig::Mode::hybrid) {
        ScoreTable table;
        switch (cfg.scoring) {
            case ScoreMethod::shap:
                table = shap_scores(ds, candidates, cfg.split, cfg.forest,
                                    cfg.hybrid.permutations,
                                    cfg.hybrid.attribution_seed,
                                    cfg.hybrid.search.threads);
                break;
            case ScoreMethod::gini:
                table = gini_scores(ds, candidates, cfg.split, cfg.forest,
                                    cfg.hybrid.search.threads);
                break;
            case ScoreMethod::mi_utility:
                table = mi_scores(ds, cfg.hybrid.bins);
                break;
            case ScoreMethod::entropy_privacy:
                table = entropy_scores(ds, cfg.hybrid.bins);
                break;
            case ScoreMethod::tradeoff:
                table = tradeoff_scores(ds, cfg.hybrid.bins);
                break;
        }
        GreedyStrategy stage1;
        stage1.order_by = stage_order_for(cfg.scoring);
        stage1.stop = GreedyStop::top_k(cfg.keep);
        candidates = greedy_select(table, stage1);
        method = "hybrid(scoring=" + score_method_name(cfg.scoring) +
                 ", keep=" + std::to_string(cfg.keep) + ") + exhaustive";
    }

    const EvaluationLog log =
        enumerate_subsets(ds, candidates, cfg.split, cfg.forest, cfg.hybrid.search);
    return sweep_from_log(log, std::move(thresholds), cfg.base, method,
                          dataset_name, dataset_fingerprint(ds),
                          ds.feature_names());
}

std::string report_to_json(const TradeoffReport& report) {
    json doc;
    doc["format"] = "datamin.report";
    doc["version"] = 1;
    json meta;
    meta["dataset"] = report.dataset_name;
    meta["fingerprint"] = report.dataset_fingerprint;
    meta["method"] = report.method;
    meta["seed"] = report.seed;
    meta["config"] =
        report.config_json.empty() ? json(nullptr) : json::parse(report.config_json);
    meta["generated_at"] =
        report.generated_at.empty() ? json(nullptr) : json(report.generated_at);
    meta["feature_names"] = report.feature_names;
    doc["meta"] = std::move(meta);
    doc["baseline"] = row_to_json(report.baseline);
    json rows = json::array();
    for (const auto& row : report.rows) rows.push_back(row_to_json(row));
    doc["rows"] = std::move(rows);
    return doc.dump(2);
}

TradeoffReport report_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format") != "datamin.report" || doc.at("version") != 1) {
        throw std::runtime_error("unrecognized report document");
    }
    TradeoffReport report;
    const json& meta = doc.at("meta");
    report.dataset_name = meta.at("dataset").get<std::string>();
    report.dataset_fingerprint = meta.at("fingerprint").get<std::string>();
    report.method = meta.at("method").get<std::string>();
    report.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("config").is_null()) {
        report.config_json = meta.at("config").dump();
    }
    if (!meta.at("generated_at").is_null()) {
        report.generated_at = meta.at("generated_at").get<std::string>();
    }
    report.feature_names =
        meta.at("feature_names").get<std::vector<std::string>>();
    report.baseline = row_from_json(doc.at("baseline"));
    for (const json& j : doc.at("rows")) report.rows.push_back(row_from_json(j));
    return report;
}

std::string curve_csv(const std::vector<CurvePoint>& points, double base_accuracy,
                      double base_identifiability) {
    if (points.empty()) throw std::invalid_argument("no curve points");
    std::string out = "n_features,accuracy_loss,identifiability_reduction,method\n";
    char buf[96];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,", p.n_features,
                      base_accuracy - p.accuracy,
                      base_identifiability - p.identifiability);
        out += buf;
        out += p.method;
        out += '\n';
    }
    return out;
}

std::vector<CurvePoint> curve_from_report(const TradeoffReport& report) {
    std::vector<CurvePoint> points;
    points.reserve(report.rows.size());
    for (const auto& row : report.rows) {
        points.push_back(
            {row.n_features, row.accuracy, row.identifiability, report.method});
    }
    return points;
}

}  // namespace datamin
