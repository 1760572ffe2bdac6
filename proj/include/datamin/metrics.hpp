#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datamin/dataset.hpp"
#include "datamin/solvers.hpp"

namespace datamin {

// r_i = ln((ident_i - ident_0) / (acc_i - acc_0)). Returns nullopt (printed
// as N/A) when the accuracies are equal or the ratio is not positive. The
// value only depends on the two differences, so fractions and percentages
// give the same result.
std::optional<double> relative_effectiveness(double acc_i, double ident_i,
                                             double acc_0, double ident_0);

struct TradeoffRow {
    double threshold = 0.0;
    double accuracy = 0.0;
    double identifiability = 0.0;
    std::optional<double> rel_eff;
    std::size_t n_features = 0;
    FeatureSubset subset;

    bool operator==(const TradeoffRow&) const = default;
};

struct TradeoffReport {
    TradeoffRow baseline;  // the threshold-0 row r_i is computed against
    std::vector<TradeoffRow> rows;  // sorted by threshold ascending
    std::string dataset_name;
    std::string dataset_fingerprint;
    std::string method;
    std::uint64_t seed = 0;
    std::string config_json;            // solver configuration, serialized
    std::string generated_at;           // optional timestamp, set by callers
    std::vector<std::string> feature_names;

    bool operator==(const TradeoffReport&) const = default;
};

struct SweepConfig {
    enum class Mode { exhaustive, hybrid } mode = Mode::exhaustive;
    ScoreMethod scoring = ScoreMethod::gini;  // hybrid stage 1
    std::size_t keep = 12;
    ThresholdBase base = ThresholdBase::max_over_subsets;
    SplitSpec split;
    ForestConfig forest;
    HybridOptions hybrid;
};

// Enumerates subsets once (evaluations are threshold-independent) and selects
// per threshold; thresholds are sorted and deduplicated.
TradeoffReport threshold_sweep(const Dataset& ds, std::vector<double> thresholds,
                               const SweepConfig& cfg,
                               const std::string& dataset_name = "");

// Same rows from a prebuilt evaluation log (used by the CLI and tests).
TradeoffReport sweep_from_log(const EvaluationLog& log,
                              std::vector<double> thresholds, ThresholdBase base,
                              const std::string& method,
                              const std::string& dataset_name,
                              const std::string& fingerprint,
                              const std::vector<std::string>& feature_names);

inline const std::vector<double>& default_threshold_grid() {
    static const std::vector<double> grid{0.0, 0.01, 0.03, 0.1, 0.3, 1.0};
    return grid;
}

// Versioned report document; parse(serialize(x)) == x.
std::string report_to_json(const TradeoffReport& report);
TradeoffReport report_from_json(const std::string& text);

struct CurvePoint {
    std::size_t n_features = 0;
    double accuracy = 0.0;
    double identifiability = 0.0;
    std::string method;
};

// CSV columns: n_features, accuracy_loss, identifiability_reduction, method;
// losses are relative to the given full-feature baseline.
std::string curve_csv(const std::vector<CurvePoint>& points, double base_accuracy,
                      double base_identifiability);

std::vector<CurvePoint> curve_from_report(const TradeoffReport& report);

}  // namespace datamin
