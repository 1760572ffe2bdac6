#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "datamin/metrics.hpp"
#include "datamin/synthbench.hpp"
#include "test_util.hpp"

using namespace datamin;

TEST_CASE("relative effectiveness reproduces published pairs") {
    struct Entry {
        double acc_i, ident_i, acc_0, ident_0, expected;
    };
    // (acc_i, ident_i) against the zero-threshold base (acc_0, ident_0)
    const std::vector<Entry> entries = {
        {0.9905, 0.6981, 0.9991, 0.7798, 2.251},
        {0.9515, 0.6060, 0.9991, 0.7798, 1.295},
        {0.6996, 0.5086, 0.7066, 0.6202, 2.769},
        {0.6903, 0.4980, 0.7066, 0.6202, 2.014},
        {0.6361, 0.4647, 0.7066, 0.6202, 0.791},
        {0.4993, 0.2661, 0.7066, 0.6202, 0.535},
        {0.2134, 0.1704, 0.7066, 0.6202, -0.092},
    };
    for (const auto& e : entries) {
        const auto r =
            relative_effectiveness(e.acc_i, e.ident_i, e.acc_0, e.ident_0);
        REQUIRE(r.has_value());
        CHECK(std::abs(*r - e.expected) <= 0.005);
    }
}

TEST_CASE("relative effectiveness edge cases") {
    CHECK(!relative_effectiveness(0.9, 0.5, 0.9, 0.7).has_value());  // equal acc
    CHECK(!relative_effectiveness(0.8, 0.7, 0.9, 0.7).has_value());  // zero ratio
    CHECK(!relative_effectiveness(0.8, 0.9, 0.9, 0.7).has_value());  // negative
    CHECK_THROWS_AS(relative_effectiveness(-0.1, 0.5, 0.9, 0.7),
                    std::invalid_argument);

    // sign behavior: ratio > 1 gives positive, ratio in (0,1) negative
    const auto steep = relative_effectiveness(0.89, 0.60, 0.90, 0.70);
    REQUIRE(steep.has_value());
    CHECK(*steep > 0.0);
    const auto shallow = relative_effectiveness(0.80, 0.695, 0.90, 0.70);
    REQUIRE(shallow.has_value());
    CHECK(*shallow < 0.0);
}

TEST_CASE("relative effectiveness is scale-form invariant") {
    Rng rng(15);
    for (int rep = 0; rep < 50; ++rep) {
        const double acc_0 = rng.uniform(0.3, 1.0);
        const double ident_0 = rng.uniform(0.1, 1.0);
        const double acc_i = rng.uniform(0.0, acc_0);
        const double ident_i = rng.uniform(0.0, ident_0);
        const auto frac = relative_effectiveness(acc_i, ident_i, acc_0, ident_0);
        const auto pct = relative_effectiveness(acc_i * 100.0, ident_i * 100.0,
                                                acc_0 * 100.0, ident_0 * 100.0);
        CHECK(frac.has_value() == pct.has_value());
        if (frac) CHECK(*frac == doctest::Approx(*pct).epsilon(1e-12));
    }
}

namespace {

SweepConfig sweep_config() {
    SweepConfig cfg;
    cfg.split = {0.3, 13, StratifyOn::task};
    cfg.forest = {25, {}, 2, {}, 31};
    return cfg;
}

SynthSpec sweep_spec() {
    SynthSpec spec;
    spec.n_rows = 150;
    spec.n_classes = 2;
    spec.n_users = 5;
    spec.task_only = 2;
    spec.user_only = 1;
    spec.noise = 1;
    spec.signal_strength = 0.95;
    spec.seed = 404;
    return spec;
}

}  // namespace

TEST_CASE("threshold sweep produces the default grid") {
    const Dataset ds = generate(sweep_spec());
    const TradeoffReport report =
        threshold_sweep(ds, default_threshold_grid(), sweep_config(), "sweep_spec");

    CHECK(report.rows.size() == 6);
    CHECK(report.rows.front().threshold == 0.0);
    CHECK(report.rows.back().threshold == 1.0);
    CHECK(!report.rows.front().rel_eff.has_value());  // N/A at the base row

    double prev_l = -1.0;
    double prev_ident = 1.1;
    for (const auto& row : report.rows) {
        CHECK(row.threshold > prev_l);
        CHECK(row.identifiability <= prev_ident + 1e-15);
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
        prev_l = row.threshold;
        prev_ident = row.identifiability;
    }
    CHECK(report.baseline.threshold == 0.0);
    CHECK(report.baseline.accuracy == report.rows.front().accuracy);
    CHECK(report.dataset_fingerprint == dataset_fingerprint(ds));
}

TEST_CASE("report json round trips losslessly") {
    const Dataset ds = generate(sweep_spec());
    TradeoffReport report =
        threshold_sweep(ds, {0.0, 0.1, 1.0}, sweep_config(), "roundtrip");
    report.config_json = R"({"method":"exhaustive","threads":2})";
    report.generated_at = "2026-01-01T00:00:00Z";

    const std::string text = report_to_json(report);
    const TradeoffReport back = report_from_json(text);
    CHECK(back == report);
    CHECK(report_to_json(back) == text);
}

TEST_CASE("curve export is anchored at the full-feature point") {
    std::vector<CurvePoint> points = {
        {5, 0.97, 0.62, "exhaustive"},
        {3, 0.95, 0.48, "exhaustive"},
        {1, 0.80, 0.20, "exhaustive"},
    };
    const std::string csv = curve_csv(points, 0.97, 0.62);
    CHECK(csv.find("n_features,accuracy_loss,identifiability_reduction,method\n") ==
          0);
    CHECK(csv.find("5,0,0,exhaustive\n") != std::string::npos);
    CHECK(curve_csv(points, 0.97, 0.62) == csv);  // stable bytes
    CHECK_THROWS_AS(curve_csv({}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("curve points derive from report rows") {
    const Dataset ds = generate(sweep_spec());
    const TradeoffReport report =
        threshold_sweep(ds, {0.0, 0.3}, sweep_config(), "curve");
    const auto points = curve_from_report(report);
    REQUIRE(points.size() == report.rows.size());
    const std::string csv =
        curve_csv(points, report.baseline.accuracy, report.baseline.identifiability);
    // threshold-0 row coincides with the baseline: zero loss, zero reduction
    CHECK(csv.find(std::to_string(report.rows[0].n_features) + ",0,0,") !=
          std::string::npos);
}

TEST_CASE("sweep thresholds are validated") {
    const Dataset ds = generate(sweep_spec());
    CHECK_THROWS_AS(threshold_sweep(ds, {}, sweep_config(), ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(threshold_sweep(ds, {0.5, 1.2}, sweep_config(), ""),
                    std::invalid_argument);
}
