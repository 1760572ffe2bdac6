#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "datamin/attribution.hpp"
#include "datamin/metrics.hpp"
#include "datamin/synthbench.hpp"
#include "test_util.hpp"

using namespace datamin;

namespace {

SynthSpec tiny_spec() {
    SynthSpec spec;
    spec.n_rows = 140;
    spec.n_classes = 3;
    spec.n_users = 4;
    spec.task_only = 1;
    spec.user_only = 1;
    spec.noise = 1;
    spec.signal_strength = 1.0;
    spec.seed = 71;
    return spec;
}

}  // namespace

TEST_CASE("full-strength task features recode the label") {
    const Dataset ds = generate(tiny_spec());
    REQUIRE(ds.features[0].name == "task00");
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const auto recovered = static_cast<std::uint32_t>(
            std::floor(ds.features[0].values[r]));
        // class names are zero-padded, so label ids follow numeric order
        CHECK(recovered == ds.task_labels.ids[r]);
    }
}

TEST_CASE("generation is byte-stable per seed") {
    const SynthSpec spec = tiny_spec();
    CHECK(to_csv(generate(spec)) == to_csv(generate(spec)));
    SynthSpec other = spec;
    other.seed += 1;
    CHECK(to_csv(generate(other)) != to_csv(generate(spec)));
}

TEST_CASE("noise features pass a permutation MI null test") {
    SynthSpec spec = tiny_spec();
    spec.n_rows = 400;
    const Dataset ds = generate(spec);
    const std::size_t noise_idx = ds.dim() - 1;
    REQUIRE(ds.features[noise_idx].name.rfind("noise", 0) == 0);
    const BinningSpec bins;

    for (const Labeling* labels : {&ds.task_labels, &ds.user_labels}) {
        const double observed =
            mutual_information(ds.features[noise_idx], *labels, bins);
        Rng rng(5150);
        std::vector<std::string> shuffled(ds.rows());
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            shuffled[i] = labels->value_of(i);
        }
        double null_max = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            rng.shuffle(shuffled);
            null_max =
                std::max(null_max, mutual_information(ds.features[noise_idx],
                                                      make_labeling(shuffled), bins));
        }
        CHECK(observed <= null_max);
    }
}

TEST_CASE("degenerate specs are rejected") {
    SynthSpec spec = tiny_spec();
    spec.n_classes = 1;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = tiny_spec();
    spec.task_only = spec.user_only = spec.shared = spec.noise = 0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = tiny_spec();
    spec.signal_strength = 0.0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("oracle table enumerates every non-empty subset") {
    const SplitSpec split_spec{0.3, 13, StratifyOn::task};
    const ForestConfig cfg{20, {}, 2, {}, 31};
    const Dataset ds = generate(tiny_spec());  // d = 3
    const OracleTable table = oracle_enumerate(ds, split_spec, cfg);
    CHECK(table.entries.size() == 7);

    // the full-set entry matches a direct evaluation under the shared
    // per-subset seed convention
    const FeatureSubset full = FeatureSubset::full(3);
    const PairEvaluation direct =
        evaluate_pair(ds, full, split_spec, subset_config(cfg, full));
    CHECK(table.entries.back().subset == full);
    CHECK(table.entries.back().task_accuracy == direct.task_accuracy);
    CHECK(table.entries.back().identifiability == direct.identifiability);
}

TEST_CASE("oracle argmin agrees with the solver on every threshold") {
    const SplitSpec split_spec{0.3, 13, StratifyOn::task};
    const ForestConfig cfg{20, {}, 2, {}, 31};
    SynthSpec spec = tiny_spec();
    spec.noise = 2;
    spec.shared = 1;  // d = 5
    spec.signal_strength = 0.9;
    const Dataset ds = generate(spec);

    const OracleTable table = oracle_enumerate(ds, split_spec, cfg);
    const EvaluationLog log =
        enumerate_subsets(ds, FeatureSubset::full(ds.dim()), split_spec, cfg);
    REQUIRE(table.entries.size() == log.evaluations.size());
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        CHECK(table.entries[i].subset == log.evaluations[i].subset);
        CHECK(table.entries[i].task_accuracy == log.evaluations[i].task_accuracy);
        CHECK(table.entries[i].identifiability ==
              log.evaluations[i].identifiability);
    }
    for (double l : default_threshold_grid()) {
        const OracleEntry expected = oracle_argmin(table, l);
        const MinimizationResult got = select_minimal(log, {l});
        CHECK(got.chosen == expected.subset);
    }
}

TEST_CASE("oracle rejects wide datasets") {
    SynthSpec spec = tiny_spec();
    spec.noise = 9;  // d = 11
    const Dataset ds = generate(spec);
    CHECK_THROWS_AS(oracle_enumerate(ds, SplitSpec{}, ForestConfig{}),
                    std::invalid_argument);
}

TEST_CASE("oracle tables serialize to json and back") {
    const SplitSpec split_spec{0.25, 5, StratifyOn::joint};
    const ForestConfig cfg{10, 4, 2, 1, 77};
    const Dataset ds = generate(tiny_spec());
    const OracleTable table = oracle_enumerate(ds, split_spec, cfg);
    const OracleTable back = oracle_table_from_json(oracle_table_to_json(table));
    CHECK(back.entries == table.entries);
    CHECK(back.split == table.split);
    CHECK(back.config == table.config);
}

TEST_CASE("minimization drops user-only features on clean instances") {
    // signal_strength 1 and a modest threshold: the chosen subset holds at
    // least one task feature and no user-only feature
    const SplitSpec split_spec{0.3, 29, StratifyOn::task};
    const ForestConfig cfg{25, {}, 2, {}, 41};
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SynthSpec spec = tiny_spec();
        spec.seed = seed;
        spec.n_rows = 200;
        const Dataset ds = generate(spec);
        const MinimizationResult r = exhaustive_search(
            ds, FeatureSubset::full(ds.dim()), {0.05}, split_spec, cfg);
        bool has_task_signal = false;
        for (std::size_t idx : r.chosen.indices) {
            const std::string& name = ds.features[idx].name;
            CHECK(name.rfind("user", 0) != 0);
            if (name.rfind("task", 0) == 0 || name.rfind("shared", 0) == 0) {
                has_task_signal = true;
            }
        }
        CHECK(has_task_signal);
    }
}

TEST_CASE("fixture specs stay within the oracle cap") {
    const auto specs = fixture_specs(20);
    CHECK(specs.size() == 20);
    for (const auto& spec : specs) {
        CHECK(spec.total_features() >= 2);
        CHECK(spec.total_features() <= 8);
        CHECK(spec.n_classes >= 2);
        CHECK(spec.n_users >= 2);
        // specs must be distinct instances
        CHECK(generate(spec).rows() == spec.n_rows);
    }
}

TEST_CASE("presets expose dense and sparse shapes") {
    const SynthSpec dense = dense_preset();
    CHECK(dense.total_features() == 20);
    CHECK(dense.user_only == 4);
    CHECK(dense.signal_strength == 0.9);
    const SynthSpec sparse = sparse_preset();
    CHECK(sparse.total_features() == 200);
    CHECK(sparse.shared == 200);
    CHECK(preset_by_name("dense").seed == dense.seed);
    CHECK_THROWS_AS(preset_by_name("nope"), std::invalid_argument);
}
