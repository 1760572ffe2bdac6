#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"

#include "datamin/forest.hpp"
#include "datamin/rng.hpp"
#include "test_util.hpp"

using namespace datamin;

namespace {

ForestConfig small_config(std::uint64_t seed, std::size_t trees = 25) {
    ForestConfig cfg;
    cfg.n_trees = trees;
    cfg.seed = seed;
    return cfg;
}

double majority_class_frequency(const Labeling& labels) {
    std::vector<std::size_t> counts(labels.cardinality(), 0);
    for (auto id : labels.ids) counts[id] += 1;
    std::size_t best = 0;
    for (auto c : counts) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(labels.ids.size());
}

}  // namespace

TEST_CASE("training on linearly separable data reaches accuracy 1") {
    const Dataset ds = testutil::separable_dataset(200, 42);
    const Forest f = train(ds, Target::task, FeatureSubset::full(2), small_config(1));
    CHECK(accuracy(f, ds) == 1.0);
}

TEST_CASE("constant target yields a constant predictor") {
    std::vector<double> f0{1.0, 2.0, 3.0, 4.0};
    const Dataset ds = testutil::make_dataset({{"f0", f0}},
                                              {"same", "same", "same", "same"},
                                              {"u0", "u1", "u0", "u1"});
    const Forest f = train(ds, Target::task, FeatureSubset::full(1), small_config(2));
    for (double v : {0.0, 2.5, 100.0}) {
        CHECK(f.class_labels[f.predict(&v)] == "same");
    }
    CHECK(accuracy(f, ds) == 1.0);
}

TEST_CASE("empty subsets are rejected") {
    const Dataset ds = testutil::separable_dataset(20, 5);
    FeatureSubset empty;
    CHECK_THROWS_AS(train(ds, Target::task, empty, small_config(3)),
                    std::invalid_argument);
}

TEST_CASE("constant predictor scores the majority-class frequency") {
    // task labels constant in training, so the forest always answers "only";
    // on a balanced k-class test set that is exactly the majority frequency
    const std::size_t n = 120;
    std::vector<double> f0(n);
    std::vector<std::string> task_train(n, "only");
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = static_cast<double>(i);
        user[i] = "u" + std::to_string(i % 2);
    }
    const Dataset train_ds = testutil::make_dataset({{"f0", f0}}, task_train, user);
    const Forest f =
        train(train_ds, Target::task, FeatureSubset::full(1), small_config(4));

    std::vector<std::string> task_test(n);
    for (std::size_t i = 0; i < n; ++i) {
        task_test[i] = (i % 3 == 0) ? "only" : ("other" + std::to_string(i % 3));
    }
    const Dataset test_ds = testutil::make_dataset({{"f0", f0}}, task_test, user);
    const double expected = majority_class_frequency(test_ds.task_labels);
    CHECK(accuracy(f, test_ds) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("independent user labels stay in the binomial band around 1/k") {
    // features carry no user information; test accuracy should sit within
    // 3 sigma of 1/9 under the binomial null at the test-set size
    const std::size_t n = 1000;
    const std::size_t n_users = 9;
    Rng rng(99);
    std::vector<double> f0(n);
    std::vector<double> f1(n);
    std::vector<std::string> task(n);
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = rng.uniform(0.0, 1.0);
        f1[i] = rng.uniform(0.0, 1.0);
        task[i] = (f0[i] < 0.5) ? "A" : "B";
        user[i] = "u" + std::to_string(i % n_users);  // balanced, independent
    }
    const Dataset ds = testutil::make_dataset({{"f0", f0}, {"f1", f1}}, task, user);
    const SplitSpec spec{0.3, 21, StratifyOn::task};
    auto [train_ds, test_ds] = split(ds, spec);
    const Forest f =
        train(train_ds, Target::user, FeatureSubset::full(2), small_config(6, 40));
    const double acc = accuracy(f, test_ds);
    const double p = 1.0 / static_cast<double>(n_users);
    const double sigma =
        std::sqrt(p * (1.0 - p) / static_cast<double>(test_ds.rows()));
    CHECK(acc >= p - 3.0 * sigma);
    CHECK(acc <= p + 3.0 * sigma);
}

TEST_CASE("evaluate_pair flags label leakage") {
    // the single feature is the user id itself
    const std::size_t n = 180;
    Rng rng(7);
    std::vector<double> leak(n);
    std::vector<std::string> task(n);
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto uid = i % 6;
        leak[i] = static_cast<double>(uid);
        task[i] = (rng.next_below(2) == 0) ? "A" : "B";
        user[i] = "u" + std::to_string(uid);
    }
    const Dataset ds = testutil::make_dataset({{"leak", leak}}, task, user);
    const PairEvaluation eval =
        evaluate_pair(ds, FeatureSubset::full(1), {0.3, 3, StratifyOn::task},
                      small_config(8, 30));
    CHECK(eval.identifiability == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eval.task_accuracy < 0.75);  // task labels are coin flips
}

TEST_CASE("evaluate_pair uses one config for both models") {
    const Dataset ds = testutil::separable_dataset(80, 31);
    const PairModels models = evaluate_pair_models(
        ds, FeatureSubset::full(2), {0.3, 5, StratifyOn::task}, small_config(9));
    CHECK(models.task_model.config == models.user_model.config);
    CHECK(models.task_model.trained_on == models.user_model.trained_on);
}

TEST_CASE("gini importance concentrates on the splitting feature") {
    // f1 is constant, f0 separates: all splits use f0
    const std::size_t n = 100;
    Rng rng(12);
    std::vector<double> f0(n);
    std::vector<double> f1(n, 3.0);
    std::vector<std::string> task(n);
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = rng.uniform(-1.0, 1.0);
        task[i] = f0[i] < 0.0 ? "A" : "B";
        user[i] = "u" + std::to_string(i % 3);
    }
    const Dataset ds = testutil::make_dataset({{"f0", f0}, {"f1", f1}}, task, user);
    const Forest f = train(ds, Target::task, FeatureSubset::full(2),
                           small_config(13, 30));
    const std::vector<double> imp = gini_importance(f);
    CHECK(imp[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(imp[1] == 0.0);
}

TEST_CASE("duplicated informative features share the importance") {
    const std::size_t n = 150;
    Rng rng(14);
    std::vector<double> f0(n);
    std::vector<std::string> task(n);
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = rng.uniform(-1.0, 1.0);
        task[i] = f0[i] < 0.0 ? "A" : "B";
        user[i] = "u" + std::to_string(i % 3);
    }
    const std::vector<double> copy = f0;
    const Dataset ds =
        testutil::make_dataset({{"f0", f0}, {"twin", copy}}, task, user);
    ForestConfig cfg = small_config(15, 60);
    cfg.features_per_split = 1;  // forces both copies into play
    const Forest f = train(ds, Target::task, FeatureSubset::full(2), cfg);
    const std::vector<double> imp = gini_importance(f);
    CHECK(imp[0] + imp[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(imp[0] > 0.0);
    CHECK(imp[1] > 0.0);
    CHECK(std::abs(imp[0] - imp[1]) < 0.1);
}

TEST_CASE("importance is a normalized nonnegative vector") {
    const Dataset ds = testutil::separable_dataset(120, 17);
    for (std::uint64_t seed : {0ull, 5ull, 9ull}) {
        const Forest f =
            train(ds, Target::user, FeatureSubset::full(2), small_config(seed));
        const std::vector<double> imp = gini_importance(f);
        double total = 0.0;
        for (double v : imp) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("training is identical across thread counts") {
    const Dataset ds = testutil::separable_dataset(150, 23);
    const ForestConfig cfg = small_config(24, 16);
    const Forest one = train(ds, Target::task, FeatureSubset::full(2), cfg, 1);
    const Forest many = train(ds, Target::task, FeatureSubset::full(2), cfg, 4);
    CHECK(one == many);
}

TEST_CASE("a label-copy feature never lowers training accuracy") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const std::size_t n = 90;
        Rng rng(mix_seed(100, seed));
        std::vector<double> noisy(n);
        std::vector<double> copy(n);
        std::vector<std::string> task(n);
        std::vector<std::string> user(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool cls = rng.next_below(2) == 0;
            noisy[i] = rng.uniform(0.0, 1.0);  // weakly related at best
            copy[i] = cls ? 1.0 : 0.0;         // exact recode of the label
            task[i] = cls ? "A" : "B";
            user[i] = "u" + std::to_string(i % 4);
        }
        const Dataset without =
            testutil::make_dataset({{"noisy", noisy}}, task, user);
        const Dataset with = testutil::make_dataset(
            {{"noisy", noisy}, {"copy", copy}}, task, user);
        const ForestConfig cfg = small_config(seed, 40);
        const double acc_without = accuracy(
            train(without, Target::task, FeatureSubset::full(1), cfg), without);
        const double acc_with = accuracy(
            train(with, Target::task, FeatureSubset::full(2), cfg), with);
        CHECK(acc_with >= acc_without);
    }
}

TEST_CASE("forest JSON round trip") {
    const Dataset ds = testutil::separable_dataset(60, 29);
    ForestConfig cfg = small_config(30, 8);
    cfg.max_depth = 4;
    const Forest f = train(ds, Target::user, FeatureSubset::full(2), cfg);
    const Forest back = forest_from_json(forest_to_json(f));
    CHECK(back == f);
    CHECK(accuracy(back, ds) == accuracy(f, ds));
}

TEST_CASE("accuracy rejects mismatched columns") {
    const Dataset ds = testutil::separable_dataset(40, 33);
    const Forest f = train(ds, Target::task, FeatureSubset::full(2), small_config(1));
    Dataset renamed = ds;
    renamed.features[0].name = "other";
    CHECK_THROWS_AS(accuracy(f, renamed), std::invalid_argument);
}
