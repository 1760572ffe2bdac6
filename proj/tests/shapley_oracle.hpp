#pragma once

// Exact Shapley values by full subset enumeration — the independent oracle
// the Monte Carlo estimator is checked against. Only usable for small d.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "datamin/attribution.hpp"
#include "datamin/forest.hpp"

namespace testutil {

// value of coalition S for row x: model output averaged over the background
// rows with the features in S replaced by x's values
inline std::vector<double> coalition_value(const datamin::Forest& f,
                                           const std::vector<double>& x,
                                           const std::vector<double>& background,
                                           std::size_t n_bg, std::uint64_t mask) {
    const std::size_t d = x.size();
    std::vector<double> hybrid(d);
    std::vector<double> out(f.n_classes(), 0.0);
    for (std::size_t b = 0; b < n_bg; ++b) {
        for (std::size_t i = 0; i < d; ++i) {
            hybrid[i] = (mask & (1ull << i)) ? x[i] : background[b * d + i];
        }
        const auto fractions = f.vote_fractions(hybrid.data());
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += fractions[c];
    }
    for (auto& v : out) v /= static_cast<double>(n_bg);
    return out;
}

// exact interventional Shapley values for every (row, class, feature)
inline datamin::ShapAttribution exact_shapley(const datamin::Forest& f,
                                              const datamin::Dataset& data,
                                              const datamin::Dataset& background) {
    const std::size_t d = f.feature_names.size();
    if (d > 16) throw std::invalid_argument("exact oracle limited to small d");
    const std::size_t n_rows = data.rows();
    const std::size_t n_bg = background.rows();
    const std::size_t n_classes = f.n_classes();

    auto matrix_of = [&](const datamin::Dataset& ds) {
        std::vector<double> m(ds.rows() * d);
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                m[r * d + c] = ds.features[c].values[r];
            }
        }
        return m;
    };
    const std::vector<double> rows = matrix_of(data);
    const std::vector<double> bg = matrix_of(background);

    // w[s] = s! (d-1-s)! / d!
    std::vector<double> weight(d);
    for (std::size_t s = 0; s < d; ++s) {
        double w = 1.0;
        for (std::size_t i = 1; i <= s; ++i) w *= static_cast<double>(i);
        for (std::size_t i = 1; i <= d - 1 - s; ++i) w *= static_cast<double>(i);
        for (std::size_t i = 1; i <= d; ++i) w /= static_cast<double>(i);
        weight[s] = w;
    }

    datamin::ShapAttribution result;
    result.n_rows = n_rows;
    result.n_classes = n_classes;
    result.n_features = d;
    result.values.assign(n_rows * n_classes * d, 0.0);

    std::vector<double> x(d);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) x[c] = rows[r * d + c];

        std::vector<std::vector<double>> value(1ull << d);
        for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
            value[mask] = coalition_value(f, x, bg, n_bg, mask);
        }
        if (r == 0) result.baseline = value[0];

        for (std::size_t feat = 0; feat < d; ++feat) {
            for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
                if (mask & (1ull << feat)) continue;
                const std::size_t s =
                    static_cast<std::size_t>(__builtin_popcountll(mask));
                const std::uint64_t with = mask | (1ull << feat);
                for (std::size_t c = 0; c < n_classes; ++c) {
                    result.values[(r * n_classes + c) * d + feat] +=
                        weight[s] * (value[with][c] - value[mask][c]);
                }
            }
        }
    }
    return result;
}

}  // namespace testutil
