#pragma once

#include <cstdint>

#include "datamin/dataset.hpp"

namespace datamin {

struct HashSpec {
    std::size_t buckets = 16;  // k >= 1
    bool signed_hash = true;
    // FNV-1a (64-bit) over the UTF-8 feature name; fixed so outputs are
    // reproducible across implementations.
    static constexpr const char* hash_name = "fnv1a64";
};

struct PcaSpec {
    std::size_t components = 2;  // in [1, min(n, d)]
    bool standardize = true;
};

struct DpSpec {
    double epsilon = 1.0;  // > 0
    std::uint64_t seed = 0;
};

// Signed feature hashing: bucket(f) = fnv1a64(name) mod k, sign(f) from the
// parity of the same hash. Output columns h0..h(k-1); labels unchanged.
// Column order of the input does not affect the result.
Dataset hash_features(const Dataset& ds, const HashSpec& spec);

// Projection onto the top-k principal directions of the (optionally
// standardized) feature matrix, ordered by descending explained variance.
// Sign convention: the largest-magnitude loading of each component is
// positive. Labels unchanged.
Dataset pca_transform(const Dataset& ds, const PcaSpec& spec);

// Explained variance of each component, non-increasing.
std::vector<double> pca_explained_variance(const Dataset& ds, const PcaSpec& spec);

// Per-feature Laplace noise with scale (empirical range / epsilon);
// a constant feature stays unchanged. Labels unchanged.
Dataset dp_noise(const Dataset& ds, const DpSpec& spec);

}  // namespace datamin
