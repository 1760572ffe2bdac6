#include "datamin/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "datamin/kernels.hpp"
#include "datamin/rng.hpp"

namespace datamin {

namespace {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct PcaModel {
    Eigen::MatrixXd prepared;    // centered / standardized matrix (n x d)
    Eigen::MatrixXd components;  // d x k, columns are principal directions
    std::vector<double> explained_variance;
};

PcaModel fit_pca(const Dataset& ds, const PcaSpec& spec) {
    validate(ds);
    const std::size_t n = ds.rows();
    const std::size_t d = ds.dim();
    if (n < 2) throw std::invalid_argument("PCA requires n >= 2");
    if (spec.components < 1 || spec.components > std::min(n, d)) {
        throw std::invalid_argument("components must lie in [1, min(n, d)]");
    }

    Eigen::MatrixXd x(n, d);
    for (std::size_t c = 0; c < d; ++c) {
        const std::vector<double>& col = ds.features[c].values;
        const auto moments = kernels::sum_sum_sq(col.data(), col.size());
        const double mean = moments.sum / static_cast<double>(n);
        double scale = 1.0;
        if (spec.standardize) {
            const double var = std::max(
                0.0, moments.sum_sq / static_cast<double>(n) - mean * mean);
            const double sd = std::sqrt(var);
            scale = (sd > 0.0) ? sd : 1.0;
        }
        for (std::size_t r = 0; r < n; ++r) {
            x(r, c) = (col[r] - mean) / scale;
        }
    }

    const Eigen::MatrixXd cov =
        (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }

    // Eigen returns ascending eigenvalues; take the top k in descending order.
    PcaModel model;
    model.prepared = std::move(x);
    model.components.resize(d, spec.components);
    model.explained_variance.resize(spec.components);
    for (std::size_t k = 0; k < spec.components; ++k) {
        const auto src = static_cast<Eigen::Index>(d - 1 - k);
        Eigen::VectorXd dir = solver.eigenvectors().col(src);
        // sign convention: largest-magnitude loading positive
        Eigen::Index argmax = 0;
        dir.cwiseAbs().maxCoeff(&argmax);
        if (dir(argmax) < 0.0) dir = -dir;
        model.components.col(static_cast<Eigen::Index>(k)) = dir;
        model.explained_variance[k] = std::max(0.0, solver.eigenvalues()(src));
    }
    return model;
}

}  // namespace

Dataset hash_features(const Dataset& ds, const HashSpec& spec) {
    validate(ds);
    if (spec.buckets < 1) throw std::invalid_argument("buckets must be >= 1");
    const std::size_t n = ds.rows();
    const std::size_t k = spec.buckets;

    // accumulate per bucket in name order so column order cannot matter
    std::vector<std::vector<const FeatureColumn*>> members(k);
    std::vector<std::vector<double>> signs(k);
    std::vector<std::size_t> order(ds.dim());
    for (std::size_t i = 0; i < ds.dim(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ds.features[a].name < ds.features[b].name;
    });
    for (std::size_t i : order) {
        const std::uint64_t h = fnv1a64(ds.features[i].name);
        const std::size_t bucket = h % k;
        const bool odd_parity = (std::popcount(h) & 1u) != 0;
        members[bucket].push_back(&ds.features[i]);
        signs[bucket].push_back(spec.signed_hash && odd_parity ? -1.0 : 1.0);
    }

    Dataset out;
    out.features.reserve(k);
    for (std::size_t b = 0; b < k; ++b) {
        FeatureColumn col;
        col.name = "h" + std::to_string(b);
        col.values.assign(n, 0.0);
        for (std::size_t m = 0; m < members[b].size(); ++m) {
            kernels::axpy(col.values.data(), members[b][m]->values.data(),
                          signs[b][m], n);
        }
        out.features.push_back(std::move(col));
    }
    out.task_labels = ds.task_labels;
    out.user_labels = ds.user_labels;
    return out;
}

Dataset pca_transform(const Dataset& ds, const PcaSpec& spec) {
    const PcaModel model = fit_pca(ds, spec);
    const Eigen::MatrixXd projected = model.prepared * model.components;

    Dataset out;
    out.features.reserve(spec.components);
    for (std::size_t c = 0; c < spec.components; ++c) {
        FeatureColumn col;
        col.name = "pc" + std::to_string(c);
        col.values.resize(ds.rows());
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            col.values[r] = projected(static_cast<Eigen::Index>(r),
                                      static_cast<Eigen::Index>(c));
        }
        out.features.push_back(std::move(col));
    }
    out.task_labels = ds.task_labels;
    out.user_labels = ds.user_labels;
    return out;
}

std::vector<double> pca_explained_variance(const Dataset& ds, const PcaSpec& spec) {
    return fit_pca(ds, spec).explained_variance;
}

Dataset dp_noise(const Dataset& ds, const DpSpec& spec) {
    validate(ds);
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");

    Dataset out = ds;
    for (std::size_t c = 0; c < out.dim(); ++c) {
        std::vector<double>& values = out.features[c].values;
        const auto mm = kernels::min_max(values.data(), values.size());
        const double scale = (mm.max - mm.min) / spec.epsilon;
        if (scale == 0.0) continue;
        Rng rng(mix_seed(spec.seed, c));
        for (double& v : values) {
            // inverse-CDF Laplace draw; keep t > 0 so the log stays finite
            const double t = std::max(rng.next_double(), 0x1.0p-53);
            const double u = t - 0.5;
            const double magnitude = std::log1p(-2.0 * std::abs(u));
            v += (u < 0.0 ? scale * magnitude : -scale * magnitude);
        }
    }
    return out;
}

}  // namespace datamin
