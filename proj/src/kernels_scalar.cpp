#include "datamin/kernels.hpp"

namespace datamin::kernels::detail {

std::size_t count_equal_u32_scalar(const std::uint32_t* a,
                                   const std::uint32_t* b, std::size_t n) {
    std::size_t matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        matches += (a[i] == b[i]) ? 1u : 0u;
    }
    return matches;
}

MinMax min_max_scalar(const double* x, std::size_t n) {
    double lo = x[0];
    double hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    return {lo, hi};
}

Moments sum_sum_sq_scalar(const double* x, std::size_t n) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += x[i];
        sum_sq += x[i] * x[i];
    }
    return {sum, sum_sq};
}

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

}  // namespace datamin::kernels::detail
