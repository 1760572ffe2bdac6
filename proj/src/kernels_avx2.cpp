#include "datamin/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace datamin::kernels::detail {

std::size_t count_equal_u32_avx2(const std::uint32_t* a, const std::uint32_t* b,
                                 std::size_t n) {
    std::size_t matches = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i va =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i eq = _mm256_cmpeq_epi32(va, vb);
        const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(eq));
        matches += static_cast<std::size_t>(__builtin_popcount(mask));
    }
    for (; i < n; ++i) {
        matches += (a[i] == b[i]) ? 1u : 0u;
    }
    return matches;
}

MinMax min_max_avx2(const double* x, std::size_t n) {
    if (n < 4) return min_max_scalar(x, n);
    __m256d vlo = _mm256_loadu_pd(x);
    __m256d vhi = vlo;
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        vlo = _mm256_min_pd(vlo, v);
        vhi = _mm256_max_pd(vhi, v);
    }
    alignas(32) double lo4[4];
    alignas(32) double hi4[4];
    _mm256_store_pd(lo4, vlo);
    _mm256_store_pd(hi4, vhi);
    double lo = lo4[0];
    double hi = hi4[0];
    for (int k = 1; k < 4; ++k) {
        if (lo4[k] < lo) lo = lo4[k];
        if (hi4[k] > hi) hi = hi4[k];
    }
    for (; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    return {lo, hi};
}

Moments sum_sum_sq_avx2(const double* x, std::size_t n) {
    __m256d vsum = _mm256_setzero_pd();
    __m256d vsq = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        vsum = _mm256_add_pd(vsum, v);
        vsq = _mm256_add_pd(vsq, _mm256_mul_pd(v, v));
    }
    alignas(32) double s4[4];
    alignas(32) double q4[4];
    _mm256_store_pd(s4, vsum);
    _mm256_store_pd(q4, vsq);
    double sum = s4[0] + s4[1] + s4[2] + s4[3];
    double sum_sq = q4[0] + q4[1] + q4[2] + q4[3];
    for (; i < n; ++i) {
        sum += x[i];
        sum_sq += x[i] * x[i];
    }
    return {sum, sum_sq};
}

void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        // mul + add (not fma) so results match the scalar reference bitwise
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) {
        y[i] += a * x[i];
    }
}

}  // namespace datamin::kernels::detail

#endif  // x86-64
