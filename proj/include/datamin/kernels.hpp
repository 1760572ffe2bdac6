#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the hot paths (accuracy counting, score
// normalization, bucket accumulation, moment sums). Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. count_equal_u32, min_max and axpy are bit-identical across
// backends; sum_sum_sq reduces in lanes and may differ in the last ulps.

namespace datamin::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
// Throws std::invalid_argument if the backend is not supported on this CPU.
void set_backend(Backend b);

struct MinMax {
    double min;
    double max;
};

struct Moments {
    double sum;
    double sum_sq;
};

// Number of positions i with a[i] == b[i].
std::size_t count_equal_u32(const std::uint32_t* a, const std::uint32_t* b,
                            std::size_t n);

// Elementwise min and max; n must be >= 1.
MinMax min_max(const double* x, std::size_t n);

// Sum of x[i] and of x[i]^2.
Moments sum_sum_sq(const double* x, std::size_t n);

// y[i] += a * x[i].
void axpy(double* y, const double* x, double a, std::size_t n);

namespace detail {

std::size_t count_equal_u32_scalar(const std::uint32_t* a,
                                   const std::uint32_t* b, std::size_t n);
MinMax min_max_scalar(const double* x, std::size_t n);
Moments sum_sum_sq_scalar(const double* x, std::size_t n);
void axpy_scalar(double* y, const double* x, double a, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
std::size_t count_equal_u32_avx2(const std::uint32_t* a, const std::uint32_t* b,
                                 std::size_t n);
MinMax min_max_avx2(const double* x, std::size_t n);
Moments sum_sum_sq_avx2(const double* x, std::size_t n);
void axpy_avx2(double* y, const double* x, double a, std::size_t n);
#endif

}  // namespace detail

}  // namespace datamin::kernels
