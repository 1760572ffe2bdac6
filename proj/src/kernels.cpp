#include "datamin/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace datamin::kernels {

namespace {

Backend detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
    return Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_backend()};
    return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

bool backend_supported(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) return __builtin_cpu_supports("avx2") != 0;
#endif
    return false;
}

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        throw std::invalid_argument("kernel backend not supported on this CPU");
    }
    backend_slot().store(b, std::memory_order_relaxed);
}

std::size_t count_equal_u32(const std::uint32_t* a, const std::uint32_t* b,
                            std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::count_equal_u32_avx2(a, b, n);
#endif
    return detail::count_equal_u32_scalar(a, b, n);
}

MinMax min_max(const double* x, std::size_t n) {
    if (n == 0) throw std::invalid_argument("min_max requires n >= 1");
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2) return detail::min_max_avx2(x, n);
#endif
    return detail::min_max_scalar(x, n);
}

Moments sum_sum_sq(const double* x, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2) return detail::sum_sum_sq_avx2(x, n);
#endif
    return detail::sum_sum_sq_scalar(x, n);
}

void axpy(double* y, const double* x, double a, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2) {
        detail::axpy_avx2(y, x, a, n);
        return;
    }
#endif
    detail::axpy_scalar(y, x, a, n);
}

}  // namespace datamin::kernels
