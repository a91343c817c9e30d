#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <vector>

namespace nambu {

/// Chooses between the serial reference path and the OpenMP path of a kernel.
/// Both paths produce bit-identical results; the serial one exists so tests
/// can pin the parallel kernels against it.
enum class ExecutionPolicy { serial, parallel };

namespace detail {
constexpr std::int64_t reduce_block = 4096;

inline double pairwise_combine(std::vector<double>& parts) {
    // Tree reduction in index order; independent of how parts were produced.
    std::int64_t n = (std::int64_t)parts.size();
    while (n > 1) {
        const std::int64_t half = (n + 1) / 2;
        for (std::int64_t i = 0; i + half < n; ++i) parts[i] += parts[i + half];
        n = half;
    }
    return parts.empty() ? 0.0 : parts[0];
}

// Runs fn(block) for every block; exceptions surface as the lowest-index
// block's error so serial and parallel runs fail identically.
template <class Fn>
void for_each_block(std::int64_t blocks, bool parallel, Fn&& fn) {
    if (parallel) {
        std::vector<std::exception_ptr> errors((size_t)blocks);
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < blocks; ++b) {
            try {
                fn(b);
            } catch (...) {
                errors[(size_t)b] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::int64_t b = 0; b < blocks; ++b) fn(b);
    }
}
} // namespace detail

/// sum_{i=0}^{n-1} term(i), accumulated per fixed 4096-index block and then
/// combined pairwise. The summation order never depends on thread count, so
/// serial and parallel runs agree bitwise.
template <class Term>
double indexed_sum(std::int64_t n, Term&& term, ExecutionPolicy policy) {
    if (n <= 0) return 0.0;
    const std::int64_t blocks = (n + detail::reduce_block - 1) / detail::reduce_block;
    std::vector<double> parts((size_t)blocks, 0.0);
    detail::for_each_block(blocks, policy == ExecutionPolicy::parallel,
                           [&](std::int64_t b) {
                               const std::int64_t lo = b * detail::reduce_block;
                               const std::int64_t hi = std::min(n, lo + detail::reduce_block);
                               double acc = 0.0;
                               for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
                               parts[(size_t)b] = acc;
                           });
    return detail::pairwise_combine(parts);
}

/// Variant for terms that need scratch state: `factory()` builds one worker
/// per block (amortized over 4096 indices), so hot paths keep buffers on the
/// block's own frame instead of thread-local storage.
template <class Factory>
double indexed_sum_stateful(std::int64_t n, Factory&& factory, ExecutionPolicy policy) {
    if (n <= 0) return 0.0;
    const std::int64_t blocks = (n + detail::reduce_block - 1) / detail::reduce_block;
    std::vector<double> parts((size_t)blocks, 0.0);
    detail::for_each_block(blocks, policy == ExecutionPolicy::parallel,
                           [&](std::int64_t b) {
                               auto worker = factory();
                               const std::int64_t lo = b * detail::reduce_block;
                               const std::int64_t hi = std::min(n, lo + detail::reduce_block);
                               double acc = 0.0;
                               for (std::int64_t i = lo; i < hi; ++i) acc += worker(i);
                               parts[(size_t)b] = acc;
                           });
    return detail::pairwise_combine(parts);
}

/// max_{i=0}^{n-1} term(i). Floating max is order-independent, so the parallel
/// path trivially matches the serial one.
template <class Term>
double indexed_max(std::int64_t n, Term&& term, ExecutionPolicy policy) {
    if (n <= 0) return 0.0;
    const std::int64_t blocks = (n + detail::reduce_block - 1) / detail::reduce_block;
    std::vector<double> parts((size_t)blocks, 0.0);
    detail::for_each_block(blocks, policy == ExecutionPolicy::parallel,
                           [&](std::int64_t b) {
                               const std::int64_t lo = b * detail::reduce_block;
                               const std::int64_t hi = std::min(n, lo + detail::reduce_block);
                               double m = term(lo);
                               for (std::int64_t i = lo + 1; i < hi; ++i)
                                   m = std::max(m, term(i));
                               parts[(size_t)b] = m;
                           });
    double result = parts[0];
    for (const double p : parts) result = std::max(result, p);
    return result;
}

} // namespace nambu
