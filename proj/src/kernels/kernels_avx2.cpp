// Compiled with -mavx2 (x86-64 only). Reached solely through avx2_table(),
// which checks CPU support first.

#include "whitneydim/kernels/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace whitneydim::kernels {

namespace {

inline __m256d lane_offsets() noexcept { return _mm256_set_pd(3.0, 2.0, 1.0, 0.0); }

void min_sq_dist_row(double x0, double dx, double y, const BoxRows& boxes, std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t nb = boxes.size();
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vdx = _mm256_set1_pd(dx);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane_offsets());
        __m256d x = _mm256_add_pd(vx0, _mm256_mul_pd(idx, vdx));
        __m256d acc = _mm256_loadu_pd(out.data() + i);
        for (std::size_t b = 0; b < nb; ++b) {
            double gy = std::max(std::max(boxes.lo_y[b] - y, y - boxes.hi_y[b]), 0.0);
            __m256d gy2 = _mm256_set1_pd(gy * gy);
            __m256d lo = _mm256_set1_pd(boxes.lo_x[b]);
            __m256d hi = _mm256_set1_pd(boxes.hi_x[b]);
            __m256d gx = _mm256_max_pd(_mm256_max_pd(_mm256_sub_pd(lo, x), _mm256_sub_pd(x, hi)), zero);
            __m256d s = _mm256_add_pd(_mm256_mul_pd(gx, gx), gy2);
            acc = _mm256_min_pd(acc, s);
        }
        _mm256_storeu_pd(out.data() + i, acc);
    }
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double acc = out[i];
        for (std::size_t b = 0; b < nb; ++b) {
            double gy = std::max(std::max(boxes.lo_y[b] - y, y - boxes.hi_y[b]), 0.0);
            double gx = std::max(std::max(boxes.lo_x[b] - x, x - boxes.hi_x[b]), 0.0);
            acc = std::min(acc, gx * gx + gy * gy);
        }
        out[i] = acc;
    }
}

std::size_t count_below(std::span<const double> values, double threshold) {
    const std::size_t n = values.size();
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(values.data() + i);
        int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, t, _CMP_LT_OQ));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i) count += values[i] < threshold ? 1 : 0;
    return count;
}

std::size_t count_below_in_disc(std::span<const double> values, double x0, double dx, double cx, double dy_sq,
                                 double radius_sq, double threshold) {
    const std::size_t n = values.size();
    const __m256d t = _mm256_set1_pd(threshold);
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vdx = _mm256_set1_pd(dx);
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vdy = _mm256_set1_pd(dy_sq);
    const __m256d vr2 = _mm256_set1_pd(radius_sq);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane_offsets());
        __m256d x = _mm256_add_pd(vx0, _mm256_mul_pd(idx, vdx));
        __m256d d = _mm256_sub_pd(x, vcx);
        __m256d s = _mm256_add_pd(_mm256_mul_pd(d, d), vdy);
        __m256d v = _mm256_loadu_pd(values.data() + i);
        __m256d m = _mm256_and_pd(_mm256_cmp_pd(v, t, _CMP_LT_OQ), _mm256_cmp_pd(s, vr2, _CMP_LT_OQ));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(m))));
    }
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double d = x - cx;
        double s = d * d + dy_sq;
        count += (values[i] < threshold && s < radius_sq) ? 1 : 0;
    }
    return count;
}

double clearance_row(std::span<const double> values, double x0, double dx, double cx, double dy_sq, double r) {
    const std::size_t n = values.size();
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vdx = _mm256_set1_pd(dx);
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vdy = _mm256_set1_pd(dy_sq);
    const __m256d vr = _mm256_set1_pd(r);
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane_offsets());
        __m256d x = _mm256_add_pd(vx0, _mm256_mul_pd(idx, vdx));
        __m256d d = _mm256_sub_pd(x, vcx);
        __m256d dist = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(d, d), vdy));
        __m256d v = _mm256_loadu_pd(values.data() + i);
        best = _mm256_max_pd(best, _mm256_min_pd(v, _mm256_sub_pd(vr, dist)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double d = x - cx;
        double dist = std::sqrt(d * d + dy_sq);
        out = std::max(out, std::min(values[i], r - dist));
    }
    return out;
}

constexpr KernelTable kAvx2{"avx2", &min_sq_dist_row, &count_below, &count_below_in_disc, &clearance_row};

}  // namespace

const KernelTable* avx2_table() noexcept {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

}  // namespace whitneydim::kernels

#else

namespace whitneydim::kernels {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace whitneydim::kernels

#endif
