// AArch64 variant. Advanced SIMD is mandatory on AArch64, so no runtime probe.

#include "whitneydim/kernels/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace whitneydim::kernels {

namespace {

inline float64x2_t lane_offsets() noexcept {
    const double init[2] = {0.0, 1.0};
    return vld1q_f64(init);
}

void min_sq_dist_row(double x0, double dx, double y, const BoxRows& boxes, std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t nb = boxes.size();
    const float64x2_t vx0 = vdupq_n_f64(x0);
    const float64x2_t vdx = vdupq_n_f64(dx);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane_offsets());
        float64x2_t x = vaddq_f64(vx0, vmulq_f64(idx, vdx));
        float64x2_t acc = vld1q_f64(out.data() + i);
        for (std::size_t b = 0; b < nb; ++b) {
            double gy = std::max(std::max(boxes.lo_y[b] - y, y - boxes.hi_y[b]), 0.0);
            float64x2_t gy2 = vdupq_n_f64(gy * gy);
            float64x2_t lo = vdupq_n_f64(boxes.lo_x[b]);
            float64x2_t hi = vdupq_n_f64(boxes.hi_x[b]);
            float64x2_t gx = vmaxq_f64(vmaxq_f64(vsubq_f64(lo, x), vsubq_f64(x, hi)), zero);
            float64x2_t s = vaddq_f64(vmulq_f64(gx, gx), gy2);
            acc = vminq_f64(acc, s);
        }
        vst1q_f64(out.data() + i, acc);
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
    const float64x2_t t = vdupq_n_f64(threshold);
    uint64x2_t counts = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint64x2_t m = vcltq_f64(vld1q_f64(values.data() + i), t);
        counts = vsubq_u64(counts, m);  // all-ones lanes are -1
    }
    std::size_t count = static_cast<std::size_t>(vgetq_lane_u64(counts, 0) + vgetq_lane_u64(counts, 1));
    for (; i < n; ++i) count += values[i] < threshold ? 1 : 0;
    return count;
}

std::size_t count_below_in_disc(std::span<const double> values, double x0, double dx, double cx, double dy_sq,
                                 double radius_sq, double threshold) {
    const std::size_t n = values.size();
    const float64x2_t t = vdupq_n_f64(threshold);
    const float64x2_t vx0 = vdupq_n_f64(x0);
    const float64x2_t vdx = vdupq_n_f64(dx);
    const float64x2_t vcx = vdupq_n_f64(cx);
    const float64x2_t vdy = vdupq_n_f64(dy_sq);
    const float64x2_t vr2 = vdupq_n_f64(radius_sq);
    uint64x2_t counts = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane_offsets());
        float64x2_t x = vaddq_f64(vx0, vmulq_f64(idx, vdx));
        float64x2_t d = vsubq_f64(x, vcx);
        float64x2_t s = vaddq_f64(vmulq_f64(d, d), vdy);
        uint64x2_t m = vandq_u64(vcltq_f64(vld1q_f64(values.data() + i), t), vcltq_f64(s, vr2));
        counts = vsubq_u64(counts, m);
    }
    std::size_t count = static_cast<std::size_t>(vgetq_lane_u64(counts, 0) + vgetq_lane_u64(counts, 1));
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
    const float64x2_t vx0 = vdupq_n_f64(x0);
    const float64x2_t vdx = vdupq_n_f64(dx);
    const float64x2_t vcx = vdupq_n_f64(cx);
    const float64x2_t vdy = vdupq_n_f64(dy_sq);
    const float64x2_t vr = vdupq_n_f64(r);
    float64x2_t best = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane_offsets());
        float64x2_t x = vaddq_f64(vx0, vmulq_f64(idx, vdx));
        float64x2_t d = vsubq_f64(x, vcx);
        float64x2_t dist = vsqrtq_f64(vaddq_f64(vmulq_f64(d, d), vdy));
        best = vmaxq_f64(best, vminq_f64(vld1q_f64(values.data() + i), vsubq_f64(vr, dist)));
    }
    double out = std::max(vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1));
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double d = x - cx;
        double dist = std::sqrt(d * d + dy_sq);
        out = std::max(out, std::min(values[i], r - dist));
    }
    return out;
}

constexpr KernelTable kNeon{"neon", &min_sq_dist_row, &count_below, &count_below_in_disc, &clearance_row};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeon; }

}  // namespace whitneydim::kernels

#else

namespace whitneydim::kernels {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace whitneydim::kernels

#endif
