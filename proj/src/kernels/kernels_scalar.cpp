#include <algorithm>
#include <cmath>

#include "whitneydim/kernels/kernels.hpp"

namespace whitneydim::kernels {

namespace {

void min_sq_dist_row(double x0, double dx, double y, const BoxRows& boxes, std::span<double> out) {
    const std::size_t nb = boxes.size();
    for (std::size_t b = 0; b < nb; ++b) {
        double gy = std::max(std::max(boxes.lo_y[b] - y, y - boxes.hi_y[b]), 0.0);
        double gy2 = gy * gy;
        const double lo = boxes.lo_x[b];
        const double hi = boxes.hi_x[b];
        for (std::size_t i = 0; i < out.size(); ++i) {
            double x = x0 + static_cast<double>(i) * dx;
            double gx = std::max(std::max(lo - x, x - hi), 0.0);
            double s = gx * gx + gy2;
            out[i] = std::min(out[i], s);
        }
    }
}

std::size_t count_below(std::span<const double> values, double threshold) {
    std::size_t n = 0;
    for (double v : values) n += v < threshold ? 1 : 0;
    return n;
}

std::size_t count_below_in_disc(std::span<const double> values, double x0, double dx, double cx, double dy_sq,
                                 double radius_sq, double threshold) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double d = x - cx;
        double s = d * d + dy_sq;
        n += (values[i] < threshold && s < radius_sq) ? 1 : 0;
    }
    return n;
}

double clearance_row(std::span<const double> values, double x0, double dx, double cx, double dy_sq, double r) {
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double d = x - cx;
        double dist = std::sqrt(d * d + dy_sq);
        best = std::max(best, std::min(values[i], r - dist));
    }
    return best;
}

constexpr KernelTable kScalar{"scalar", &min_sq_dist_row, &count_below, &count_below_in_disc, &clearance_row};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace whitneydim::kernels
