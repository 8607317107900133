#pragma once

// Row kernels behind the distance field, the sparse contour tracer and the
// node-counting estimators. Every ISA variant performs the same IEEE
// operations in the same order per element, so results are bitwise equal to
// the scalar reference (the build disables floating-point contraction).

#include <cstddef>
#include <span>
#include <string_view>

namespace whitneydim::kernels {

/// Candidate boxes in structure-of-arrays form. For d = 1 the y bounds are 0.
struct BoxRows {
    std::span<const double> lo_x;
    std::span<const double> hi_x;
    std::span<const double> lo_y;
    std::span<const double> hi_y;

    std::size_t size() const noexcept { return lo_x.size(); }
};

/// out[i] = min(out[i], min_b |(x0 + i*dx, y) - b|^2)
using MinSqDistRowFn = void (*)(double x0, double dx, double y, const BoxRows& boxes, std::span<double> out);

/// #{ i : values[i] < threshold }
using CountBelowFn = std::size_t (*)(std::span<const double> values, double threshold);

/// #{ i : values[i] < threshold and (x0 + i*dx - cx)^2 + dy_sq < radius_sq }
using CountBelowInDiscFn = std::size_t (*)(std::span<const double> values, double x0, double dx, double cx,
                                           double dy_sq, double radius_sq, double threshold);

/// max(0, max_i min(values[i], r - sqrt((x0 + i*dx - cx)^2 + dy_sq)))
using ClearanceRowFn = double (*)(std::span<const double> values, double x0, double dx, double cx, double dy_sq,
                                  double r);

struct KernelTable {
    const char* name;
    MinSqDistRowFn min_sq_dist_row;
    CountBelowFn count_below;
    CountBelowInDiscFn count_below_in_disc;
    ClearanceRowFn clearance_row;
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// The table in use. Chosen once from WHITNEYDIM_KERNELS (scalar|avx2|neon|auto,
/// default auto = widest supported).
const KernelTable& active() noexcept;
/// Forces a variant by name; returns false if unavailable.
bool select(std::string_view name) noexcept;

}  // namespace whitneydim::kernels
