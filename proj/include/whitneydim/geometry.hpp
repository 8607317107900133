#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "whitneydim/rational.hpp"

namespace whitneydim {

/// Storage capacity for coordinates. Kernels exist for d = 1 and d = 2 only.
inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;

/// Closed axis-aligned box with exact corner and side lengths. A point is a
/// box with all sides zero.
struct RationalBox {
    std::array<Rational, kMaxDim> lo{};
    std::array<Rational, kMaxDim> side{};

    Rational hi(int axis) const { return lo[axis] + side[axis]; }
    friend bool operator==(const RationalBox&, const RationalBox&) = default;
};

/// Floating-point mirror of a box, used by every metric kernel.
struct DBox {
    Vec lo{};
    Vec hi{};
};

double sq_dist_point_box(const Vec& p, const DBox& b, int dim) noexcept;
/// Squared gap between two boxes (per-axis interval gap, Euclidean norm).
double sq_dist_box_box(const DBox& a, const DBox& b, int dim) noexcept;
/// max over p in region of dist(p, b)^2.
double max_sq_dist_box_box(const DBox& region, const DBox& b, int dim) noexcept;
bool box_contains(const DBox& outer, const DBox& inner, int dim) noexcept;

/// E: a nonempty finite union of closed boxes in [0,1]^d with rational
/// coordinates. Immutable once built.
class BoxSet {
public:
    BoxSet(int dim, std::vector<RationalBox> boxes, bool normalized = false,
           nlohmann::json meta = nlohmann::json::object());

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return boxes_.size(); }
    const std::vector<RationalBox>& boxes() const noexcept { return boxes_; }
    const std::vector<DBox>& dboxes() const noexcept { return dboxes_; }
    bool normalized() const noexcept { return normalized_; }
    const nlohmann::json& meta() const noexcept { return meta_; }

    /// Image under x -> 1/4 + x/2, which maps [0,1]^d onto [1/4,3/4]^d.
    /// Returns a copy unchanged if already normalized.
    BoxSet normalize() const;

    /// Sum of box volumes. Equals the Lebesgue measure of the union when the
    /// boxes have pairwise disjoint interiors (true for every generator here).
    Rational volume_sum() const;
    /// Lebesgue-null for the purposes of the count characterizations: either
    /// the volume sum is below 2^-20, or the set is a pre-fractal standing for
    /// an attractor recorded as null in the metadata.
    bool measure_zero() const;

    double diameter() const;
    DBox bounding_box() const noexcept;

private:
    int dim_;
    std::vector<RationalBox> boxes_;
    std::vector<DBox> dboxes_;
    bool normalized_;
    nlohmann::json meta_;
};

/// Dyadic cube prod_i [index_i 2^-k, (index_i + 1) 2^-k].
struct DyadicCube {
    int dim = 2;
    int level = 0;
    std::array<std::int64_t, kMaxDim> index{};

    double side() const noexcept;
    double diam() const noexcept;
    DBox dbox() const noexcept;
    Vec center() const noexcept;
    RationalBox rbox() const;
    DyadicCube parent() const noexcept;

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
    friend auto operator<=>(const DyadicCube& a, const DyadicCube& b) noexcept {
        if (auto c = a.level <=> b.level; c != 0) return c;
        return a.index <=> b.index;
    }
};

struct Ball {
    Vec center{};
    double radius = 1.0;
};

double dist_point_to_set(const Vec& p, const BoxSet& set);
double dist_box_to_set(const DyadicCube& cube, const BoxSet& set);
double dist_dbox_to_set(const DBox& box, const BoxSet& set);

/// Exact comparison of dist(cube, box)^2 with d * 4^-level * factor^2,
/// i.e. dist against factor * diam(cube). Returns -1, 0 or +1.
int compare_cube_box_dist_to_diam(const DyadicCube& cube, const RationalBox& box, int factor);

/// Greedy maximal r-packing over the candidate centers (box corners plus the
/// level-K grid nodes inside E, K the smallest level with 2^-K <= r/8), taken
/// in lexicographic order. Returned centers lie in E with pairwise distance > 2r.
std::vector<Vec> maximal_packing(const BoxSet& set, double r);
/// Same greedy rule over an explicit, already ordered candidate list.
std::vector<Vec> greedy_packing(std::span<const Vec> candidates, double r, int dim);

}  // namespace whitneydim
