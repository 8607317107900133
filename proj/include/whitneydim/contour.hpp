#pragma once

#include <cstdint>
#include <vector>

#include "whitneydim/distance_field.hpp"
#include "whitneydim/geometry.hpp"

namespace whitneydim {

struct Segment {
    Vec a{};
    Vec b{};
    double length() const noexcept;
};

/// The level set {dist(., E) = r} as marching-squares pieces. Every segment
/// lies in one grid cell; `cells` holds its row-major cell key (j * 2^K + i)
/// and segments are sorted by it. Segments are oriented with E_r on the left.
struct BoundaryCurve {
    double r = 0.0;
    int grid_level = 0;
    std::vector<Segment> segments;
    std::vector<std::uint64_t> cells;
    double total_length = 0.0;
    std::uint64_t segment_count = 0;  ///< also set when segments were not kept
    std::uint64_t saddles = 0;

    /// Length of the part of the curve inside the closed box.
    double length_in_box(const DBox& box) const;
    /// Length of the part of the curve inside the open disc.
    double length_in_disc(const Ball& disc) const;
};

/// Contours the node field at iso-value r (d = 2). Edge crossings are linear
/// interpolations; saddle cells are resolved by the exact distance at the
/// cell center. Throws ErrorKind::scale_too_fine for r < 8h; r at or above
/// the field maximum gives an empty curve.
BoundaryCurve extract_boundary(const DistanceField& field, double r);

/// Same contour on the level-K grid without materializing the field: only
/// cells that the iso-line can cross are visited, and node values are exact
/// distances. Intended for grids too large to store. With keep_segments =
/// false only the length and counts are filled.
BoundaryCurve extract_boundary_sparse(const BoxSet& set, int level, double r, bool keep_segments = false);

}  // namespace whitneydim
