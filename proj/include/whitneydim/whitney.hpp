#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "whitneydim/geometry.hpp"

namespace whitneydim {

struct WhitneyCube {
    DyadicCube cube;
    double dist_to_set = 0.0;
};

struct WhitneyDecomposition {
    int dim = 2;
    int k_max = 0;
    std::vector<WhitneyCube> cubes;   ///< sorted by (level, index)
    std::uint64_t residual_cells = 0; ///< level-k_max cells neither selected nor meeting E
    double residual_volume = 0.0;
    std::shared_ptr<const BoxSet> source;
};

/// Selects Q iff dist(Q, E) >= diam(Q) and no ancestor was selected;
/// unselected cubes are split down to k_max. The selection test is decided
/// exactly (rational fallback near ties). Requires a normalized E and
/// k_max >= 3; throws ErrorKind::resource when the selected count exceeds
/// max_cells().
WhitneyDecomposition whitney_decompose(std::shared_ptr<const BoxSet> set, int k_max);
WhitneyDecomposition whitney_decompose(const BoxSet& set, int k_max);

struct GenerationCounts {
    std::map<int, std::uint64_t> counts;  ///< k -> N_k, one entry per k in [k_lo, k_hi]
    int k_lo = 0;
    int k_hi = -1;
    std::optional<Ball> scope;

    std::uint64_t at(int k) const {
        auto it = counts.find(k);
        return it == counts.end() ? 0 : it->second;
    }
    std::uint64_t total() const;
};

/// N_k over k in [3, k_max - 1]; with a scope, only cubes meeting the open ball.
GenerationCounts generation_counts(const WhitneyDecomposition& w, const std::optional<Ball>& scope = std::nullopt);
/// Same with every level 0..k_max kept (no truncation clipping).
GenerationCounts raw_generation_counts(const WhitneyDecomposition& w);

/// #W_k(.; B0). The center of B0 must lie in E (ErrorKind::center_not_in_set).
std::uint64_t local_count(const WhitneyDecomposition& w, const Ball& b0, int k);

bool cube_meets_ball(const DyadicCube& q, const Ball& b) noexcept;

/// Largest level difference between selected cubes whose closures touch.
/// Walks at most `max_gap` ancestor levels per neighbour cell.
int neighbor_level_gap(const WhitneyDecomposition& w, int max_gap = 8);

struct SandwichAudit {
    std::uint64_t checked = 0;
    std::uint64_t lower_failures = 0;  ///< dist < diam
    std::uint64_t upper_failures = 0;  ///< dist > 4 diam
};
/// Exact rational audit of diam(Q) <= dist(Q, E) <= 4 diam(Q) for every cube.
SandwichAudit audit_sandwich(const WhitneyDecomposition& w);

/// Pairwise interior disjointness via dyadic ancestry (no selected cube has a
/// selected ancestor, and no duplicates).
bool cubes_disjoint(const WhitneyDecomposition& w);

}  // namespace whitneydim
