#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "whitneydim/geometry.hpp"
#include "whitneydim/kernels/kernels.hpp"

namespace whitneydim {

/// Summary of E as seen from a closed region R.
struct RegionBounds {
    double min_sq = 0.0;       ///< dist(R, E)^2
    double max_sq = 0.0;       ///< upper bound on dist(p, E)^2 over p in R
    bool inside_box = false;   ///< R lies inside a single box of E
};

/// Branch-and-bound pruning of E's boxes over nested regions. A box is kept
/// for R when it can be the nearest box to some point of R; the kept list of
/// a subregion is always a subset of its parent's list, so recursive callers
/// pass lists down a quadtree.
class CandidateFilter {
public:
    explicit CandidateFilter(const BoxSet& set);

    const BoxSet& set() const noexcept { return *set_; }
    int dim() const noexcept { return set_->dim(); }
    std::span<const std::uint32_t> all() const noexcept { return all_; }

    RegionBounds filter(const DBox& region, std::span<const std::uint32_t> parent,
                        std::vector<std::uint32_t>& out) const;

    /// Structure-of-arrays copy of the listed boxes for the row kernels.
    struct Rows {
        std::vector<double> lo_x, hi_x, lo_y, hi_y;
        kernels::BoxRows view() const noexcept { return {lo_x, hi_x, lo_y, hi_y}; }
    };
    void gather(std::span<const std::uint32_t> ids, Rows& rows) const;

    /// Exact squared distance from a point to the listed boxes.
    double sq_dist(const Vec& p, std::span<const std::uint32_t> ids) const noexcept;

private:
    const BoxSet* set_;
    std::vector<std::uint32_t> all_;
};

/// Exact dist(p, E) for a batch of points in [0,1]^d, descending a quadtree so
/// each point is compared only against boxes that can be nearest to it.
std::vector<double> batch_distances(const CandidateFilter& filter, std::span<const Vec> points);

}  // namespace whitneydim
