#include "whitneydim/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace whitneydim {

CandidateFilter::CandidateFilter(const BoxSet& set) : set_(&set), all_(set.size()) {
    std::iota(all_.begin(), all_.end(), 0u);
}

RegionBounds CandidateFilter::filter(const DBox& region, std::span<const std::uint32_t> parent,
                                     std::vector<std::uint32_t>& out) const {
    const auto& boxes = set_->dboxes();
    const int dim = set_->dim();
    RegionBounds rb;
    rb.min_sq = std::numeric_limits<double>::infinity();
    rb.max_sq = std::numeric_limits<double>::infinity();
    out.clear();
    for (std::uint32_t id : parent) {
        double mx = max_sq_dist_box_box(region, boxes[id], dim);
        if (mx < rb.max_sq) rb.max_sq = mx;
        if (mx == 0.0) {
            // The containing box is the whole answer for every subregion.
            out.push_back(id);
            rb.min_sq = 0.0;
            rb.inside_box = true;
            return rb;
        }
    }
    // Relative slack keeps every box whose rounded distance could tie the bound.
    const double keep = rb.max_sq * (1.0 + 1e-12);
    for (std::uint32_t id : parent) {
        double mn = sq_dist_box_box(region, boxes[id], dim);
        if (mn <= keep) {
            out.push_back(id);
            rb.min_sq = std::min(rb.min_sq, mn);
        }
    }
    return rb;
}

void CandidateFilter::gather(std::span<const std::uint32_t> ids, Rows& rows) const {
    const auto& boxes = set_->dboxes();
    const bool two_d = set_->dim() >= 2;
    rows.lo_x.resize(ids.size());
    rows.hi_x.resize(ids.size());
    rows.lo_y.resize(ids.size());
    rows.hi_y.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const DBox& b = boxes[ids[i]];
        rows.lo_x[i] = b.lo[0];
        rows.hi_x[i] = b.hi[0];
        rows.lo_y[i] = two_d ? b.lo[1] : 0.0;
        rows.hi_y[i] = two_d ? b.hi[1] : 0.0;
    }
}

double CandidateFilter::sq_dist(const Vec& p, std::span<const std::uint32_t> ids) const noexcept {
    const auto& boxes = set_->dboxes();
    const int dim = set_->dim();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t id : ids) best = std::min(best, sq_dist_point_box(p, boxes[id], dim));
    return best;
}

namespace {

void descend(const CandidateFilter& filter, const DBox& region, int depth, std::span<const Vec> points,
             std::vector<std::size_t>& ids, std::span<const std::uint32_t> cands, std::vector<double>& out) {
    std::vector<std::uint32_t> kept;
    RegionBounds rb = filter.filter(region, cands, kept);
    if (rb.inside_box) {
        for (std::size_t i : ids) out[i] = 0.0;
        return;
    }
    const int dim = filter.dim();
    if (ids.size() <= 8 || kept.size() <= 16 || depth >= 40) {
        for (std::size_t i : ids) out[i] = std::sqrt(filter.sq_dist(points[i], kept));
        return;
    }
    const int n = 1 << dim;
    Vec mid{};
    for (int a = 0; a < dim; ++a) mid[a] = 0.5 * (region.lo[a] + region.hi[a]);
    std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(n));
    for (std::size_t i : ids) {
        int c = 0;
        for (int a = 0; a < dim; ++a)
            if (points[i][a] >= mid[a]) c |= 1 << a;
        parts[static_cast<std::size_t>(c)].push_back(i);
    }
    for (int c = 0; c < n; ++c) {
        auto& sub = parts[static_cast<std::size_t>(c)];
        if (sub.empty()) continue;
        DBox child = region;
        for (int a = 0; a < dim; ++a) {
            if ((c >> a) & 1) child.lo[a] = mid[a];
            else child.hi[a] = mid[a];
        }
        descend(filter, child, depth + 1, points, sub, kept, out);
    }
}

}  // namespace

std::vector<double> batch_distances(const CandidateFilter& filter, std::span<const Vec> points) {
    std::vector<double> out(points.size(), 0.0);
    if (points.empty()) return out;
    const int dim = filter.dim();
    DBox root;
    for (int a = 0; a < dim; ++a) {
        root.lo[a] = 0.0;
        root.hi[a] = 1.0;
        for (const auto& p : points) {
            root.lo[a] = std::min(root.lo[a], p[a]);
            root.hi[a] = std::max(root.hi[a], p[a]);
        }
    }
    std::vector<std::size_t> ids(points.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    descend(filter, root, 0, points, ids, filter.all(), out);
    return out;
}

}  // namespace whitneydim
