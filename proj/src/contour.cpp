#include "whitneydim/contour.hpp"

#include <algorithm>
#include <cmath>

#include "whitneydim/candidates.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

double Segment::length() const noexcept { return std::hypot(b[0] - a[0], b[1] - a[1]); }

namespace {

// Corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
// Edge e joins corners e and e+1; corner c touches edges c and c+3 (mod 4).
// Crossings are always interpolated from the left/bottom node so that
// neighbouring cells produce identical points on shared edges.
constexpr int kEdgeFrom[4] = {0, 1, 3, 0};
constexpr int kEdgeTo[4] = {1, 2, 2, 3};

struct Cell {
    double v[4];
    Vec p[4];
};

Vec crossing(const Cell& c, int edge, double r) {
    const int a = kEdgeFrom[edge], b = kEdgeTo[edge];
    const double t = (r - c.v[a]) / (c.v[b] - c.v[a]);
    Vec q{};
    q[0] = c.p[a][0] + t * (c.p[b][0] - c.p[a][0]);
    q[1] = c.p[a][1] + t * (c.p[b][1] - c.p[a][1]);
    return q;
}

double cross(const Vec& p, const Vec& q, const Vec& c) {
    return (q[0] - p[0]) * (c[1] - p[1]) - (q[1] - p[1]) * (c[0] - p[0]);
}

/// Segment between the crossings on edges e1 and e2, oriented so that corner
/// `ref` ends up on the left when `ref_left`, on the right otherwise.
Segment oriented(const Cell& c, int e1, int e2, double r, int ref, bool ref_left) {
    Segment s{crossing(c, e1, r), crossing(c, e2, r)};
    const double side = cross(s.a, s.b, c.p[ref]);
    if ((side < 0.0) == ref_left) std::swap(s.a, s.b);
    return s;
}

int inside_mask(const Cell& c, double r) {
    int m = 0;
    for (int k = 0; k < 4; ++k)
        if (c.v[k] < r) m |= 1 << k;
    return m;
}

bool is_saddle(int mask) { return mask == 0b0101 || mask == 0b1010; }

/// Appends the 0, 1 or 2 pieces of the cell; returns how many.
template <class Out>
int march(const Cell& c, int mask, double r, bool center_inside, Out&& out) {
    if (mask == 0 || mask == 15) return 0;
    if (is_saddle(mask)) {
        int made = 0;
        for (int k = 0; k < 4; ++k) {
            const bool in = (mask >> k) & 1;
            // Inside center: the outside corners are cut off, and vice versa.
            if (in == center_inside) continue;
            out(oriented(c, k, (k + 3) % 4, r, k, in));
            ++made;
        }
        return made;
    }
    int edges[2], n = 0;
    for (int e = 0; e < 4; ++e) {
        const bool a = (mask >> kEdgeFrom[e]) & 1, b = (mask >> kEdgeTo[e]) & 1;
        if (a != b) edges[n++] = e;
    }
    int ref = 0;
    while (!((mask >> ref) & 1)) ++ref;
    out(oriented(c, edges[0], edges[1], r, ref, true));
    return 1;
}

/// Parametric interval of a + t (b - a), t in [0,1], inside the closed box.
double clipped_box(const Segment& s, const DBox& box) {
    double t0 = 0.0, t1 = 1.0;
    for (int a = 0; a < 2; ++a) {
        const double d = s.b[a] - s.a[a];
        if (d == 0.0) {
            if (s.a[a] < box.lo[a] || s.a[a] > box.hi[a]) return 0.0;
            continue;
        }
        double u = (box.lo[a] - s.a[a]) / d, v = (box.hi[a] - s.a[a]) / d;
        if (u > v) std::swap(u, v);
        t0 = std::max(t0, u);
        t1 = std::min(t1, v);
        if (t0 >= t1) return 0.0;
    }
    return (t1 - t0) * s.length();
}

double clipped_disc(const Segment& s, const Ball& disc) {
    const double dx = s.b[0] - s.a[0], dy = s.b[1] - s.a[1];
    const double fx = s.a[0] - disc.center[0], fy = s.a[1] - disc.center[1];
    const double A = dx * dx + dy * dy;
    const double B = 2.0 * (fx * dx + fy * dy);
    const double C = fx * fx + fy * fy - disc.radius * disc.radius;
    if (A == 0.0) return 0.0;
    const double disc_ = B * B - 4.0 * A * C;
    if (disc_ <= 0.0) return 0.0;
    const double sq = std::sqrt(disc_);
    const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
    const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
    return t1 > t0 ? (t1 - t0) * std::sqrt(A) : 0.0;
}

template <class F>
double sum_over_cells(const BoundaryCurve& curve, const DBox& bbox, F&& piece) {
    if (curve.segments.empty()) return 0.0;
    const std::int64_t n = std::int64_t{1} << curve.grid_level;
    const double h = std::ldexp(1.0, -curve.grid_level);
    auto cell = [&](double x) { return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x / h)), 0, n - 1); };
    // A segment on a cell edge may be stored in the neighbouring cell.
    const std::int64_t i0 = std::max<std::int64_t>(cell(bbox.lo[0]) - 1, 0), i1 = std::min(cell(bbox.hi[0]) + 1, n - 1);
    const std::int64_t j0 = std::max<std::int64_t>(cell(bbox.lo[1]) - 1, 0), j1 = std::min(cell(bbox.hi[1]) + 1, n - 1);
    double total = 0.0;
    for (std::int64_t j = j0; j <= j1; ++j) {
        const auto lo_key = static_cast<std::uint64_t>(j * n + i0), hi_key = static_cast<std::uint64_t>(j * n + i1);
        auto it = std::lower_bound(curve.cells.begin(), curve.cells.end(), lo_key);
        for (; it != curve.cells.end() && *it <= hi_key; ++it)
            total += piece(curve.segments[static_cast<std::size_t>(it - curve.cells.begin())]);
    }
    return total;
}

}  // namespace

double BoundaryCurve::length_in_box(const DBox& box) const {
    return sum_over_cells(*this, box, [&](const Segment& s) { return clipped_box(s, box); });
}

double BoundaryCurve::length_in_disc(const Ball& disc) const {
    DBox bbox;
    for (int a = 0; a < 2; ++a) {
        bbox.lo[a] = disc.center[a] - disc.radius;
        bbox.hi[a] = disc.center[a] + disc.radius;
    }
    return sum_over_cells(*this, bbox, [&](const Segment& s) { return clipped_disc(s, disc); });
}

BoundaryCurve extract_boundary(const DistanceField& field, double r) {
    if (field.dim() != 2) throw Error(ErrorKind::invalid_params, "boundary extraction needs d = 2");
    const double h = field.spacing();
    if (!(r >= 8.0 * h)) throw Error(ErrorKind::scale_too_fine, "boundary scale below 8 grid spacings");
    const std::size_t nodes = field.nodes_per_axis();
    const std::size_t cells = nodes - 1;

    auto load = [&](std::size_t i, std::size_t j) {
        Cell c;
        const std::size_t ii[4] = {i, i + 1, i + 1, i}, jj[4] = {j, j, j + 1, j + 1};
        for (int k = 0; k < 4; ++k) {
            c.v[k] = field.at(ii[k], jj[k]);
            c.p[k] = {field.coord(ii[k]), field.coord(jj[k]), 0.0};
        }
        return c;
    };

    // Saddle cells first, so their exact center distances come in one batch.
    std::vector<std::vector<std::uint64_t>> row_saddles(cells);
    parallel_for(cells, [&](std::size_t j) {
        for (std::size_t i = 0; i < cells; ++i) {
            Cell c = load(i, j);
            if (is_saddle(inside_mask(c, r))) row_saddles[j].push_back(j * cells + i);
        }
    });
    std::vector<std::uint64_t> saddle_keys;
    for (auto& v : row_saddles) saddle_keys.insert(saddle_keys.end(), v.begin(), v.end());
    std::vector<Vec> centers(saddle_keys.size());
    for (std::size_t s = 0; s < saddle_keys.size(); ++s) {
        const double i = static_cast<double>(saddle_keys[s] % cells), j = static_cast<double>(saddle_keys[s] / cells);
        centers[s] = {(i + 0.5) * h, (j + 0.5) * h, 0.0};
    }
    CandidateFilter filter(field.source());
    const std::vector<double> center_dist = batch_distances(filter, centers);

    struct Row {
        std::vector<Segment> segs;
        std::vector<std::uint64_t> keys;
        double length = 0.0;
    };
    std::vector<Row> rows(cells);
    parallel_for(cells, [&](std::size_t j) {
        Row& row = rows[j];
        for (std::size_t i = 0; i < cells; ++i) {
            Cell c = load(i, j);
            const int mask = inside_mask(c, r);
            bool center_inside = false;
            if (is_saddle(mask)) {
                const std::uint64_t key = j * cells + i;
                auto it = std::lower_bound(saddle_keys.begin(), saddle_keys.end(), key);
                center_inside = center_dist[static_cast<std::size_t>(it - saddle_keys.begin())] < r;
            }
            march(c, mask, r, center_inside, [&](const Segment& s) {
                row.segs.push_back(s);
                row.keys.push_back(j * cells + i);
                row.length += s.length();
            });
        }
    });

    BoundaryCurve curve;
    curve.r = r;
    curve.grid_level = field.level();
    curve.saddles = saddle_keys.size();
    for (auto& row : rows) {
        curve.segments.insert(curve.segments.end(), row.segs.begin(), row.segs.end());
        curve.cells.insert(curve.cells.end(), row.keys.begin(), row.keys.end());
        curve.total_length += row.length;
    }
    curve.segment_count = curve.segments.size();
    return curve;
}

namespace {

struct SparseOut {
    std::vector<Segment> segs;
    std::vector<std::uint64_t> keys;
    double length = 0.0;
    std::uint64_t count = 0;
    std::uint64_t saddles = 0;
};

class SparseTracer {
public:
    SparseTracer(const CandidateFilter& filter, int level, double r, bool keep)
        : filter_(filter), level_(level), r_(r), keep_(keep) {}

    /// -1: the cell cannot meet the iso-line; 0: leaf reached; 1: split further.
    int classify(const DyadicCube& q, std::span<const std::uint32_t> cands, std::vector<std::uint32_t>& kept) const {
        RegionBounds rb = filter_.filter(q.dbox(), cands, kept);
        const double r2 = r_ * r_;
        if (rb.inside_box) return -1;
        if (rb.min_sq > r2 * (1.0 + 1e-12)) return -1;
        if (rb.max_sq < r2 * (1.0 - 1e-12)) return -1;
        return q.level >= level_ ? 0 : 1;
    }

    void run(const DyadicCube& q, std::span<const std::uint32_t> cands, SparseOut& out) const {
        std::vector<std::uint32_t> kept;
        const int state = classify(q, cands, kept);
        if (state < 0) return;
        if (state == 0) {
            leaf(q, kept, out);
            return;
        }
        for (int m = 0; m < 4; ++m) {
            DyadicCube c{2, q.level + 1, {2 * q.index[0] + (m & 1), 2 * q.index[1] + (m >> 1), 0}};
            run(c, kept, out);
        }
    }

    void leaf(const DyadicCube& q, std::span<const std::uint32_t> kept, SparseOut& out) const {
        const double h = q.side();
        const double x0 = static_cast<double>(q.index[0]) * h, y0 = static_cast<double>(q.index[1]) * h;
        Cell c;
        const double xs[4] = {x0, x0 + h, x0 + h, x0}, ys[4] = {y0, y0, y0 + h, y0 + h};
        for (int k = 0; k < 4; ++k) {
            c.p[k] = {xs[k], ys[k], 0.0};
            c.v[k] = std::sqrt(filter_.sq_dist(c.p[k], kept));
        }
        const int mask = inside_mask(c, r_);
        bool center_inside = false;
        if (is_saddle(mask)) {
            ++out.saddles;
            center_inside = std::sqrt(filter_.sq_dist({x0 + 0.5 * h, y0 + 0.5 * h, 0.0}, kept)) < r_;
        }
        const std::uint64_t key =
            static_cast<std::uint64_t>(q.index[1]) * (std::uint64_t{1} << level_) + static_cast<std::uint64_t>(q.index[0]);
        march(c, mask, r_, center_inside, [&](const Segment& s) {
            out.length += s.length();
            ++out.count;
            if (keep_) {
                out.segs.push_back(s);
                out.keys.push_back(key);
            }
        });
    }

private:
    const CandidateFilter& filter_;
    int level_;
    double r_;
    bool keep_;
};

}  // namespace

BoundaryCurve extract_boundary_sparse(const BoxSet& set, int level, double r, bool keep_segments) {
    if (set.dim() != 2) throw Error(ErrorKind::invalid_params, "boundary extraction needs d = 2");
    if (level < 4 || level > 30) throw Error(ErrorKind::invalid_params, "grid level out of range");
    const double h = std::ldexp(1.0, -level);
    if (!(r >= 8.0 * h)) throw Error(ErrorKind::scale_too_fine, "boundary scale below 8 grid spacings");

    CandidateFilter filter(set);
    SparseTracer tracer(filter, level, r, keep_segments);
    struct Task {
        DyadicCube cube;
        std::vector<std::uint32_t> cands;
    };
    const int seed_level = std::min(level, 5);
    std::vector<Task> frontier{{DyadicCube{2, 0, {}}, {filter.all().begin(), filter.all().end()}}};
    for (int l = 0; l < seed_level; ++l) {
        std::vector<Task> next;
        for (auto& t : frontier) {
            std::vector<std::uint32_t> kept;
            if (tracer.classify(t.cube, t.cands, kept) <= 0) continue;
            for (int m = 0; m < 4; ++m)
                next.push_back({DyadicCube{2, l + 1, {2 * t.cube.index[0] + (m & 1), 2 * t.cube.index[1] + (m >> 1), 0}},
                                kept});
        }
        frontier = std::move(next);
    }
    std::vector<SparseOut> outs(frontier.size());
    parallel_for(frontier.size(), [&](std::size_t i) { tracer.run(frontier[i].cube, frontier[i].cands, outs[i]); });

    BoundaryCurve curve;
    curve.r = r;
    curve.grid_level = level;
    std::vector<std::pair<std::uint64_t, Segment>> all;
    for (auto& o : outs) {
        curve.total_length += o.length;
        curve.segment_count += o.count;
        curve.saddles += o.saddles;
        for (std::size_t s = 0; s < o.segs.size(); ++s) all.emplace_back(o.keys[s], o.segs[s]);
    }
    if (keep_segments) {
        if (all.size() > max_cells()) throw Error(ErrorKind::resource, "segment count exceeds the cell cap");
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [k, s] : all) {
            curve.cells.push_back(k);
            curve.segments.push_back(s);
        }
    }
    return curve;
}

}  // namespace whitneydim
