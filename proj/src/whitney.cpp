#include "whitneydim/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "whitneydim/candidates.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

namespace {

struct Task {
    DyadicCube cube;
    std::vector<std::uint32_t> candidates;
};

struct Output {
    std::vector<WhitneyCube> cubes;
    std::uint64_t residual = 0;
};

class Decomposer {
public:
    Decomposer(const CandidateFilter& filter, int k_max) : filter_(filter), dim_(filter.dim()), k_max_(k_max) {}

    /// Handles cube; returns true and fills `kept` when it must be split.
    bool decide(const DyadicCube& q, std::span<const std::uint32_t> cands, std::vector<std::uint32_t>& kept,
                Output& out) const {
        RegionBounds rb = filter_.filter(q.dbox(), cands, kept);
        if (rb.inside_box) return false;
        if (selected(q, rb, kept)) {
            out.cubes.push_back({q, std::sqrt(rb.min_sq)});
            if (out.cubes.size() > max_cells())
                throw Error(ErrorKind::resource, "Whitney cube count exceeds the cell cap");
            return false;
        }
        if (q.level >= k_max_) {
            if (rb.min_sq > 0.0) ++out.residual;
            return false;
        }
        return true;
    }

    void run(const DyadicCube& q, std::span<const std::uint32_t> cands, Output& out) const {
        std::vector<std::uint32_t> kept;
        if (!decide(q, cands, kept, out)) return;
        for_children(q, [&](const DyadicCube& c) { run(c, kept, out); });
    }

    template <class F>
    void for_children(const DyadicCube& q, F&& f) const {
        const int n = 1 << dim_;
        for (int m = 0; m < n; ++m) {
            DyadicCube c = q;
            c.level = q.level + 1;
            for (int a = 0; a < dim_; ++a) c.index[a] = 2 * q.index[a] + ((m >> a) & 1);
            f(c);
        }
    }

private:
    bool selected(const DyadicCube& q, const RegionBounds& rb, std::span<const std::uint32_t> kept) const {
        const double diam_sq = static_cast<double>(dim_) * std::ldexp(1.0, -2 * q.level);
        if (rb.min_sq > diam_sq * (1.0 + 1e-9)) return true;
        if (rb.min_sq < diam_sq * (1.0 - 1e-9)) return false;
        // Near tie: settle against every box that could be the nearest one.
        const auto& dboxes = filter_.set().dboxes();
        const auto& boxes = filter_.set().boxes();
        const DBox qb = q.dbox();
        for (std::uint32_t id : kept) {
            if (sq_dist_box_box(qb, dboxes[id], dim_) > diam_sq * (1.0 + 1e-9)) continue;
            if (compare_cube_box_dist_to_diam(q, boxes[id], 1) < 0) return false;
        }
        return true;
    }

    const CandidateFilter& filter_;
    int dim_;
    int k_max_;
};

}  // namespace

WhitneyDecomposition whitney_decompose(std::shared_ptr<const BoxSet> set, int k_max) {
    if (!set) throw Error(ErrorKind::invalid_params, "Whitney decomposition needs a set");
    if (!set->normalized()) throw Error(ErrorKind::invalid_params, "Whitney decomposition needs a normalized set");
    if (k_max < 3) throw Error(ErrorKind::invalid_params, "k_max must be >= 3");
    if (k_max > 30) throw Error(ErrorKind::resource, "k_max too large");
    const int dim = set->dim();

    CandidateFilter filter(*set);
    Decomposer dec(filter, k_max);

    // Coarse levels run serially and produce independent subtrees.
    const int seed_level = std::min(k_max, dim == 1 ? 6 : 3);
    Output seed_out;
    std::vector<Task> tasks;
    std::vector<Task> frontier{{DyadicCube{dim, 0, {}}, {filter.all().begin(), filter.all().end()}}};
    while (!frontier.empty()) {
        std::vector<Task> next;
        for (auto& t : frontier) {
            if (t.cube.level == seed_level) {
                tasks.push_back(std::move(t));
                continue;
            }
            std::vector<std::uint32_t> kept;
            if (!dec.decide(t.cube, t.candidates, kept, seed_out)) continue;
            dec.for_children(t.cube, [&](const DyadicCube& c) { next.push_back({c, kept}); });
        }
        frontier = std::move(next);
    }

    std::vector<Output> outs(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) { dec.run(tasks[i].cube, tasks[i].candidates, outs[i]); });

    WhitneyDecomposition w;
    w.dim = dim;
    w.k_max = k_max;
    w.source = set;
    std::size_t total = seed_out.cubes.size();
    for (const auto& o : outs) total += o.cubes.size();
    if (total > max_cells()) throw Error(ErrorKind::resource, "Whitney cube count exceeds the cell cap");
    w.cubes.reserve(total);
    w.cubes.insert(w.cubes.end(), seed_out.cubes.begin(), seed_out.cubes.end());
    w.residual_cells = seed_out.residual;
    for (auto& o : outs) {
        w.cubes.insert(w.cubes.end(), o.cubes.begin(), o.cubes.end());
        w.residual_cells += o.residual;
    }
    std::sort(w.cubes.begin(), w.cubes.end(), [](const auto& a, const auto& b) { return a.cube < b.cube; });
    w.residual_volume = static_cast<double>(w.residual_cells) * std::ldexp(1.0, -dim * k_max);
    return w;
}

WhitneyDecomposition whitney_decompose(const BoxSet& set, int k_max) {
    return whitney_decompose(std::make_shared<const BoxSet>(set), k_max);
}

std::uint64_t GenerationCounts::total() const {
    std::uint64_t t = 0;
    for (const auto& [k, n] : counts) t += n;
    return t;
}

bool cube_meets_ball(const DyadicCube& q, const Ball& b) noexcept {
    return sq_dist_point_box(b.center, q.dbox(), q.dim) < b.radius * b.radius;
}

GenerationCounts raw_generation_counts(const WhitneyDecomposition& w) {
    GenerationCounts g;
    g.k_lo = 0;
    g.k_hi = w.k_max;
    for (int k = g.k_lo; k <= g.k_hi; ++k) g.counts[k] = 0;
    for (const auto& c : w.cubes) ++g.counts[c.cube.level];
    return g;
}

GenerationCounts generation_counts(const WhitneyDecomposition& w, const std::optional<Ball>& scope) {
    GenerationCounts g;
    g.k_lo = 3;
    g.k_hi = w.k_max - 1;
    g.scope = scope;
    for (int k = g.k_lo; k <= g.k_hi; ++k) g.counts[k] = 0;
    for (const auto& c : w.cubes) {
        const int k = c.cube.level;
        if (k < g.k_lo || k > g.k_hi) continue;
        if (scope && !cube_meets_ball(c.cube, *scope)) continue;
        ++g.counts[k];
    }
    return g;
}

std::uint64_t local_count(const WhitneyDecomposition& w, const Ball& b0, int k) {
    if (!w.source) throw Error(ErrorKind::invalid_params, "decomposition has no source set");
    if (dist_point_to_set(b0.center, *w.source) != 0.0)
        throw Error(ErrorKind::center_not_in_set, "local count ball must be centered on E");
    if (!(b0.radius > 0.0)) throw Error(ErrorKind::invalid_params, "ball radius must be positive");
    auto lo = std::lower_bound(w.cubes.begin(), w.cubes.end(), k,
                               [](const WhitneyCube& c, int level) { return c.cube.level < level; });
    std::uint64_t n = 0;
    for (auto it = lo; it != w.cubes.end() && it->cube.level == k; ++it)
        if (cube_meets_ball(it->cube, b0)) ++n;
    return n;
}

namespace {

std::uint64_t cube_key(int level, const std::array<std::int64_t, kMaxDim>& idx) {
    // level < 2^5, indices < 2^29 each (d <= 2).
    return (static_cast<std::uint64_t>(level) << 58) | (static_cast<std::uint64_t>(idx[0]) << 29) |
           static_cast<std::uint64_t>(idx[1]);
}

}  // namespace

int neighbor_level_gap(const WhitneyDecomposition& w, int max_gap) {
    std::unordered_set<std::uint64_t> present;
    present.reserve(w.cubes.size() * 2);
    for (const auto& c : w.cubes) present.insert(cube_key(c.cube.level, c.cube.index));
    const int dim = w.dim;
    int worst = 0;
    const int combos = dim == 1 ? 3 : 9;
    for (const auto& c : w.cubes) {
        const std::int64_t n = std::int64_t{1} << c.cube.level;
        for (int t = 0; t < combos; ++t) {
            std::array<std::int64_t, kMaxDim> off{t % 3 - 1, dim == 2 ? t / 3 - 1 : 0, 0};
            if (off[0] == 0 && off[1] == 0) continue;
            std::array<std::int64_t, kMaxDim> idx{};
            bool inside = true;
            for (int a = 0; a < dim; ++a) {
                idx[a] = c.cube.index[a] + off[a];
                if (idx[a] < 0 || idx[a] >= n) inside = false;
            }
            if (!inside) continue;
            for (int up = 0; up <= max_gap && up <= c.cube.level; ++up) {
                std::array<std::int64_t, kMaxDim> anc{};
                for (int a = 0; a < dim; ++a) anc[a] = idx[a] >> up;
                if (present.count(cube_key(c.cube.level - up, anc))) {
                    worst = std::max(worst, up);
                    break;
                }
            }
        }
    }
    return worst;
}

namespace {

struct MortonSpan {
    std::uint64_t lo = 0, hi = 0;  ///< codes at the finest level present
    std::uint32_t cube = 0;
};

/// Cubes as Morton-code intervals at the finest level present, sorted.
std::vector<MortonSpan> morton_spans(const WhitneyDecomposition& w, int& finest) {
    finest = 0;
    for (const auto& c : w.cubes) finest = std::max(finest, c.cube.level);
    const int top = finest;
    auto morton = [&](const DyadicCube& q) {
        const int shift = top - q.level;
        std::uint64_t code = 0;
        for (int bit = top - 1; bit >= 0; --bit)
            for (int a = w.dim - 1; a >= 0; --a)
                code = (code << 1) | ((static_cast<std::uint64_t>(q.index[a]) << shift >> bit) & 1u);
        return code;
    };
    std::vector<MortonSpan> spans(w.cubes.size());
    parallel_for(w.cubes.size(), [&](std::size_t i) {
        const DyadicCube& q = w.cubes[i].cube;
        const std::uint64_t lo = morton(q);
        spans[i] = {lo, lo + (std::uint64_t{1} << (w.dim * (top - q.level))), static_cast<std::uint32_t>(i)};
    });
    std::sort(spans.begin(), spans.end(), [](const MortonSpan& x, const MortonSpan& y) {
        return x.lo != y.lo ? x.lo < y.lo : x.hi > y.hi;
    });
    return spans;
}

}  // namespace

SandwichAudit audit_sandwich(const WhitneyDecomposition& w) {
    const BoxSet& set = *w.source;
    CandidateFilter filter(set);
    int finest = 0;
    const std::vector<MortonSpan> spans = morton_spans(w, finest);
    const int children = 1 << w.dim;

    // The nearest box of a cube is always among the candidates kept for it,
    // so the two exact comparisons only look at those.
    auto audit_cube = [&](const DyadicCube& q, std::span<const std::uint32_t> ids, SandwichAudit& out) {
        ++out.checked;
        bool lower_ok = true, upper_ok = false;
        for (std::uint32_t id : ids) {
            if (lower_ok && compare_cube_box_dist_to_diam(q, set.boxes()[id], 1) < 0) lower_ok = false;
            if (!upper_ok && compare_cube_box_dist_to_diam(q, set.boxes()[id], 4) <= 0) upper_ok = true;
        }
        if (!lower_ok) ++out.lower_failures;
        if (!upper_ok) ++out.upper_failures;
    };
    // A tree node covers a contiguous run of spans; it is a selected cube
    // when that run is a single span of the node's own size.
    struct Node {
        DyadicCube cube;
        std::uint64_t lo = 0;
        std::size_t begin = 0, end = 0;
        std::vector<std::uint32_t> ids;
    };
    auto expand = [&](const Node& n, std::vector<Node>& next, SandwichAudit& out) {
        if (n.cube.level >= finest) return;  // duplicates; caught by cubes_disjoint
        const std::uint64_t width = std::uint64_t{1} << (w.dim * (finest - n.cube.level - 1));
        std::size_t first = n.begin;
        for (int t = 0; t < children; ++t) {
            const std::uint64_t lo = n.lo + static_cast<std::uint64_t>(t) * width;
            const auto stop = std::lower_bound(spans.begin() + static_cast<std::ptrdiff_t>(first),
                                               spans.begin() + static_cast<std::ptrdiff_t>(n.end), lo + width,
                                               [](const MortonSpan& s, std::uint64_t v) { return s.lo < v; });
            const std::size_t last = static_cast<std::size_t>(stop - spans.begin());
            if (last > first) {
                Node c;
                c.cube.dim = w.dim;
                c.cube.level = n.cube.level + 1;
                for (int a = 0; a < w.dim; ++a) c.cube.index[a] = 2 * n.cube.index[a] + ((t >> a) & 1);
                c.lo = lo;
                c.begin = first;
                c.end = last;
                filter.filter(c.cube.dbox(), n.ids, c.ids);
                if (last - first == 1 && spans[first].hi - spans[first].lo == width) audit_cube(c.cube, c.ids, out);
                else next.push_back(std::move(c));
            }
            first = last;
        }
    };
    SandwichAudit audit;
    if (spans.empty()) return audit;
    std::vector<Node> level(1);
    level[0].cube.dim = w.dim;
    level[0].end = spans.size();
    level[0].ids.assign(filter.all().begin(), filter.all().end());
    // Serial split down to a few hundred subtrees, then one task per subtree.
    for (int depth = 0; depth < 4 && !level.empty(); ++depth) {
        std::vector<Node> next;
        for (const auto& n : level) expand(n, next, audit);
        level = std::move(next);
    }
    std::vector<SandwichAudit> parts(level.size());
    parallel_for(level.size(), [&](std::size_t i) {
        std::vector<Node> stack{std::move(level[i])};
        std::vector<Node> next;
        while (!stack.empty()) {
            Node n = std::move(stack.back());
            stack.pop_back();
            next.clear();
            expand(n, next, parts[i]);
            for (auto& c : next) stack.push_back(std::move(c));
        }
    });
    for (const auto& p : parts) {
        audit.checked += p.checked;
        audit.lower_failures += p.lower_failures;
        audit.upper_failures += p.upper_failures;
    }
    return audit;
}

bool cubes_disjoint(const WhitneyDecomposition& w) {
    // Dyadic cubes overlap iff one contains the other iff their Morton
    // intervals overlap.
    int finest = 0;
    const std::vector<MortonSpan> spans = morton_spans(w, finest);
    for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i].lo < spans[i - 1].hi) return false;
    return true;
}

}  // namespace whitneydim
