#include "whitneydim/distance_field.hpp"

#include <cmath>
#include <limits>

#include "whitneydim/candidates.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

DistanceField::DistanceField(std::shared_ptr<const BoxSet> source, int level, std::vector<double> values)
    : source_(std::move(source)),
      level_(level),
      spacing_(std::ldexp(1.0, -level)),
      n_((std::size_t{1} << level) + 1),
      values_(std::move(values)) {}

namespace {

struct NodeBlock {
    std::size_t i0, i1, j0, j1;  // half-open node ranges
    std::vector<std::uint32_t> candidates;
};

class FieldBuilder {
public:
    FieldBuilder(const CandidateFilter& filter, int level, std::vector<double>& values)
        : filter_(filter),
          dim_(filter.dim()),
          h_(std::ldexp(1.0, -level)),
          n_((std::size_t{1} << level) + 1),
          values_(values) {}

    DBox region(const NodeBlock& b) const {
        DBox r;
        r.lo[0] = static_cast<double>(b.i0) * h_;
        r.hi[0] = static_cast<double>(b.i1 - 1) * h_;
        if (dim_ >= 2) {
            r.lo[1] = static_cast<double>(b.j0) * h_;
            r.hi[1] = static_cast<double>(b.j1 - 1) * h_;
        }
        return r;
    }

    /// Splits the root breadth-first until there are enough independent tasks.
    std::vector<NodeBlock> seed_tasks(std::size_t target) const {
        std::vector<NodeBlock> blocks{{0, n_, 0, dim_ >= 2 ? n_ : 1, {}}};
        blocks[0].candidates.assign(filter_.all().begin(), filter_.all().end());
        while (blocks.size() < target) {
            std::vector<NodeBlock> next;
            bool split_any = false;
            for (auto& b : blocks) {
                if (!splittable(b)) {
                    next.push_back(std::move(b));
                    continue;
                }
                split_any = true;
                for (auto& c : children(b)) {
                    std::vector<std::uint32_t> kept;
                    filter_.filter(region(c), b.candidates, kept);
                    c.candidates = std::move(kept);
                    next.push_back(std::move(c));
                }
            }
            blocks = std::move(next);
            if (!split_any) break;
        }
        return blocks;
    }

    void run(const NodeBlock& block) {
        std::vector<std::uint32_t> kept;
        RegionBounds rb = filter_.filter(region(block), block.candidates, kept);
        if (rb.inside_box) {
            fill(block, 0.0);
            return;
        }
        const std::size_t nodes = (block.i1 - block.i0) * (block.j1 - block.j0);
        if (nodes <= 1024 || kept.size() <= 2 || !splittable(block)) {
            evaluate(block, kept);
            return;
        }
        NodeBlock parent{block.i0, block.i1, block.j0, block.j1, std::move(kept)};
        for (auto& c : children(parent)) {
            c.candidates = parent.candidates;
            run(c);
        }
    }

private:
    bool splittable(const NodeBlock& b) const { return (b.i1 - b.i0) > 1 || (b.j1 - b.j0) > 1; }

    std::vector<NodeBlock> children(const NodeBlock& b) const {
        std::vector<NodeBlock> out;
        std::size_t im = (b.i0 + b.i1) / 2, jm = (b.j0 + b.j1) / 2;
        bool sx = b.i1 - b.i0 > 1, sy = b.j1 - b.j0 > 1;
        if (sx && sy) {
            out.push_back({b.i0, im, b.j0, jm, {}});
            out.push_back({im, b.i1, b.j0, jm, {}});
            out.push_back({b.i0, im, jm, b.j1, {}});
            out.push_back({im, b.i1, jm, b.j1, {}});
        } else if (sx) {
            out.push_back({b.i0, im, b.j0, b.j1, {}});
            out.push_back({im, b.i1, b.j0, b.j1, {}});
        } else {
            out.push_back({b.i0, b.i1, b.j0, jm, {}});
            out.push_back({b.i0, b.i1, jm, b.j1, {}});
        }
        return out;
    }

    void fill(const NodeBlock& b, double v) {
        for (std::size_t j = b.j0; j < b.j1; ++j)
            for (std::size_t i = b.i0; i < b.i1; ++i) values_[j * n_ + i] = v;
    }

    void evaluate(const NodeBlock& b, const std::vector<std::uint32_t>& ids) {
        CandidateFilter::Rows rows;
        filter_.gather(ids, rows);
        const auto& k = kernels::active();
        const double x0 = static_cast<double>(b.i0) * h_;
        for (std::size_t j = b.j0; j < b.j1; ++j) {
            std::span<double> out(values_.data() + j * n_ + b.i0, b.i1 - b.i0);
            for (double& v : out) v = std::numeric_limits<double>::infinity();
            const double y = dim_ >= 2 ? static_cast<double>(j) * h_ : 0.0;
            k.min_sq_dist_row(x0, h_, y, rows.view(), out);
            for (double& v : out) v = std::sqrt(v);
        }
    }

    const CandidateFilter& filter_;
    int dim_;
    double h_;
    std::size_t n_;
    std::vector<double>& values_;
};

}  // namespace

DistanceField compute_distance_field(std::shared_ptr<const BoxSet> set, int level) {
    if (!set) throw Error(ErrorKind::invalid_params, "distance field needs a set");
    if (level < 4) throw Error(ErrorKind::invalid_params, "distance field grid level must be >= 4");
    if (set->dim() > 2) throw Error(ErrorKind::invalid_params, "distance field supports d = 1, 2");
    if (level > 30) throw Error(ErrorKind::resource, "distance field grid level too large");
    const std::uint64_t n = (std::uint64_t{1} << level) + 1;
    std::uint64_t total = n;
    for (int a = 1; a < set->dim(); ++a) {
        if (total > max_cells() / n + 1) throw Error(ErrorKind::resource, "distance field exceeds cell cap");
        total *= n;
    }
    if (total > max_cells()) throw Error(ErrorKind::resource, "distance field exceeds cell cap");

    std::vector<double> values(total, 0.0);
    CandidateFilter filter(*set);
    FieldBuilder builder(filter, level, values);
    auto tasks = builder.seed_tasks(64);
    parallel_for(tasks.size(), [&](std::size_t t) { builder.run(tasks[t]); });
    return DistanceField(std::move(set), level, std::move(values));
}

DistanceField compute_distance_field(const BoxSet& set, int level) {
    return compute_distance_field(std::make_shared<const BoxSet>(set), level);
}

}  // namespace whitneydim
