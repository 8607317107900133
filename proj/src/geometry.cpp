#include "whitneydim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

namespace {

inline double axis_gap(double x, double lo, double hi) noexcept {
    return std::max(std::max(lo - x, x - hi), 0.0);
}

using BigRational = boost::multiprecision::cpp_rational;

BigRational big(const Rational& r) { return BigRational(r.num()) / BigRational(r.den()); }

}  // namespace

double sq_dist_point_box(const Vec& p, const DBox& b, int dim) noexcept {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        double g = axis_gap(p[a], b.lo[a], b.hi[a]);
        s += g * g;
    }
    return s;
}

double sq_dist_box_box(const DBox& a, const DBox& b, int dim) noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double g = std::max(std::max(b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]), 0.0);
        s += g * g;
    }
    return s;
}

double max_sq_dist_box_box(const DBox& region, const DBox& b, int dim) noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double g = std::max(axis_gap(region.lo[i], b.lo[i], b.hi[i]), axis_gap(region.hi[i], b.lo[i], b.hi[i]));
        s += g * g;
    }
    return s;
}

bool box_contains(const DBox& outer, const DBox& inner, int dim) noexcept {
    for (int i = 0; i < dim; ++i)
        if (inner.lo[i] < outer.lo[i] || inner.hi[i] > outer.hi[i]) return false;
    return true;
}

BoxSet::BoxSet(int dim, std::vector<RationalBox> boxes, bool normalized, nlohmann::json meta)
    : dim_(dim), boxes_(std::move(boxes)), normalized_(normalized), meta_(std::move(meta)) {
    if (dim_ < 1 || dim_ > kMaxDim) throw Error(ErrorKind::format, "ambient dimension must be 1..3");
    if (boxes_.empty()) throw Error(ErrorKind::empty_set, "box set has no boxes");
    const Rational zero(0), one(1), quarter(1, 4), three_quarters(3, 4);
    dboxes_.reserve(boxes_.size());
    for (const auto& b : boxes_) {
        DBox d;
        for (int a = 0; a < dim_; ++a) {
            if (b.side[a].sign() < 0) throw Error(ErrorKind::format, "negative box side");
            Rational hi = b.hi(a);
            if (b.lo[a] < zero || hi > one) throw Error(ErrorKind::format, "box outside [0,1]^d");
            if (normalized_ && (b.lo[a] < quarter || hi > three_quarters))
                throw Error(ErrorKind::format, "normalized box outside [1/4,3/4]^d");
            d.lo[a] = b.lo[a].to_double();
            d.hi[a] = hi.to_double();
        }
        dboxes_.push_back(d);
    }
    if (!meta_.is_object()) meta_ = nlohmann::json::object();
}

BoxSet BoxSet::normalize() const {
    if (normalized_) return *this;
    const Rational half(1, 2), quarter(1, 4);
    std::vector<RationalBox> out;
    out.reserve(boxes_.size());
    for (const auto& b : boxes_) {
        RationalBox n;
        for (int a = 0; a < dim_; ++a) {
            n.lo[a] = quarter + b.lo[a] * half;
            n.side[a] = b.side[a] * half;
        }
        out.push_back(n);
    }
    nlohmann::json meta = meta_;
    meta["normalization"] = {{"scale", "1/2"}, {"offset", "1/4"}};
    return BoxSet(dim_, std::move(out), true, std::move(meta));
}

Rational BoxSet::volume_sum() const {
    Rational total(0);
    for (const auto& b : boxes_) {
        Rational v(1);
        for (int a = 0; a < dim_; ++a) v *= b.side[a];
        total += v;
    }
    return total;
}

bool BoxSet::measure_zero() const {
    if (meta_.contains("attractor_null") && meta_["attractor_null"].is_boolean() &&
        meta_["attractor_null"].get<bool>())
        return true;
    // Sum in doubles: exact sums of many triadic volumes overflow 64 bits.
    double total = 0.0;
    for (const auto& b : dboxes_) {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= (b.hi[a] - b.lo[a]);
        total += v;
    }
    return total < std::ldexp(1.0, -20);
}

DBox BoxSet::bounding_box() const noexcept {
    DBox bb;
    for (int a = 0; a < dim_; ++a) {
        bb.lo[a] = std::numeric_limits<double>::infinity();
        bb.hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (const auto& b : dboxes_)
        for (int a = 0; a < dim_; ++a) {
            bb.lo[a] = std::min(bb.lo[a], b.lo[a]);
            bb.hi[a] = std::max(bb.hi[a], b.hi[a]);
        }
    return bb;
}

double BoxSet::diameter() const {
    if (dim_ == 1) {
        DBox bb = bounding_box();
        return bb.hi[0] - bb.lo[0];
    }
    // The diameter of a union of boxes is attained between box corners, hence
    // between vertices of the convex hull of all corners.
    std::vector<std::array<double, 2>> pts;
    if (dim_ == 2) {
        pts.reserve(boxes_.size() * 4);
        for (const auto& b : dboxes_) {
            pts.push_back({b.lo[0], b.lo[1]});
            pts.push_back({b.hi[0], b.lo[1]});
            pts.push_back({b.lo[0], b.hi[1]});
            pts.push_back({b.hi[0], b.hi[1]});
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.size() == 1) return 0.0;
        auto cross = [](const auto& o, const auto& a, const auto& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        std::vector<std::array<double, 2>> hull(2 * pts.size());
        std::size_t k = 0;
        for (const auto& p : pts) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
            hull[k++] = p;
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
            while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
            hull[k++] = pts[i];
        }
        hull.resize(k > 1 ? k - 1 : k);
        double best = 0.0;
        for (std::size_t i = 0; i < hull.size(); ++i)
            for (std::size_t j = i + 1; j < hull.size(); ++j) {
                double dx = hull[i][0] - hull[j][0], dy = hull[i][1] - hull[j][1];
                best = std::max(best, dx * dx + dy * dy);
            }
        return std::sqrt(best);
    }
    double best = 0.0;
    for (std::size_t i = 0; i < dboxes_.size(); ++i)
        for (std::size_t j = i; j < dboxes_.size(); ++j) {
            double s = 0.0;
            for (int a = 0; a < dim_; ++a) {
                double g = std::max(dboxes_[i].hi[a] - dboxes_[j].lo[a], dboxes_[j].hi[a] - dboxes_[i].lo[a]);
                s += g * g;
            }
            best = std::max(best, s);
        }
    return std::sqrt(best);
}

double DyadicCube::side() const noexcept { return std::ldexp(1.0, -level); }

double DyadicCube::diam() const noexcept { return std::sqrt(static_cast<double>(dim)) * side(); }

DBox DyadicCube::dbox() const noexcept {
    DBox b;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = std::ldexp(static_cast<double>(index[a]), -level);
        b.hi[a] = std::ldexp(static_cast<double>(index[a] + 1), -level);
    }
    return b;
}

Vec DyadicCube::center() const noexcept {
    Vec c{};
    for (int a = 0; a < dim; ++a) c[a] = std::ldexp(static_cast<double>(2 * index[a] + 1), -level - 1);
    return c;
}

RationalBox DyadicCube::rbox() const {
    RationalBox b;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = dyadic(index[a], level);
        b.side[a] = dyadic(1, level);
    }
    return b;
}

DyadicCube DyadicCube::parent() const noexcept {
    DyadicCube p = *this;
    if (p.level == 0) return p;
    p.level -= 1;
    for (int a = 0; a < dim; ++a) p.index[a] >>= 1;
    return p;
}

double dist_point_to_set(const Vec& p, const BoxSet& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : set.dboxes()) best = std::min(best, sq_dist_point_box(p, b, set.dim()));
    return std::sqrt(best);
}

double dist_dbox_to_set(const DBox& box, const BoxSet& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : set.dboxes()) best = std::min(best, sq_dist_box_box(box, b, set.dim()));
    return std::sqrt(best);
}

double dist_box_to_set(const DyadicCube& cube, const BoxSet& set) { return dist_dbox_to_set(cube.dbox(), set); }

int compare_cube_box_dist_to_diam(const DyadicCube& cube, const RationalBox& box, int factor) {
    {
        // Floating filter; near-ties (rounding of the box corners) fall through to exact.
        const double side = std::ldexp(1.0, -cube.level);
        double sq = 0.0;
        for (int a = 0; a < cube.dim; ++a) {
            const double clo = static_cast<double>(cube.index[a]) * side, chi = clo + side;
            const double blo = box.lo[a].to_double(), bhi = blo + box.side[a].to_double();
            const double g = blo > chi ? blo - chi : (clo > bhi ? clo - bhi : 0.0);
            sq += g * g;
        }
        const double threshold = static_cast<double>(cube.dim * factor * factor) * side * side;
        const double tol = 1e-9 * threshold + 1e-14 * side * factor;
        if (sq < threshold - tol) return -1;
        if (sq > threshold + tol) return 1;
    }
    BigRational total = 0;
    const BigRational side = BigRational(1) / BigRational(boost::multiprecision::cpp_int(1) << cube.level);
    for (int a = 0; a < cube.dim; ++a) {
        BigRational clo = BigRational(cube.index[a]) * side;
        BigRational chi = clo + side;
        BigRational blo = big(box.lo[a]);
        BigRational bhi = blo + big(box.side[a]);
        BigRational g = 0;
        if (blo > chi) g = blo - chi;
        else if (clo > bhi) g = clo - bhi;
        total += g * g;
    }
    BigRational threshold = BigRational(cube.dim * factor * factor) * side * side;
    if (total < threshold) return -1;
    if (total > threshold) return 1;
    return 0;
}

std::vector<Vec> greedy_packing(std::span<const Vec> candidates, double r, int dim) {
    // Buckets of side 2r: a conflicting center lies in a neighbouring bucket.
    const double cell = 2.0 * r;
    struct KeyHash {
        std::size_t operator()(const std::array<std::int64_t, kMaxDim>& k) const noexcept {
            std::size_t h = 1469598103934665603ULL;
            for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    std::unordered_map<std::array<std::int64_t, kMaxDim>, std::vector<std::size_t>, KeyHash> buckets;
    std::vector<Vec> chosen;
    const double limit = 4.0 * r * r;
    for (const auto& c : candidates) {
        std::array<std::int64_t, kMaxDim> key{};
        for (int a = 0; a < dim; ++a) key[a] = static_cast<std::int64_t>(std::floor(c[a] / cell));
        bool ok = true;
        std::array<std::int64_t, kMaxDim> off{};
        const int span = 1;
        int total = 1;
        for (int a = 0; a < dim; ++a) total *= 2 * span + 1;
        for (int t = 0; t < total && ok; ++t) {
            int rem = t;
            std::array<std::int64_t, kMaxDim> nk = key;
            for (int a = 0; a < dim; ++a) {
                off[a] = rem % (2 * span + 1) - span;
                rem /= 2 * span + 1;
                nk[a] += off[a];
            }
            auto it = buckets.find(nk);
            if (it == buckets.end()) continue;
            for (std::size_t idx : it->second) {
                double s = 0.0;
                for (int a = 0; a < dim; ++a) {
                    double d = chosen[idx][a] - c[a];
                    s += d * d;
                }
                if (s <= limit) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            buckets[key].push_back(chosen.size());
            chosen.push_back(c);
        }
    }
    return chosen;
}

std::vector<Vec> maximal_packing(const BoxSet& set, double r) {
    if (!(r > 0.0)) throw Error(ErrorKind::invalid_params, "packing radius must be positive");
    const int dim = set.dim();
    int level = 0;
    while (std::ldexp(1.0, -level) > r / 8.0) ++level;
    if (level > 40) throw Error(ErrorKind::resource, "packing radius below grid budget");
    std::vector<Vec> cand;
    const std::uint64_t cap = max_cells();
    for (const auto& b : set.boxes()) {
        // Box corners.
        for (int mask = 0; mask < (1 << dim); ++mask) {
            Vec c{};
            for (int a = 0; a < dim; ++a) c[a] = ((mask >> a) & 1) ? b.hi(a).to_double() : b.lo[a].to_double();
            cand.push_back(c);
        }
        // Grid nodes inside the box.
        std::array<std::int64_t, kMaxDim> lo{}, hi{};
        std::uint64_t count = 1;
        for (int a = 0; a < dim; ++a) {
            lo[a] = b.lo[a].ceil_scaled(level);
            hi[a] = b.hi(a).floor_scaled(level);
            if (hi[a] < lo[a]) {
                count = 0;
                break;
            }
            count *= static_cast<std::uint64_t>(hi[a] - lo[a] + 1);
        }
        if (count == 0) continue;
        if (cand.size() + count > cap) throw Error(ErrorKind::resource, "packing candidate grid exceeds cell cap");
        std::array<std::int64_t, kMaxDim> it = lo;
        while (true) {
            Vec c{};
            for (int a = 0; a < dim; ++a) c[a] = std::ldexp(static_cast<double>(it[a]), -level);
            cand.push_back(c);
            int a = 0;
            while (a < dim && ++it[a] > hi[a]) {
                it[a] = lo[a];
                ++a;
            }
            if (a == dim) break;
        }
    }
    std::sort(cand.begin(), cand.end(), [dim](const Vec& x, const Vec& y) {
        for (int a = 0; a < dim; ++a)
            if (x[a] != y[a]) return x[a] < y[a];
        return false;
    });
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    return greedy_packing(cand, r, dim);
}

}  // namespace whitneydim
