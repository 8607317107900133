#include "whitneydim/parallel_sets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "whitneydim/candidates.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/kernels/kernels.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

double neighborhood_volume(const DistanceField& field, double r) {
    const double h = field.spacing();
    if (!(r >= 4.0 * h)) throw Error(ErrorKind::scale_too_fine, "volume scale below 4 grid spacings");
    const auto& k = kernels::active();
    const std::size_t rows = field.dim() == 2 ? field.nodes_per_axis() : 1;
    std::vector<std::size_t> per_row(rows, 0);
    parallel_for(rows, [&](std::size_t j) { per_row[j] = k.count_below(field.row(j), r); });
    std::uint64_t total = 0;
    for (auto c : per_row) total += c;
    return static_cast<double>(total) * std::pow(h, field.dim());
}

std::vector<double> geometric_schedule(double r0, double ratio, int n) {
    if (!(r0 > 0.0) || !(ratio > 0.0) || n < 1) throw Error(ErrorKind::config, "invalid geometric schedule");
    std::vector<double> rs;
    for (int i = 0; i < n; ++i) rs.push_back(r0 * std::pow(ratio, i));
    return rs;
}

std::vector<double> parse_schedule(std::string_view text) {
    if (text.substr(0, 4) != "geo:") throw Error(ErrorKind::config, "schedule must look like geo:r0,ratio,n");
    text.remove_prefix(4);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        parts.emplace_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (parts.size() != 3) throw Error(ErrorKind::config, "schedule must look like geo:r0,ratio,n");
    try {
        std::size_t used = 0;
        double r0 = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("r0");
        double ratio = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("ratio");
        int n = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("n");
        return geometric_schedule(r0, ratio, n);
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::config, "schedule must look like geo:r0,ratio,n");
    }
}

std::vector<double> clip_schedule(std::vector<double> rs, double lo, double hi) {
    std::erase_if(rs, [&](double r) { return r < lo || r > hi; });
    std::sort(rs.begin(), rs.end(), std::greater<>());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return rs;
}

std::vector<double> default_schedule(const BoxSet& set, int grid_level) {
    const double diam = set.diameter();
    const double hi = diam > 0.0 ? diam / 2.0 : 0.25;
    const double lo = 8.0 * std::ldexp(1.0, -grid_level);
    std::vector<double> rs;
    for (int i = 0; i < 64; ++i) rs.push_back(0.5 * std::pow(2.0, -0.5 * i));
    return clip_schedule(rs, lo, hi);
}

// ---------------------------------------------------------------- meter

BoundaryMeter::BoundaryMeter(std::shared_ptr<const BoxSet> set, int grid_level)
    : set_(std::move(set)), level_(grid_level) {
    if (!set_) throw Error(ErrorKind::invalid_params, "boundary meter needs a set");
    if (set_->dim() != 2) throw Error(ErrorKind::invalid_params, "boundary lengths need d = 2");
}

const DistanceField& BoundaryMeter::field() {
    if (!field_) field_.emplace(compute_distance_field(set_, level_));
    return *field_;
}

int BoundaryMeter::shrink_for(double r) const {
    const DBox bb = set_->bounding_box();
    if (bb.lo[0] - r >= 0.0 && bb.lo[1] - r >= 0.0 && bb.hi[0] + r <= 1.0 && bb.hi[1] + r <= 1.0) return 0;
    const double ext = 0.5 * std::hypot(bb.hi[0] - bb.lo[0], bb.hi[1] - bb.lo[1]);
    int p = 1;
    while (std::ldexp(r + ext, -p) > 0.45) ++p;
    return p;
}

std::shared_ptr<const BoxSet> BoundaryMeter::scaled(int p) {
    auto it = scaled_.find(p);
    if (it != scaled_.end()) return it->second;
    // x -> 1/2 + 2^-p (x - c), c the center of the bounding box.
    std::array<Rational, 2> lo{set_->boxes()[0].lo[0], set_->boxes()[0].lo[1]};
    std::array<Rational, 2> hi{set_->boxes()[0].hi(0), set_->boxes()[0].hi(1)};
    for (const auto& b : set_->boxes())
        for (int a = 0; a < 2; ++a) {
            lo[a] = min(lo[a], b.lo[a]);
            hi[a] = max(hi[a], b.hi(a));
        }
    const Rational half(1, 2), scale = dyadic(1, p);
    std::vector<RationalBox> boxes;
    boxes.reserve(set_->size());
    for (const auto& b : set_->boxes()) {
        RationalBox s;
        for (int a = 0; a < 2; ++a) {
            const Rational c = (lo[a] + hi[a]) * half;
            s.lo[a] = half + scale * (b.lo[a] - c);
            s.side[a] = scale * b.side[a];
        }
        boxes.push_back(s);
    }
    auto set = std::make_shared<const BoxSet>(2, std::move(boxes), true, nlohmann::json{{"shrink", p}});
    scaled_[p] = set;
    return set;
}

double BoundaryMeter::length(double r) {
    if (auto it = lengths_.find(r); it != lengths_.end()) return it->second;
    const int p = shrink_for(r);
    const double rs = std::ldexp(r, -p);
    const double h = std::ldexp(1.0, -level_);
    double len = 0.0;
    if (p == 0) {
        if (rs >= 8.0 * h) {
            len = extract_boundary(field(), rs).total_length;
        } else {
            const int level = static_cast<int>(std::ceil(std::log2(8.0 / rs)));
            len = extract_boundary_sparse(*set_, level, rs).total_length;
        }
    } else {
        // The shrunk set is small against the grid: trace only near the curve.
        const int level = std::min(level_, static_cast<int>(std::ceil(std::log2(64.0 / rs))));
        len = extract_boundary_sparse(*scaled(p), level, rs).total_length;
        len = std::ldexp(len, p);
    }
    lengths_[r] = len;
    return len;
}

BoundaryCurve BoundaryMeter::curve(double r) {
    if (shrink_for(r) != 0) throw Error(ErrorKind::invalid_params, "r-boundary leaves the unit square");
    const double h = std::ldexp(1.0, -level_);
    if (r >= 8.0 * h) return extract_boundary(field(), r);
    const int level = static_cast<int>(std::ceil(std::log2(8.0 / r)));
    return extract_boundary_sparse(*set_, level, r, true);
}

double BoundaryMeter::volume(double r) { return neighborhood_volume(field(), r); }

std::vector<ProfileRow> boundary_length_profile(BoundaryMeter& meter, const std::vector<double>& rs) {
    std::vector<double> sorted = rs;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double h = std::ldexp(1.0, -meter.grid_level());
    std::vector<ProfileRow> rows;
    for (double r : sorted) {
        ProfileRow row{r, meter.length(r), 0.0};
        // Volumes only where the field resolves them and E_r stays in the domain.
        const DBox bb = meter.set().bounding_box();
        const bool inside = bb.lo[0] - r >= 0.0 && bb.lo[1] - r >= 0.0 && bb.hi[0] + r <= 1.0 && bb.hi[1] + r <= 1.0;
        row.volume = (inside && r >= 4.0 * h) ? meter.volume(r) : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- spherical

SphericalDims spherical_dims(const std::vector<ProfileRow>& profile, int dim, const CountFit& whitney, int tail) {
    SphericalDims out;
    out.lower_whitney = whitney.lower;
    out.upper_whitney = whitney.upper;
    out.lower_whitney.method = out.upper_whitney.method = "spherical";
    out.lower_whitney.witness["source"] = out.upper_whitney.witness["source"] = "whitney";
    if (dim != 2) return out;

    std::vector<double> xs, ys;
    std::vector<ProfileRow> used;
    for (const auto& row : profile)
        if (row.length > 0.0 && row.r > 0.0 && row.r < 1.0) {
            xs.push_back(std::log2(row.r));
            ys.push_back(std::log2(row.length));
            used.push_back(row);
        }
    if (xs.size() < 3) throw Error(ErrorKind::insufficient_data, "fewer than 3 boundary lengths for the spherical fit");
    // Rows are in descending r, so the tail (smallest r) is at the end.
    LineFit lf = least_squares(xs, ys);
    const std::size_t t = std::min<std::size_t>(xs.size(), static_cast<std::size_t>(std::max(1, tail)));
    double amax = -std::numeric_limits<double>::infinity(), amin = std::numeric_limits<double>::infinity();
    double r_at_max = 0.0, r_at_min = 0.0;
    for (std::size_t i = xs.size() - t; i < xs.size(); ++i) {
        const double alpha = (ys[i] - lf.intercept) / xs[i];
        if (alpha > amax) {
            amax = alpha;
            r_at_max = used[i].r;
        }
        if (alpha < amin) {
            amin = alpha;
            r_at_min = used[i].r;
        }
    }
    const double d1 = dim - 1;
    DimensionEstimate lo{d1 - amax, Variant::lower, "spherical", used.back().r, used.front().r, lf.residual,
                         lf.samples, {{"source", "boundary"}, {"r", r_at_max}, {"slope", lf.slope}}};
    DimensionEstimate up{d1 - amin, Variant::upper, "spherical", used.back().r, used.front().r, lf.residual,
                         lf.samples, {{"source", "boundary"}, {"r", r_at_min}, {"slope", lf.slope}}};
    out.lower_boundary = lo;
    out.upper_boundary = up;
    out.discrepancy = std::max(std::abs(lo.value - out.lower_whitney.value), std::abs(up.value - out.upper_whitney.value));
    return out;
}

// ---------------------------------------------------------------- sandwich

SandwichReport sandwich_check(const WhitneyDecomposition& w, BoundaryMeter& meter, const SandwichOptions& opt) {
    if (opt.a > opt.b) throw Error(ErrorKind::config, "sandwich offsets need a <= b");
    const GenerationCounts raw = raw_generation_counts(w);
    const int last_complete = w.k_max - 1;
    const int d = w.dim;

    struct Base {
        int k;
        double r, length;
        std::uint64_t w_k;
    };
    std::vector<Base> base;
    for (int k = opt.k_lo; k <= opt.k_hi; ++k) {
        if (k > last_complete) break;
        const double r = opt.r_factor * std::ldexp(1.0, -k);
        base.push_back({k, r, meter.length(r), raw.at(k)});
    }
    const int radius = opt.search ? opt.search_radius : 0;
    SandwichReport best;
    bool have = false;
    // Offsets in the order 0, -1, +1, -2, ... so that ties keep the smaller shift.
    for (int step = 0; step <= 2 * radius; ++step) {
        const int s = step % 2 == 0 ? step / 2 : -(step + 1) / 2;
        const int a = opt.a + s, b = opt.b + s;
        if (base.empty() || base.back().k + b > last_complete || base.front().k + a < 0) continue;
        SandwichReport rep;
        rep.a = a;
        rep.b = b;
        rep.offset = s;
        rep.c_hat = std::numeric_limits<double>::infinity();
        rep.C_hat = 0.0;
        rep.lower_positive = true;
        for (const auto& bs : base) {
            SandwichRow row{bs.k, bs.r, bs.length, bs.w_k, 0, 0.0, 0.0};
            for (int j = bs.k + a; j <= bs.k + b; ++j) row.w_sum += raw.at(j);
            const double rd = std::pow(bs.r, d - 1);
            if (row.w_k > 0) {
                row.lower_ratio = row.length / (rd * static_cast<double>(row.w_k));
                if (!(row.lower_ratio > 0.0)) rep.lower_positive = false;
                rep.c_hat = std::min(rep.c_hat, row.lower_ratio);
            }
            row.upper_ratio = row.w_sum > 0 ? row.length / (rd * static_cast<double>(row.w_sum))
                                            : std::numeric_limits<double>::infinity();
            rep.C_hat = std::max(rep.C_hat, row.upper_ratio);
            rep.rows.push_back(row);
        }
        rep.spread = rep.c_hat > 0.0 && std::isfinite(rep.c_hat) ? rep.C_hat / rep.c_hat
                                                                  : std::numeric_limits<double>::infinity();
        rep.pass = rep.lower_positive && std::isfinite(rep.C_hat) && rep.c_hat > 0.0 && rep.spread <= opt.bound;
        best.offsets.push_back({{"offset", s}, {"a", a}, {"b", b}, {"spread", rep.spread}});
        // The passing offset nearest the default wins; without one, the smallest spread.
        const bool better = !have || (rep.pass && !best.pass) || (!rep.pass && !best.pass && rep.spread < best.spread);
        if (better) {
            nlohmann::json offsets = std::move(best.offsets);
            best = std::move(rep);
            best.offsets = std::move(offsets);
            have = true;
        }
    }
    if (!have) throw Error(ErrorKind::no_overlap, "boundary scales and complete generations do not overlap");
    return best;
}

// ---------------------------------------------------------------- per cube

PerCubeReport per_cube_boundary_checks(const WhitneyDecomposition& w, const BoundaryCurve& curve, double upper_bound) {
    if (w.dim != 2) throw Error(ErrorKind::invalid_params, "per-cube checks need d = 2");
    PerCubeReport rep;
    rep.r = curve.r;
    rep.upper_bound = upper_bound;
    rep.generation = static_cast<int>(std::floor(-std::log2(curve.r)));
    if (std::ldexp(1.0, -rep.generation) < curve.r) --rep.generation;

    std::vector<Vec> centers;
    centers.reserve(w.cubes.size());
    for (const auto& c : w.cubes) centers.push_back(c.cube.center());
    CandidateFilter filter(*w.source);
    const std::vector<double> cdist = batch_distances(filter, centers);

    std::vector<std::size_t> matched, crossed;
    for (std::size_t i = 0; i < w.cubes.size(); ++i) {
        const double rb = cdist[i] / 8.0;
        int kb = static_cast<int>(std::floor(-std::log2(rb)));
        if (std::ldexp(1.0, -kb) < rb) --kb;
        if (kb == rep.generation) matched.push_back(i);
        const double dq = w.cubes[i].dist_to_set;
        if (dq <= curve.r && curve.r <= dq + w.cubes[i].cube.diam()) crossed.push_back(i);
    }
    rep.matched = matched.size();
    rep.crossed = crossed.size();

    std::vector<double> lower(matched.size()), upper(crossed.size());
    parallel_for(matched.size(), [&](std::size_t s) {
        const std::size_t i = matched[s];
        lower[s] = curve.length_in_disc(Ball{centers[i], cdist[i]}) / curve.r;
    });
    parallel_for(crossed.size(), [&](std::size_t s) {
        const auto& q = w.cubes[crossed[s]].cube;
        upper[s] = curve.length_in_box(q.dbox()) / q.side();
    });
    auto vec_json = [](const Vec& v) { return nlohmann::json::array({v[0], v[1]}); };
    rep.c_hat = matched.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < lower.size(); ++s)
        if (lower[s] < rep.c_hat) {
            rep.c_hat = lower[s];
            rep.witnesses["lower"] = {{"center", vec_json(centers[matched[s]])}, {"level", w.cubes[matched[s]].cube.level}};
        }
    for (std::size_t s = 0; s < upper.size(); ++s)
        if (upper[s] > rep.C_hat) {
            rep.C_hat = upper[s];
            rep.witnesses["upper"] = {{"center", vec_json(centers[crossed[s]])}, {"level", w.cubes[crossed[s]].cube.level}};
        }
    rep.lower_pass = !matched.empty() && rep.c_hat > 0.0;
    rep.upper_pass = rep.C_hat <= upper_bound;
    return rep;
}

// ---------------------------------------------------------------- Oleksiv-Pesin

OleksivPesinReport oleksiv_pesin_check(BoundaryMeter& meter, const std::vector<double>& schedule, double c1_bound) {
    OleksivPesinReport rep;
    rep.diam = meter.set().diameter();
    rep.c1_bound = c1_bound;
    std::vector<double> outer_r, inner_r;
    if (rep.diam > 0.0) {
        for (int i = 1; i <= 3; ++i) outer_r.push_back(std::ldexp(rep.diam, i));
        for (double r : schedule)
            if (r <= rep.diam) inner_r.push_back(r);
    } else {
        outer_r = schedule;
    }
    std::sort(outer_r.begin(), outer_r.end(), std::greater<>());
    std::sort(inner_r.begin(), inner_r.end(), std::greater<>());
    for (double r : outer_r) {
        ProfileRow row{r, meter.length(r), std::numeric_limits<double>::quiet_NaN()};
        rep.C1 = std::max(rep.C1, row.length / r);
        rep.outer.push_back(row);
    }
    for (double r : inner_r) {
        ProfileRow row{r, meter.length(r), std::numeric_limits<double>::quiet_NaN()};
        rep.C2 = std::max(rep.C2, r * row.length);
        rep.inner.push_back(row);
    }
    rep.pass = !rep.outer.empty() && rep.C1 <= c1_bound && std::isfinite(rep.C2);
    return rep;
}

// ---------------------------------------------------------------- regular law

RegularLawReport regular_law_check(BoundaryMeter& meter, double s, const std::vector<double>& schedule, double bound) {
    RegularLawReport rep;
    rep.s = s;
    rep.bound = bound;
    rep.band_lo = std::numeric_limits<double>::infinity();
    const int d = meter.set().dim();
    std::vector<double> rs = schedule;
    std::sort(rs.begin(), rs.end(), std::greater<>());
    for (double r : rs) {
        ProfileRow row{r, meter.length(r), std::numeric_limits<double>::quiet_NaN()};
        const double v = row.length * std::pow(r, s + 1.0 - d);
        rep.band_lo = std::min(rep.band_lo, v);
        rep.band_hi = std::max(rep.band_hi, v);
        rep.rows.push_back(row);
    }
    if (rep.rows.size() < 2) throw Error(ErrorKind::insufficient_data, "regular law check needs at least 2 scales");
    rep.r_hi = rs.front();
    rep.r_lo = rs.back();
    rep.ratio = rep.band_lo > 0.0 ? rep.band_hi / rep.band_lo : std::numeric_limits<double>::infinity();
    rep.pass = rep.ratio <= bound;
    return rep;
}

// ---------------------------------------------------------------- local profile

LocalProfile local_boundary_profile(BoundaryMeter& meter, const Ball& b0, const std::vector<double>& schedule) {
    if (dist_point_to_set(b0.center, meter.set()) != 0.0)
        throw Error(ErrorKind::center_not_in_set, "local profile ball must be centered on E");
    LocalProfile out;
    out.b0 = b0;
    std::vector<double> xs, ys;
    std::vector<double> rs = schedule;
    std::sort(rs.begin(), rs.end(), std::greater<>());
    const int d = meter.set().dim();
    for (double r : rs) {
        if (!(r < b0.radius)) continue;
        BoundaryCurve c = meter.curve(r);
        const double len = c.length_in_disc(b0);
        out.rows.emplace_back(r, len);
        if (len > 0.0) {
            xs.push_back(std::log2(r / b0.radius));
            ys.push_back(std::log2(len / std::pow(r, d - 1)));
        }
    }
    if (xs.size() < 3) throw Error(ErrorKind::insufficient_data, "fewer than 3 clipped lengths for the local fit");
    LineFit lf = least_squares(xs, ys);
    out.lambda = {-lf.slope, Variant::slope, "local-boundary", out.rows.back().first, out.rows.front().first,
                  lf.residual, lf.samples, {{"radius", b0.radius}, {"center", {b0.center[0], b0.center[1]}}}};
    return out;
}

// ---------------------------------------------------------------- thick Cantor

ThickCantorCheck thick_cantor_check(const ThickCantorInstance& inst, const BoxSet& normalized) {
    ThickCantorCheck out;
    out.exact_pass = true;
    const ThickCantorStage* last_even = nullptr;
    const ThickCantorStage* last_odd = nullptr;
    for (const auto& st : inst.stages) {
        if (st.j == 0) continue;
        nlohmann::json m{{"j", st.j},
                         {"lambda", st.lambda.to_string()},
                         {"side", st.side.to_string()},
                         {"count", st.count}};
        if (st.j % 2 == 1) {
            m["area_verified"] = st.area_verified;
            if (!st.area_verified) out.exact_pass = false;
            last_odd = &st;
        } else {
            m["gap"] = st.gap ? st.gap->to_string() : "";
            m["gap_verified"] = st.gap_verified;
            m["seam_contacts"] = st.contacts;
            if (st.probe) m["probe"] = *st.probe;
            if (!st.gap_verified) out.exact_pass = false;
            last_even = &st;
        }
        out.stages.push_back(m);
    }

    if (last_even && last_even->probe) {
        // Normalization halves every length.
        const double mass = 0.5 * static_cast<double>(last_even->count) * last_even->side.to_double();
        out.ratio_pass = true;
        for (double f : {1.0, 0.5}) {
            ThickCantorCheck::Probe p;
            p.r = 0.5 * *last_even->probe * f;
            p.grid_level = static_cast<int>(std::ceil(std::log2(8.0 / p.r)));
            p.length = extract_boundary_sparse(normalized, p.grid_level, p.r).total_length;
            p.ratio = p.length / mass;
            if (!(p.ratio >= 0.1 && p.ratio <= 10.0)) out.ratio_pass = false;
            out.probes.push_back(p);
        }
    }

    if (last_odd) {
        // From the previous stage's side down one level past the odd stage's
        // side, in normalized levels; the frame-relative partition starts at 2.
        const ThickCantorStage& prev = inst.stages[static_cast<std::size_t>(last_odd->j - 1)];
        const int k_a = 1 + std::max(1, static_cast<int>(std::lround(std::log2(1.0 / prev.side.to_double()))));
        const int k_b = 2 + static_cast<int>(std::lround(std::log2(1.0 / last_odd->side.to_double())));
        out.odd_counts = box_counts(normalized, k_a, k_b, CellRule::partition);
        std::vector<double> xs, ys;
        for (const auto& [k, n] : out.odd_counts.counts)
            if (n > 0) {
                xs.push_back(k);
                ys.push_back(std::log2(static_cast<double>(n)));
            }
        if (xs.size() >= 2) out.odd_exponent = least_squares(xs, ys).slope;
        out.exponent_pass = out.odd_exponent >= 1.8;
    }
    out.pass = out.exact_pass && out.ratio_pass && out.exponent_pass;
    return out;
}

}  // namespace whitneydim
