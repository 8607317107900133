#include "whitneydim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "whitneydim/error.hpp"
#include "whitneydim/kernels/kernels.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::upper: return "upper";
        case Variant::lower: return "lower";
        case Variant::slope: return "slope";
    }
    return "?";
}

nlohmann::json to_json(const DimensionEstimate& e) {
    return {{"method", e.method},         {"variant", to_string(e.variant)}, {"value", e.value},
            {"window", {e.window_lo, e.window_hi}}, {"residual", e.residual},  {"samples", e.samples},
            {"witness", e.witness}};
}

// ---------------------------------------------------------------- box counts

namespace {

struct Run {
    std::int64_t row, lo, hi;
    friend bool operator<(const Run& a, const Run& b) { return a.row != b.row ? a.row < b.row : a.lo < b.lo; }
};

std::uint64_t count_runs(std::vector<Run>& runs) {
    std::sort(runs.begin(), runs.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < runs.size()) {
        std::int64_t row = runs[i].row, lo = runs[i].lo, hi = runs[i].hi;
        ++i;
        while (i < runs.size() && runs[i].row == row && runs[i].lo <= hi + 1) {
            hi = std::max(hi, runs[i].hi);
            ++i;
        }
        total += static_cast<std::uint64_t>(hi - lo + 1);
    }
    return total;
}

/// Index range of level-k cells met by [lo, hi] under the given rule.
std::pair<std::int64_t, std::int64_t> cell_range(const Rational& lo, const Rational& hi, int k, CellRule rule,
                                                 bool normalized) {
    const std::int64_t n = std::int64_t{1} << k;
    std::int64_t a, b;
    std::int64_t first = 0, last = n - 1;
    if (rule == CellRule::closure) {
        a = lo.ceil_scaled(k) - 1;
        b = hi.floor_scaled(k);
    } else {
        a = lo.floor_scaled(k);
        b = hi.floor_scaled(k);
        if (normalized && k >= 2) {
            first = n / 4;
            last = 3 * n / 4 - 1;
        }
    }
    return {std::max(a, first), std::min(b, last)};
}

}  // namespace

GenerationCounts box_counts(const BoxSet& set, int k_lo, int k_hi, CellRule rule) {
    if (k_lo < 0 || k_hi > 40 || k_hi < k_lo) throw Error(ErrorKind::invalid_params, "bad box-count level range");
    GenerationCounts g;
    g.k_lo = k_lo;
    g.k_hi = k_hi;
    const int dim = set.dim();
    if (dim > 2) throw Error(ErrorKind::invalid_params, "box counts support d = 1, 2");
    for (int k = k_lo; k <= k_hi; ++k) {
        std::vector<Run> runs;
        runs.reserve(set.size() * 2);
        for (const auto& b : set.boxes()) {
            auto [x0, x1] = cell_range(b.lo[0], b.hi(0), k, rule, set.normalized());
            if (x1 < x0) continue;
            if (dim == 1) {
                runs.push_back({0, x0, x1});
                continue;
            }
            auto [y0, y1] = cell_range(b.lo[1], b.hi(1), k, rule, set.normalized());
            if (runs.size() + static_cast<std::size_t>(std::max<std::int64_t>(0, y1 - y0 + 1)) > max_cells())
                throw Error(ErrorKind::resource, "box count exceeds the cell cap");
            for (std::int64_t y = y0; y <= y1; ++y) runs.push_back({y, x0, x1});
        }
        g.counts[k] = count_runs(runs);
    }
    return g;
}

// ---------------------------------------------------------------- fitting

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const std::size_t n = x.size();
    f.samples = static_cast<int>(n);
    if (n == 0) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / static_cast<double>(n));
    return f;
}

CountFit fit_counts(const GenerationCounts& counts, const FitWindow& window, const std::string& method,
                    ExponentRule rule) {
    std::vector<double> ks, logs;
    bool any_entry = false;
    const int k_first = window.width > 0 ? std::max(window.k_lo, window.k_hi - window.width + 1) : window.k_lo;
    for (const auto& [k, n] : counts.counts) {
        if (k < k_first || k > window.k_hi || k <= 0) continue;
        any_entry = true;
        if (n == 0) continue;
        ks.push_back(k);
        logs.push_back(std::log2(static_cast<double>(n)));
    }
    CountFit fit;
    auto fill = [&](DimensionEstimate& e, Variant v, double value) {
        e.value = value;
        e.variant = v;
        e.method = method;
        e.window_lo = fit.k_lo;
        e.window_hi = fit.k_hi;
        e.residual = fit.residual;
        e.samples = fit.samples;
    };
    if (ks.empty() && any_entry) {
        fit.k_lo = k_first;
        fit.k_hi = window.k_hi;
        fill(fit.upper, Variant::upper, 0.0);
        fill(fit.lower, Variant::lower, 0.0);
        fill(fit.slope_estimate, Variant::slope, 0.0);
        return fit;
    }
    if (ks.size() < 3) throw Error(ErrorKind::insufficient_data, "fewer than 3 usable counts in the fit window");
    LineFit lf = least_squares(ks, logs);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.residual = lf.residual;
    fit.samples = lf.samples;
    fit.k_lo = static_cast<int>(ks.front());
    fit.k_hi = static_cast<int>(ks.back());

    const std::size_t tail = std::min<std::size_t>(ks.size(), static_cast<std::size_t>(std::max(1, window.tail)));
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    int k_at_hi = 0, k_at_lo = 0;
    const double anchor = rule == ExponentRule::anchored ? fit.intercept : 0.0;
    for (std::size_t i = ks.size() - tail; i < ks.size(); ++i) {
        double e = (logs[i] - anchor) / ks[i];
        fit.exponents.emplace_back(static_cast<int>(ks[i]), e);
        if (e > hi) {
            hi = e;
            k_at_hi = static_cast<int>(ks[i]);
        }
        if (e < lo) {
            lo = e;
            k_at_lo = static_cast<int>(ks[i]);
        }
    }
    fill(fit.upper, Variant::upper, hi);
    fill(fit.lower, Variant::lower, lo);
    fill(fit.slope_estimate, Variant::slope, fit.slope);
    const char* rule_name = rule == ExponentRule::anchored ? "anchored" : "raw";
    fit.upper.witness = {{"k", k_at_hi}, {"rule", rule_name}, {"tail", tail}};
    fit.lower.witness = {{"k", k_at_lo}, {"rule", rule_name}, {"tail", tail}};
    fit.slope_estimate.witness = {{"intercept", fit.intercept}};
    return fit;
}

DimensionEstimate fit_dimension(const GenerationCounts& counts, const FitWindow& window, Variant variant,
                                const std::string& method, ExponentRule rule) {
    CountFit f = fit_counts(counts, window, method, rule);
    switch (variant) {
        case Variant::upper: return f.upper;
        case Variant::lower: return f.lower;
        case Variant::slope: return f.slope_estimate;
    }
    return f.slope_estimate;
}

int resolution_level(const BoxSet& set, int fallback) {
    const auto& meta = set.meta();
    double res = 0.0;
    if (meta.contains("resolution") && meta["resolution"].is_number()) res = meta["resolution"].get<double>();
    if (!(res > 0.0)) return fallback;
    // The pre-fractal's resolution level, in normalized units.
    int k = static_cast<int>(std::floor(std::log2(1.0 / res) + 1e-9)) + (set.normalized() ? 1 : 0);
    return std::min(k, fallback);
}

MinkowskiWhitney minkowski_dims_whitney(const WhitneyDecomposition& w, const FitWindow& window,
                                        std::optional<double> porosity) {
    MinkowskiWhitney out;
    GenerationCounts counts = generation_counts(w);
    FitWindow win = window;
    win.k_hi = std::min(win.k_hi, w.k_max - 1);
    out.fit = fit_counts(counts, win, "whitney");
    out.upper = out.fit.upper;
    out.lower = out.fit.lower;
    out.zero_measure = w.source && w.source->measure_zero();
    out.porosity = porosity;
    for (auto* e : {&out.upper, &out.lower}) {
        e->witness["zero_measure"] = out.zero_measure;
        e->witness["porosity_checked"] = porosity.has_value();
        if (porosity) e->witness["porosity"] = *porosity;
    }
    return out;
}

// ---------------------------------------------------------------- sampling

std::vector<Vec> sample_centers(const BoxSet& set, int level, std::size_t cap) {
    const int dim = set.dim();
    const std::int64_t n = std::int64_t{1} << level;
    const double h = std::ldexp(1.0, -level);
    struct Best {
        std::int64_t key;
        double sq;
        Vec p;
    };
    std::vector<Best> found;
    for (const auto& b : set.dboxes()) {
        std::int64_t lo[2] = {0, 0}, hi[2] = {0, 0};
        for (int a = 0; a < dim; ++a) {
            lo[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(b.lo[a] / h)), 0, n - 1);
            hi[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(b.hi[a] / h)), 0, n - 1);
        }
        for (std::int64_t j = lo[1]; j <= hi[1]; ++j)
            for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
                const std::int64_t idx[2] = {i, j};
                Vec p{};
                double sq = 0.0;
                bool empty = false;
                for (int a = 0; a < dim; ++a) {
                    double clo = std::max(b.lo[a], static_cast<double>(idx[a]) * h);
                    double chi = std::min(b.hi[a], static_cast<double>(idx[a] + 1) * h);
                    if (clo > chi) empty = true;
                    double c = (static_cast<double>(idx[a]) + 0.5) * h;
                    p[a] = std::clamp(c, clo, chi);
                    sq += (p[a] - c) * (p[a] - c);
                }
                if (!empty) found.push_back({j * n + i, sq, p});
            }
    }
    std::sort(found.begin(), found.end(), [dim](const Best& x, const Best& y) {
        if (x.key != y.key) return x.key < y.key;
        if (x.sq != y.sq) return x.sq < y.sq;
        for (int a = 0; a < dim; ++a)
            if (x.p[a] != y.p[a]) return x.p[a] < y.p[a];
        return false;
    });
    std::vector<Vec> centers;
    for (std::size_t i = 0; i < found.size(); ++i)
        if (i == 0 || found[i].key != found[i - 1].key) centers.push_back(found[i].p);
    if (cap > 0 && centers.size() > cap) {
        std::vector<Vec> sub;
        sub.reserve(cap);
        for (std::size_t i = 0; i < cap; ++i) sub.push_back(centers[i * centers.size() / cap]);
        centers = std::move(sub);
    }
    return centers;
}

// ---------------------------------------------------------------- Assouad

std::vector<std::uint64_t> ball_cell_counts(const BoxSet& set, const Vec& x, int m, int g_max) {
    const int dim = set.dim();
    const int level = m + g_max;
    if (level > 30) throw Error(ErrorKind::resource, "ball cell level too fine");
    const double R = std::ldexp(1.0, -m);
    const double h = std::ldexp(1.0, -level);
    const std::int64_t n = std::int64_t{1} << level;
    // Half-open cells of the frame, top faces closed (as for partition counts).
    const bool framed = set.normalized() && level >= 2;
    const std::int64_t first = framed ? n / 4 : 0, last = framed ? 3 * n / 4 - 1 : n - 1;
    std::vector<std::uint64_t> keys;
    for (const auto& b : set.dboxes()) {
        if (!(sq_dist_point_box(x, b, dim) < R * R)) continue;
        std::int64_t lo[2] = {0, 0}, hi[2] = {0, 0};
        for (int a = 0; a < dim; ++a) {
            double blo = std::max(b.lo[a], x[a] - R), bhi = std::min(b.hi[a], x[a] + R);
            lo[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(blo / h)), first, last);
            hi[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(bhi / h)), first, last);
        }
        if (static_cast<double>(hi[0] - lo[0] + 1) * static_cast<double>(hi[1] - lo[1] + 1) + keys.size() >
            static_cast<double>(max_cells()))
            throw Error(ErrorKind::resource, "ball cell count exceeds the cell cap");
        for (std::int64_t j = lo[1]; j <= hi[1]; ++j)
            for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
                const std::int64_t idx[2] = {i, j};
                DBox piece;
                bool empty = false;
                for (int a = 0; a < dim; ++a) {
                    piece.lo[a] = std::max(b.lo[a], static_cast<double>(idx[a]) * h);
                    piece.hi[a] = std::min(b.hi[a], static_cast<double>(idx[a] + 1) * h);
                    if (piece.lo[a] > piece.hi[a]) empty = true;
                }
                if (empty || !(sq_dist_point_box(x, piece, dim) < R * R)) continue;
                keys.push_back((static_cast<std::uint64_t>(j) << 32) | static_cast<std::uint64_t>(i));
            }
    }
    std::vector<std::uint64_t> out(static_cast<std::size_t>(g_max) + 1, 0);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (int g = g_max; g >= 0; --g) {
        out[static_cast<std::size_t>(g)] = keys.size();
        for (auto& k : keys) k = ((k >> 33) << 32) | ((k & 0xffffffffULL) >> 1);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    return out;
}

AssouadResult assouad_dims(const BoxSet& set, const AssouadOptions& opt) {
    const double diam = set.diameter();
    std::vector<Vec> centers = sample_centers(set, opt.coarse_level, opt.max_samples);
    struct Slot {
        bool valid = false;
        double slope = 0.0, residual = 0.0;
        int g_hi = 0;
    };
    const int m_count = opt.m_hi - opt.m_lo + 1;
    if (m_count <= 0) throw Error(ErrorKind::invalid_params, "empty Assouad scale range");
    std::vector<Slot> slots(centers.size() * static_cast<std::size_t>(m_count));
    parallel_for(slots.size(), [&](std::size_t s) {
        const Vec& x = centers[s / static_cast<std::size_t>(m_count)];
        const int m = opt.m_lo + static_cast<int>(s % static_cast<std::size_t>(m_count));
        const double R = std::ldexp(1.0, -m);
        if (diam > 0.0 && !(R < diam)) return;
        const int g_hi = opt.fine_level - m;
        if (g_hi - opt.g_lo + 1 < opt.g_min_span) return;
        auto counts = ball_cell_counts(set, x, m, g_hi);
        std::vector<double> gs, ls;
        for (int g = opt.g_lo; g <= g_hi; ++g) {
            gs.push_back(g);
            ls.push_back(std::log2(static_cast<double>(std::max<std::uint64_t>(1, counts[static_cast<std::size_t>(g)]))));
        }
        LineFit lf = least_squares(gs, ls);
        slots[s] = {true, lf.slope, lf.residual, g_hi};
    });
    AssouadResult res;
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    std::size_t at_hi = 0, at_lo = 0;
    double res_sum = 0.0;
    int gmax = 0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (!slots[s].valid) continue;
        ++res.triples;
        res_sum += slots[s].residual * slots[s].residual;
        gmax = std::max(gmax, slots[s].g_hi);
        if (slots[s].slope > hi) {
            hi = slots[s].slope;
            at_hi = s;
        }
        if (slots[s].slope < lo) {
            lo = slots[s].slope;
            at_lo = s;
        }
    }
    if (res.triples == 0) throw Error(ErrorKind::insufficient_data, "no valid (x, R, r) triples for Assouad estimates");
    auto witness = [&](std::size_t s) {
        const Vec& x = centers[s / static_cast<std::size_t>(m_count)];
        nlohmann::json c = nlohmann::json::array();
        for (int a = 0; a < set.dim(); ++a) c.push_back(x[a]);
        return nlohmann::json{{"center", c}, {"m", opt.m_lo + static_cast<int>(s % static_cast<std::size_t>(m_count))}};
    };
    const double rms = std::sqrt(res_sum / res.triples);
    res.upper = {std::max(0.0, hi), Variant::upper, "assouad-upper", static_cast<double>(opt.g_lo),
                 static_cast<double>(gmax), rms, res.triples, witness(at_hi)};
    res.lower = {std::max(0.0, lo), Variant::lower, "assouad-lower", static_cast<double>(opt.g_lo),
                 static_cast<double>(gmax), rms, res.triples, witness(at_lo)};
    return res;
}

// ---------------------------------------------------------------- porosity

namespace {

/// Node index range [first, last] of the grid whose coordinate lies within r of c.
std::pair<std::int64_t, std::int64_t> node_span(double c, double r, double h, std::int64_t n) {
    std::int64_t a = static_cast<std::int64_t>(std::ceil((c - r) / h));
    std::int64_t b = static_cast<std::int64_t>(std::floor((c + r) / h));
    return {std::max<std::int64_t>(a, 0), std::min<std::int64_t>(b, n - 1)};
}

}  // namespace

PorosityEstimate porosity_estimate(const DistanceField& field, const std::vector<Vec>& centers,
                                   const std::vector<double>& scales) {
    const double h = field.spacing();
    for (double r : scales)
        if (r < 16.0 * h) throw Error(ErrorKind::scale_too_fine, "porosity scale below 16 grid spacings");
    const auto& k = kernels::active();
    const auto n = static_cast<std::int64_t>(field.nodes_per_axis());
    const int dim = field.dim();
    std::vector<double> rho(centers.size() * scales.size(), 0.0);
    parallel_for(rho.size(), [&](std::size_t s) {
        const Vec& x = centers[s / scales.size()];
        const double r = scales[s % scales.size()];
        double best = 0.0;
        auto rows = dim == 2 ? node_span(x[1], r, h, n) : std::pair<std::int64_t, std::int64_t>{0, 0};
        for (std::int64_t j = rows.first; j <= rows.second; ++j) {
            const double dy = dim == 2 ? static_cast<double>(j) * h - x[1] : 0.0;
            const double half = std::sqrt(std::max(0.0, r * r - dy * dy));
            auto cols = node_span(x[0], half, h, n);
            if (cols.second < cols.first) continue;
            auto row = field.row(static_cast<std::size_t>(j));
            std::span<const double> seg(row.data() + cols.first, static_cast<std::size_t>(cols.second - cols.first + 1));
            best = std::max(best, k.clearance_row(seg, static_cast<double>(cols.first) * h, h, x[0], dy * dy, r));
        }
        rho[s] = best / r;
    });
    PorosityEstimate est;
    est.sample_centers = centers.size();
    est.scales = scales;
    est.rho = 0.5;
    for (std::size_t s = 0; s < rho.size(); ++s) {
        if (rho[s] < est.rho || s == 0) {
            est.rho = std::min(rho[s], 0.5);
            est.attained_center = centers[s / scales.size()];
            est.attained_r = scales[s % scales.size()];
        }
    }
    return est;
}

// ---------------------------------------------------------------- perfectness

const std::vector<double>& perfectness_grid() {
    static const std::vector<double> grid{1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0};
    return grid;
}

PerfectnessEstimate uniform_perfectness(const BoxSet& set, const std::vector<Vec>& centers,
                                        const std::vector<double>& radii) {
    const int dim = set.dim();
    auto annulus_meets = [&](const Vec& x, double r, double c) {
        const double inner = r / c;
        for (const auto& b : set.dboxes()) {
            double dmin = std::sqrt(sq_dist_point_box(x, b, dim));
            if (!(dmin < r)) continue;
            double far = 0.0;
            for (int a = 0; a < dim; ++a) {
                double g = std::max(std::abs(x[a] - b.lo[a]), std::abs(x[a] - b.hi[a]));
                far += g * g;
            }
            if (std::sqrt(far) >= inner) return true;
        }
        return false;
    };
    PerfectnessEstimate est;
    for (double c : perfectness_grid()) {
        std::vector<std::pair<Vec, double>> failures;
        for (const auto& x : centers)
            for (double r : radii)
                if (!annulus_meets(x, r, c)) failures.push_back({x, r});
        if (failures.empty()) {
            est.c_hat = c;
            est.infinite = false;
            est.witnesses.clear();
            return est;
        }
        est.witnesses = std::move(failures);
    }
    est.infinite = true;
    est.c_hat = std::numeric_limits<double>::infinity();
    if (est.witnesses.size() > 16) est.witnesses.resize(16);
    return est;
}

// ---------------------------------------------------------------- codimension

CodimResult codimension_estimates(const DistanceField& field, const std::vector<Vec>& centers, const CodimOptions& opt) {
    const double h = field.spacing();
    const auto& k = kernels::active();
    const auto n = static_cast<std::int64_t>(field.nodes_per_axis());
    const int dim = field.dim();
    const int m_count = opt.m_hi - opt.m_lo + 1;
    if (m_count <= 0) throw Error(ErrorKind::invalid_params, "empty codimension scale range");
    struct Slot {
        bool valid = false;
        double t = 0.0, residual = 0.0;
    };
    std::vector<Slot> slots(centers.size() * static_cast<std::size_t>(m_count));
    parallel_for(slots.size(), [&](std::size_t s) {
        const Vec& x = centers[s / static_cast<std::size_t>(m_count)];
        const int m = opt.m_lo + static_cast<int>(s % static_cast<std::size_t>(m_count));
        const double R = std::ldexp(1.0, -m);
        std::vector<double> rs;
        for (int g = opt.g_lo; g <= opt.g_hi; ++g) {
            double r = R * std::ldexp(1.0, -g);
            if (r < 4.0 * h || r < opt.min_r) continue;
            rs.push_back(r);
        }
        if (rs.size() < 3) return;
        std::vector<std::uint64_t> hits(rs.size(), 0);
        std::uint64_t total = 0;
        auto rows = dim == 2 ? node_span(x[1], R, h, n) : std::pair<std::int64_t, std::int64_t>{0, 0};
        for (std::int64_t j = rows.first; j <= rows.second; ++j) {
            const double dy = dim == 2 ? static_cast<double>(j) * h - x[1] : 0.0;
            auto cols = node_span(x[0], R, h, n);
            auto row = field.row(static_cast<std::size_t>(j));
            std::span<const double> seg(row.data() + cols.first, static_cast<std::size_t>(cols.second - cols.first + 1));
            const double x0 = static_cast<double>(cols.first) * h;
            total += k.count_below_in_disc(seg, x0, h, x[0], dy * dy, R * R, std::numeric_limits<double>::infinity());
            for (std::size_t i = 0; i < rs.size(); ++i)
                hits[i] += k.count_below_in_disc(seg, x0, h, x[0], dy * dy, R * R, rs[i]);
        }
        if (total == 0) return;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (hits[i] == 0) continue;
            xs.push_back(std::log2(rs[i] / R));
            ys.push_back(std::log2(static_cast<double>(hits[i]) / static_cast<double>(total)));
        }
        if (xs.size() < 3) return;
        LineFit lf = least_squares(xs, ys);
        slots[s] = {true, lf.slope, lf.residual};
    });
    CodimResult res;
    double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
    std::size_t at_lo = 0, at_hi = 0;
    double ss = 0.0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (!slots[s].valid) continue;
        ++res.pairs;
        ss += slots[s].residual * slots[s].residual;
        if (slots[s].t < lo) {
            lo = slots[s].t;
            at_lo = s;
        }
        if (slots[s].t > hi) {
            hi = slots[s].t;
            at_hi = s;
        }
    }
    if (res.pairs == 0) throw Error(ErrorKind::insufficient_data, "no valid (x, R) pairs for codimension estimates");
    auto witness = [&](std::size_t s) {
        const Vec& x = centers[s / static_cast<std::size_t>(m_count)];
        nlohmann::json c = nlohmann::json::array();
        for (int a = 0; a < dim; ++a) c.push_back(x[a]);
        return nlohmann::json{{"center", c}, {"m", opt.m_lo + static_cast<int>(s % static_cast<std::size_t>(m_count))}};
    };
    const double rms = std::sqrt(ss / res.pairs);
    res.lower_codim = {lo, Variant::lower, "codim", static_cast<double>(opt.g_lo), static_cast<double>(opt.g_hi), rms,
                       res.pairs, witness(at_lo)};
    res.upper_codim = {hi, Variant::upper, "codim", static_cast<double>(opt.g_lo), static_cast<double>(opt.g_hi), rms,
                       res.pairs, witness(at_hi)};
    return res;
}

}  // namespace whitneydim
