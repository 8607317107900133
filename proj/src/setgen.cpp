#include "whitneydim/setgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "whitneydim/boxset_io.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"

namespace whitneydim {

namespace {

bool box_less(const RationalBox& a, const RationalBox& b, int dim) {
    for (int i = 0; i < dim; ++i)
        if (a.lo[i] != b.lo[i]) return a.lo[i] < b.lo[i];
    for (int i = 0; i < dim; ++i)
        if (a.side[i] != b.side[i]) return a.side[i] < b.side[i];
    return false;
}

void canonical_sort(std::vector<RationalBox>& boxes, int dim) {
    std::sort(boxes.begin(), boxes.end(), [dim](const auto& a, const auto& b) { return box_less(a, b, dim); });
}

RationalBox apply(const SimilarityMap& f, const RationalBox& b, int dim) {
    RationalBox out;
    for (int a = 0; a < dim; ++a) {
        const int src = f.perm[a];
        Rational lo = f.ratio * b.lo[src];
        Rational len = f.ratio * b.side[src];
        out.side[a] = len;
        out.lo[a] = f.flip[a] > 0 ? f.translation[a] + lo : f.translation[a] - lo - len;
    }
    return out;
}

SimilarityMap scaled(Rational ratio, std::initializer_list<Rational> t) {
    SimilarityMap f;
    f.ratio = ratio;
    int a = 0;
    for (const auto& v : t) f.translation[a++] = v;
    return f;
}

IfsSpec grid_ifs(std::string name, int dim, int base, const std::vector<std::array<int, 2>>& cells) {
    IfsSpec spec;
    spec.name = std::move(name);
    spec.dim = dim;
    const Rational r(1, base);
    for (const auto& c : cells) {
        if (dim == 1) spec.maps.push_back(scaled(r, {Rational(c[0], base)}));
        else spec.maps.push_back(scaled(r, {Rational(c[0], base), Rational(c[1], base)}));
    }
    return spec;
}

}  // namespace

double IfsSpec::similarity_dim() const {
    std::vector<double> ratios;
    for (const auto& f : maps) ratios.push_back(f.ratio.to_double());
    return moran_dimension(ratios);
}

double IfsSpec::max_ratio() const {
    double m = 0.0;
    for (const auto& f : maps) m = std::max(m, f.ratio.to_double());
    return m;
}

double moran_dimension(const std::vector<double>& ratios) {
    if (ratios.empty()) throw Error(ErrorKind::invalid_params, "IFS has no maps");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::invalid_params, "IFS ratios must lie in (0,1)");
    auto moran = [&](double s) {
        double t = 0.0;
        for (double r : ratios) t += std::pow(r, s);
        return t - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    while (moran(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (moran(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

const std::vector<std::string>& builtin_ifs_names() {
    static const std::vector<std::string> names{"cantor3",  "cantor3x3", "sierpinski-carpet",
                                                "vicsek",   "koch",      "cantor3-line"};
    return names;
}

IfsSpec builtin_ifs(std::string_view name) {
    if (name == "cantor3") return grid_ifs("cantor3", 1, 3, {{0, 0}, {2, 0}});
    if (name == "cantor3x3") return grid_ifs("cantor3x3", 2, 3, {{0, 0}, {2, 0}, {0, 2}, {2, 2}});
    if (name == "sierpinski-carpet" || name == "carpet") {
        std::vector<std::array<int, 2>> cells;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
                if (i != 1 || j != 1) cells.push_back({i, j});
        return grid_ifs("sierpinski-carpet", 2, 3, cells);
    }
    if (name == "vicsek") return grid_ifs("vicsek", 2, 3, {{0, 0}, {2, 0}, {1, 1}, {0, 2}, {2, 2}});
    if (name == "koch") {
        // Quadratic type-1 curve: five thirds of the unit segment with a square bump.
        IfsSpec spec;
        spec.name = "koch";
        spec.dim = 2;
        spec.initiator = Initiator::unit_segment;
        const Rational t(1, 3);
        spec.maps.push_back(scaled(t, {Rational(0), Rational(0)}));
        SimilarityMap up = scaled(t, {Rational(1, 3), Rational(0)});
        up.perm = {1, 0, 2};
        up.flip = {-1, 1, 1};
        spec.maps.push_back(up);
        spec.maps.push_back(scaled(t, {Rational(1, 3), Rational(1, 3)}));
        SimilarityMap down = scaled(t, {Rational(2, 3), Rational(1, 3)});
        down.perm = {1, 0, 2};
        down.flip = {1, -1, 1};
        spec.maps.push_back(down);
        spec.maps.push_back(scaled(t, {Rational(2, 3), Rational(0)}));
        return spec;
    }
    if (name == "cantor3-line") {
        IfsSpec spec = grid_ifs("cantor3-line", 1, 3, {{0, 0}, {2, 0}});
        spec.embed_y = Rational(1, 2);
        return spec;
    }
    throw Error(ErrorKind::config, "unknown IFS '" + std::string(name) + "'");
}

BoxSet ifs_generate(const IfsSpec& spec, int depth) {
    if (depth < 0) throw Error(ErrorKind::invalid_params, "depth must be >= 0");
    if (spec.maps.empty()) throw Error(ErrorKind::invalid_params, "IFS has no maps");
    double total = std::pow(static_cast<double>(spec.maps.size()), depth);
    if (total > static_cast<double>(max_cells()))
        throw Error(ErrorKind::resource, "pre-fractal box count exceeds the cell cap");

    const int dim = spec.dim;
    RationalBox init;
    for (int a = 0; a < dim; ++a) {
        init.lo[a] = Rational(0);
        init.side[a] = Rational(a == 0 || spec.initiator == Initiator::unit_cube ? 1 : 0);
    }
    std::vector<RationalBox> boxes{init};
    for (int level = 0; level < depth; ++level) {
        std::vector<RationalBox> next;
        next.reserve(boxes.size() * spec.maps.size());
        for (const auto& f : spec.maps)
            for (const auto& b : boxes) next.push_back(apply(f, b, dim));
        boxes = std::move(next);
    }

    int out_dim = dim;
    if (spec.embed_y) {
        if (dim != 1) throw Error(ErrorKind::invalid_params, "embedding needs a one-dimensional IFS");
        out_dim = 2;
        for (auto& b : boxes) {
            b.lo[1] = *spec.embed_y;
            b.side[1] = Rational(0);
        }
    }
    canonical_sort(boxes, out_dim);

    const double s = spec.similarity_dim();
    nlohmann::json meta{{"generator", spec.name},
                        {"depth", depth},
                        {"similarity_dim", s},
                        {"resolution", std::pow(spec.max_ratio(), depth)},
                        {"attractor_null", s < static_cast<double>(out_dim)}};
    return BoxSet(out_dim, std::move(boxes), false, std::move(meta));
}

const std::vector<std::string>& builtin_simple_names() {
    static const std::vector<std::string> names{"point", "point1d", "segment", "square", "two-points",
                                                "point-segment"};
    return names;
}

namespace {

RationalBox point2(Rational x, Rational y) {
    RationalBox b;
    b.lo[0] = x;
    b.lo[1] = y;
    return b;
}

RationalBox hsegment(Rational x0, Rational len, Rational y) {
    RationalBox b = point2(x0, y);
    b.side[0] = len;
    return b;
}

std::optional<BoxSet> simple_set(std::string_view name) {
    const Rational h(1, 2);
    nlohmann::json meta{{"generator", std::string(name)}};
    if (name == "point") return BoxSet(2, {point2(h, h)}, false, meta);
    if (name == "point1d") {
        RationalBox b;
        b.lo[0] = h;
        return BoxSet(1, {b}, false, meta);
    }
    if (name == "segment") return BoxSet(2, {hsegment(0, 1, h)}, false, meta);
    if (name == "square") {
        RationalBox b;
        b.side[0] = b.side[1] = Rational(1);
        return BoxSet(2, {b}, false, meta);
    }
    if (name == "two-points") return BoxSet(2, {point2(0, h), point2(1, h)}, false, meta);
    if (name == "point-segment") return BoxSet(2, {point2(h, 0), hsegment(0, 1, 1)}, false, meta);
    return std::nullopt;
}

}  // namespace

BoxSet make_set(std::string_view name, int depth) {
    if (auto s = simple_set(name)) return *s;
    const auto& ifs = builtin_ifs_names();
    if (std::find(ifs.begin(), ifs.end(), name) != ifs.end() || name == "carpet")
        return ifs_generate(builtin_ifs(name), depth);
    if (name == "thick-cantor") return thick_cantor_generate(ThickCantorParams{}).to_boxset();
    std::filesystem::path path{std::string(name)};
    if (!std::filesystem::exists(path))
        throw Error(ErrorKind::config, "unknown set '" + std::string(name) + "' (not a built-in or a file)");
    if (path.extension() == ".pgm") return load_raster(path, 128);
    return read_boxset(path);
}

// ---------------------------------------------------------------- thick Cantor

ThickCantorParams parse_thick_cantor(std::string_view text) {
    ThickCantorParams p;
    bool have_j = false;
    std::stringstream ss{std::string(text)};
    std::string item;
    auto split_list = [](const std::string& v) {
        std::vector<std::string> parts;
        std::stringstream vs(v);
        std::string part;
        while (std::getline(vs, part, ':'))
            if (!part.empty()) parts.push_back(part);
        return parts;
    };
    try {
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::config, "thick-cantor: expected key=value");
            std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "J") {
                p.stages = std::stoi(value);
                have_j = true;
            } else if (key == "n") {
                p.n.clear();
                for (const auto& v : split_list(value)) p.n.push_back(std::stoi(v));
            } else if (key == "s") {
                p.s.clear();
                for (const auto& v : split_list(value)) p.s.push_back(std::stod(v));
            } else {
                throw Error(ErrorKind::config, "thick-cantor: unknown key '" + key + "'");
            }
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::config, "thick-cantor: malformed number in '" + std::string(text) + "'");
    }
    if (!have_j) p.stages = static_cast<int>(p.n.size());
    return p;
}

QSqrt2 thick_cantor_lambda(int j) {
    if (j < 1) throw Error(ErrorKind::invalid_params, "stage index must be >= 1");
    if (j % 2 == 1) return QSqrt2(Rational(1, 2));
    if (j == 2) return QSqrt2(Rational(0), Rational(1, 4));  // 2^{-3/2}
    throw Error(ErrorKind::invalid_params, "stage contraction 2^{-1-1/j} is not exact in Q(sqrt2) for even j > 2");
}

namespace {

struct GapScan {
    QSqrt2 min_gap_sq;              ///< over all pairs
    std::optional<QSqrt2> min_positive_gap_sq;
    std::uint64_t contacts = 0;     ///< pairs at distance 0
};

/// Exact pairwise gaps between equal squares of side `side`. Only pairs whose
/// lower corners differ by less than 2*side per axis can have gap < side, so
/// they are found through a bucket grid of pitch `side`; the minimum positive
/// gap is assumed < side (true for every thick-Cantor stage with D_j < l_j).
GapScan scan_gaps(const std::vector<std::array<QSqrt2, 2>>& corners, const QSqrt2& side) {
    const double pitch = side.to_double();
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::uint32_t>> buckets;
    std::vector<std::array<double, 2>> approx(corners.size());
    for (std::uint32_t i = 0; i < corners.size(); ++i) {
        approx[i] = {corners[i][0].to_double(), corners[i][1].to_double()};
        buckets[{std::llround(std::floor(approx[i][0] / pitch)), std::llround(std::floor(approx[i][1] / pitch))}]
            .push_back(i);
    }
    auto gap1 = [&](const QSqrt2& a, const QSqrt2& b) {
        QSqrt2 d = a - b;
        if (d.sign() < 0) d = -d;
        QSqrt2 g = d - side;
        return g.sign() > 0 ? g : QSqrt2(Rational(0));
    };
    auto approx_gap_sq = [&](std::uint32_t i, std::uint32_t j) {
        double gx = std::max(std::abs(approx[i][0] - approx[j][0]) - pitch, 0.0);
        double gy = std::max(std::abs(approx[i][1] - approx[j][1]) - pitch, 0.0);
        return gx * gx + gy * gy;
    };

    // Doubles locate the minimum; exact arithmetic settles every pair that
    // could tie it.
    double best_pos = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> near;
    for (const auto& [key, ids] : buckets) {
        for (std::int64_t dy = -2; dy <= 2; ++dy)
            for (std::int64_t dx = -2; dx <= 2; ++dx) {
                auto it = buckets.find({key.first + dx, key.second + dy});
                if (it == buckets.end()) continue;
                for (std::uint32_t i : ids)
                    for (std::uint32_t j : it->second) {
                        if (j <= i) continue;
                        double g = approx_gap_sq(i, j);
                        if (g < pitch * pitch * 1.000001) near.push_back({i, j});
                        if (g > 0.0) best_pos = std::min(best_pos, g);
                    }
            }
    }
    GapScan out;
    bool have_min = false;
    for (auto [i, j] : near) {
        double g = approx_gap_sq(i, j);
        bool zero_candidate = g <= pitch * pitch * 1e-9;
        bool min_candidate = g <= best_pos * (1.0 + 1e-9);
        if (!zero_candidate && !min_candidate) continue;
        QSqrt2 gx = gap1(corners[i][0], corners[j][0]);
        QSqrt2 gy = gap1(corners[i][1], corners[j][1]);
        QSqrt2 gsq = gx * gx + gy * gy;
        if (gsq.sign() == 0) {
            ++out.contacts;
        } else if (!out.min_positive_gap_sq || gsq < *out.min_positive_gap_sq) {
            out.min_positive_gap_sq = gsq;
        }
        if (!have_min || gsq < out.min_gap_sq) {
            out.min_gap_sq = gsq;
            have_min = true;
        }
    }
    if (!have_min) out.min_gap_sq = side * side;  // no pair closer than one side
    return out;
}

}  // namespace

ThickCantorInstance thick_cantor_generate(const ThickCantorParams& params) {
    const int J = params.stages;
    if (J < 1) throw Error(ErrorKind::invalid_params, "thick-cantor needs J >= 1");
    if (static_cast<int>(params.n.size()) != J || static_cast<int>(params.s.size()) != J)
        throw Error(ErrorKind::invalid_params, "thick-cantor: n and s need J entries each");
    for (int j = 0; j < J; ++j) {
        if (params.n[j] < 0) throw Error(ErrorKind::invalid_params, "thick-cantor: n_j must be >= 0");
        if (!(params.s[j] > 1.0)) throw Error(ErrorKind::invalid_params, "thick-cantor: every s_j must exceed 1");
        if (j > 0 && params.s[j] > params.s[j - 1])
            throw Error(ErrorKind::invalid_params, "thick-cantor: s must be nonincreasing");
    }
    int total_ops = 0;
    for (int v : params.n) total_ops += v;
    if (std::ldexp(1.0, 2 * total_ops) > static_cast<double>(max_cells()))
        throw Error(ErrorKind::resource, "thick-cantor rectangle count exceeds the cell cap");

    ThickCantorInstance inst;
    inst.params = params;
    ThickCantorStage s0;
    s0.lambda = QSqrt2(Rational(1));
    s0.side = QSqrt2(Rational(1));
    s0.count = 1;
    s0.corners.push_back({QSqrt2(Rational(0)), QSqrt2(Rational(0))});
    inst.stages.push_back(s0);

    for (int j = 1; j <= J; ++j) {
        const ThickCantorStage& prev = inst.stages.back();
        ThickCantorStage st;
        st.j = j;
        st.lambda = thick_cantor_lambda(j);
        auto corners = prev.corners;
        QSqrt2 side = prev.side;
        for (int op = 0; op < params.n[j - 1]; ++op) {
            QSqrt2 child = st.lambda * side;
            QSqrt2 shift = side - child;
            std::vector<std::array<QSqrt2, 2>> next;
            next.reserve(corners.size() * 4);
            for (const auto& c : corners) {
                next.push_back({c[0], c[1]});
                next.push_back({c[0] + shift, c[1]});
                next.push_back({c[0], c[1] + shift});
                next.push_back({c[0] + shift, c[1] + shift});
            }
            corners = std::move(next);
            side = child;
        }
        std::sort(corners.begin(), corners.end(), [](const auto& a, const auto& b) {
            if (a[0] != b[0]) return a[0] < b[0];
            return a[1] < b[1];
        });
        st.corners = std::move(corners);
        st.side = side;
        st.count = st.corners.size();

        // Closed forms: count_j = 4^{n_1+...+n_j}, l_j = prod lambda_i^{n_i}.
        std::uint64_t expect_count = prev.count << (2 * params.n[j - 1]);
        QSqrt2 expect_side = prev.side * pow(st.lambda, params.n[j - 1]);
        if (st.count != expect_count || !(st.side == expect_side))
            throw Error(ErrorKind::invalid_params, "thick-cantor: generated stage disagrees with closed form");

        if (j % 2 == 1) {
            // Corner squares of side l/2 tile their parent: equal total area.
            QSqrt2 area = QSqrt2(Rational(static_cast<std::int64_t>(st.count))) * st.side * st.side;
            QSqrt2 prev_area = QSqrt2(Rational(static_cast<std::int64_t>(prev.count))) * prev.side * prev.side;
            st.area_verified = (area == prev_area);
        } else if (params.n[j - 1] > 0) {
            st.gap = st.side * (QSqrt2(Rational(1)) / st.lambda - QSqrt2(Rational(2)));
            GapScan scan = scan_gaps(st.corners, st.side);
            st.gap_verified = scan.min_positive_gap_sq.has_value() && *scan.min_positive_gap_sq == (*st.gap) * (*st.gap);
            st.min_gap = scan.min_gap_sq.sign() == 0 ? QSqrt2(Rational(0)) : *st.gap;
            st.contacts = scan.contacts;
            double branch_gap = st.gap->to_double() / 3.0;
            double branch_mass = std::pow(static_cast<double>(st.count) * st.side.to_double(),
                                          -1.0 / (params.s[j - 1] - 1.0));
            st.probe = std::min(branch_gap, branch_mass);
            if (scan.min_gap_sq.sign() != 0 && !(scan.min_gap_sq == (*st.gap) * (*st.gap)))
                st.gap_verified = false;
        }
        inst.stages.push_back(std::move(st));
    }
    return inst;
}

BoxSet ThickCantorInstance::to_boxset(int bits) const {
    const ThickCantorStage& last = stages.back();
    Rational side = last.side.is_rational() ? last.side.rational_part()
                                            : Rational::from_double_dyadic(last.side.to_long_double(), bits);
    std::vector<RationalBox> boxes;
    boxes.reserve(last.corners.size());
    for (const auto& c : last.corners) {
        RationalBox b;
        for (int a = 0; a < 2; ++a) {
            b.lo[a] = c[a].is_rational() ? c[a].rational_part()
                                         : Rational::from_double_dyadic(c[a].to_long_double(), bits);
            b.side[a] = side;
        }
        boxes.push_back(b);
    }
    nlohmann::json stages_meta = nlohmann::json::array();
    for (const auto& st : stages) {
        if (st.j == 0) continue;
        nlohmann::json m{{"j", st.j}, {"count", st.count}, {"side", st.side.to_double()}};
        if (st.gap) m["gap"] = st.gap->to_double();
        if (st.probe) m["probe"] = *st.probe;
        stages_meta.push_back(m);
    }
    nlohmann::json meta{{"generator", "thick-cantor"},
                        {"J", params.stages},
                        {"n", params.n},
                        {"s", params.s},
                        {"rounding_bits", bits},
                        {"stages", stages_meta},
                        {"attractor_null", true},
                        {"porous", false}};
    return BoxSet(2, std::move(boxes), false, std::move(meta));
}

// ---------------------------------------------------------------- raster

BoxSet load_raster(const std::filesystem::path& path, int threshold) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::config, "cannot open raster " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2") throw Error(ErrorKind::format, "raster must be a P2 or P5 PGM");
    auto next_int = [&]() {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            in >> std::ws;
        }
        long v = -1;
        if (!(in >> v)) throw Error(ErrorKind::format, "truncated PGM header");
        return v;
    };
    const long width = next_int(), height = next_int(), maxval = next_int();
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw Error(ErrorKind::format, "unsupported PGM geometry or maxval");
    std::vector<int> pixels(static_cast<std::size_t>(width * height));
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> raw(pixels.size());
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
            throw Error(ErrorKind::format, "truncated PGM data");
        std::copy(raw.begin(), raw.end(), pixels.begin());
    } else {
        for (auto& p : pixels) p = static_cast<int>(next_int());
    }
    const std::int64_t n = std::max(width, height);
    std::vector<RationalBox> boxes;
    for (long row = 0; row < height; ++row)
        for (long col = 0; col < width; ++col) {
            if (pixels[static_cast<std::size_t>(row * width + col)] < threshold) continue;
            RationalBox b;
            b.lo[0] = Rational(col, n);
            b.lo[1] = Rational(height - 1 - row, n);
            b.side[0] = b.side[1] = Rational(1, n);
            boxes.push_back(b);
        }
    if (boxes.empty()) throw Error(ErrorKind::empty_set, "no raster cell reaches the threshold");
    canonical_sort(boxes, 2);
    nlohmann::json meta{{"generator", "raster"}, {"source", path.filename().string()}, {"threshold", threshold}};
    return BoxSet(2, std::move(boxes), false, std::move(meta)).normalize();
}

}  // namespace whitneydim
