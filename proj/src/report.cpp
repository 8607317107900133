#include "whitneydim/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "whitneydim/boxset_io.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"
#include "whitneydim/setgen.hpp"

namespace whitneydim {

// ---------------------------------------------------------------- emission

double round9(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

nlohmann::json round_reals(const nlohmann::json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v > 0 ? "inf" : "-inf");
        return round9(v);
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& e : j) out.push_back(round_reals(e));
        return out;
    }
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_reals(it.value());
        return out;
    }
    return j;
}

std::string json_text(const nlohmann::json& record) { return round_reals(record).dump(2) + "\n"; }

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

std::string format_cell(double v, bool integer) {
    char buf[40];
    if (integer && std::isfinite(v)) std::snprintf(buf, sizeof buf, "%.0f", v);
    else if (std::isnan(v)) return "nan";
    else std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void emit_json(const nlohmann::json& record, const std::filesystem::path& path) { write_text(path, json_text(record)); }

std::string csv_text(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) out += (c ? "," : "") + table.header[c];
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const bool integer = c < table.integer_columns.size() && table.integer_columns[c];
            out += (c ? "," : "") + format_cell(row[c], integer);
        }
        out += "\n";
    }
    return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) { write_text(path, csv_text(table)); }

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0') throw Error(ErrorKind::format, "bad CSV number '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size()) throw Error(ErrorKind::format, "CSV row width differs from header");
        t.rows.push_back(std::move(row));
    }
    if (first) throw Error(ErrorKind::format, "empty CSV");
    return t;
}

CsvTable counts_table(const GenerationCounts& counts) {
    CsvTable t{{"k", "count"}, {}, {true, true}};
    for (const auto& [k, n] : counts.counts) t.rows.push_back({static_cast<double>(k), static_cast<double>(n)});
    return t;
}

CsvTable profile_table(const std::vector<ProfileRow>& rows) {
    CsvTable t{{"r", "length", "volume"}, {}, {false, false, false}};
    std::vector<ProfileRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.r > b.r; });
    for (const auto& r : sorted) t.rows.push_back({r.r, r.length, r.volume});
    return t;
}

// ---------------------------------------------------------------- config

namespace {

nlohmann::json window_json(const FitWindow& w) {
    return {{"k_lo", w.k_lo}, {"k_hi", w.k_hi}, {"tail", w.tail}, {"width", w.width}};
}

FitWindow window_from(const nlohmann::json& j, FitWindow w) {
    w.k_lo = j.value("k_lo", w.k_lo);
    w.k_hi = j.value("k_hi", w.k_hi);
    w.tail = j.value("tail", w.tail);
    w.width = j.value("width", w.width);
    return w;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j{{"set", set},
                     {"depth", depth},
                     {"threshold", threshold},
                     {"k_max", k_max},
                     {"grid", grid},
                     {"whitney_window", window_json(whitney_window)},
                     {"box_window", window_json(box_window)},
                     {"box_k_max", box_k_max},
                     {"assouad",
                      {{"coarse_level", assouad.coarse_level},
                       {"max_samples", assouad.max_samples},
                       {"m_lo", assouad.m_lo},
                       {"m_hi", assouad.m_hi},
                       {"g_lo", assouad.g_lo},
                       {"g_min_span", assouad.g_min_span},
                       {"fine_level", assouad.fine_level}}},
                     {"codim", {{"m_lo", codim.m_lo}, {"m_hi", codim.m_hi}, {"g_lo", codim.g_lo}, {"g_hi", codim.g_hi}}},
                     {"sandwich",
                      {{"a", sandwich.a},
                       {"b", sandwich.b},
                       {"search", sandwich.search},
                       {"search_radius", sandwich.search_radius},
                       {"k_lo", sandwich.k_lo},
                       {"k_hi", sandwich.k_hi},
                       {"r_factor", sandwich.r_factor},
                       {"bound", sandwich.bound}}},
                     {"regular_s", regular_s},
                     {"suites", suites},
                     {"seed", seed}};
    if (thick_cantor) j["thick_cantor"] = *thick_cantor;
    if (schedule) j["schedule"] = *schedule;
    if (regular_window) j["regular_window"] = *regular_window;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.set = j.value("set", c.set);
        c.depth = j.value("depth", c.depth);
        c.threshold = j.value("threshold", c.threshold);
        c.k_max = j.value("k_max", c.k_max);
        c.grid = j.value("grid", c.grid);
        if (j.contains("whitney_window")) c.whitney_window = window_from(j["whitney_window"], c.whitney_window);
        if (j.contains("box_window")) c.box_window = window_from(j["box_window"], c.box_window);
        c.box_k_max = j.value("box_k_max", c.box_k_max);
        if (j.contains("assouad")) {
            const auto& a = j["assouad"];
            c.assouad.coarse_level = a.value("coarse_level", c.assouad.coarse_level);
            c.assouad.max_samples = a.value("max_samples", c.assouad.max_samples);
            c.assouad.m_lo = a.value("m_lo", c.assouad.m_lo);
            c.assouad.m_hi = a.value("m_hi", c.assouad.m_hi);
            c.assouad.g_lo = a.value("g_lo", c.assouad.g_lo);
            c.assouad.g_min_span = a.value("g_min_span", c.assouad.g_min_span);
            c.assouad.fine_level = a.value("fine_level", c.assouad.fine_level);
        }
        if (j.contains("codim")) {
            const auto& a = j["codim"];
            c.codim.m_lo = a.value("m_lo", c.codim.m_lo);
            c.codim.m_hi = a.value("m_hi", c.codim.m_hi);
            c.codim.g_lo = a.value("g_lo", c.codim.g_lo);
            c.codim.g_hi = a.value("g_hi", c.codim.g_hi);
        }
        if (j.contains("sandwich")) {
            const auto& a = j["sandwich"];
            c.sandwich.a = a.value("a", c.sandwich.a);
            c.sandwich.b = a.value("b", c.sandwich.b);
            c.sandwich.search = a.value("search", c.sandwich.search);
            c.sandwich.search_radius = a.value("search_radius", c.sandwich.search_radius);
            c.sandwich.k_lo = a.value("k_lo", c.sandwich.k_lo);
            c.sandwich.k_hi = a.value("k_hi", c.sandwich.k_hi);
            c.sandwich.r_factor = a.value("r_factor", c.sandwich.r_factor);
            c.sandwich.bound = a.value("bound", c.sandwich.bound);
        }
        c.regular_s = j.value("regular_s", c.regular_s);
        if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
        if (j.contains("thick_cantor")) c.thick_cantor = j["thick_cantor"].get<std::string>();
        if (j.contains("schedule")) c.schedule = j["schedule"].get<std::string>();
        if (j.contains("regular_window")) c.regular_window = j["regular_window"].get<std::string>();
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, std::string("bad run config: ") + e.what());
    }
    return c;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"dims", "whitney", "boundary", "sandwich", "op",
                                                "regular", "percube", "local", "thick"};
    return names;
}

BoxSet build_set(const RunConfig& config) {
    if (config.thick_cantor) return thick_cantor_generate(parse_thick_cantor(*config.thick_cantor)).to_boxset().normalize();
    std::filesystem::path p{config.set};
    if (p.extension() == ".pgm") return load_raster(p, config.threshold);
    return make_set(config.set, config.depth).normalize();
}

// ---------------------------------------------------------------- run

namespace {

using Clock = std::chrono::steady_clock;

nlohmann::json check(const std::string& name, bool ok, nlohmann::json detail = nlohmann::json::object()) {
    detail["name"] = name;
    detail["pass"] = ok;
    return detail;
}

nlohmann::json vec_json(const Vec& v, int dim) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < dim; ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json fit_json(const CountFit& f) {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& [k, e] : f.exponents) ex.push_back({k, e});
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"residual", f.residual},
            {"k_lo", f.k_lo},
            {"k_hi", f.k_hi},
            {"tail_exponents", ex},
            {"upper", to_json(f.upper)},
            {"lower", to_json(f.lower)},
            {"slope_estimate", to_json(f.slope_estimate)}};
}

nlohmann::json profile_json(const std::vector<ProfileRow>& rows) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : rows) a.push_back({{"r", r.r}, {"length", r.length}, {"volume", r.volume}});
    return a;
}

/// Everything a run may need, built on first use.
class Session {
public:
    Session(const RunConfig& cfg, nlohmann::json& timings) : cfg_(cfg), timings_(timings) {
        timed("set", [&] { set_ = std::make_shared<const BoxSet>(build_set(cfg)); });
        if (cfg.thick_cantor) thick_ = thick_cantor_generate(parse_thick_cantor(*cfg.thick_cantor));
    }

    const RunConfig& cfg() const { return cfg_; }
    std::shared_ptr<const BoxSet> set() const { return set_; }
    const std::optional<ThickCantorInstance>& thick() const { return thick_; }

    template <class F>
    void timed(const std::string& name, F&& f) {
        auto t0 = Clock::now();
        f();
        timings_[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    }

    const WhitneyDecomposition& whitney() {
        if (!whitney_) timed("whitney", [&] { whitney_ = whitney_decompose(set_, cfg_.k_max); });
        return *whitney_;
    }
    const DistanceField& field() {
        if (set_->dim() != 2) {
            if (!field_) timed("field", [&] { field_.emplace(compute_distance_field(set_, cfg_.grid)); });
            return *field_;
        }
        if (!field_ready_) {
            timed("field", [&] { meter().field(); });
            field_ready_ = true;
        }
        return meter().field();
    }
    BoundaryMeter& meter() {
        if (!meter_) meter_.emplace(set_, cfg_.grid);
        return *meter_;
    }
    int box_level() const { return resolution_level(*set_, cfg_.box_k_max); }
    /// Finest level the pre-fractal resolves; the box budget for other sets.
    double min_scale() const { return std::ldexp(1.0, -box_level()); }

    std::vector<double> schedule() const {
        if (cfg_.schedule) return parse_schedule(*cfg_.schedule);
        return default_schedule(*set_, cfg_.grid);
    }

    std::optional<double> assouad_upper;

private:
    const RunConfig& cfg_;
    nlohmann::json& timings_;
    std::shared_ptr<const BoxSet> set_;
    std::optional<ThickCantorInstance> thick_;
    std::optional<WhitneyDecomposition> whitney_;
    bool field_ready_ = false;
    std::optional<DistanceField> field_;  ///< d = 1 only; d = 2 shares the meter's
    std::optional<BoundaryMeter> meter_;
};

nlohmann::json suite_dims(Session& s, std::vector<ProfileRow>& profile_out) {
    const BoxSet& set = *s.set();
    const int d = set.dim();
    const double diam = set.diameter();
    nlohmann::json out;
    nlohmann::json checks = nlohmann::json::array();

    // Box counts up to the resolution level.
    const int k_box = s.box_level();
    GenerationCounts box = box_counts(set, 1, k_box);
    FitWindow bw = s.cfg().box_window;
    bw.k_hi = std::min(bw.k_hi, k_box);
    CountFit box_fit = fit_counts(box, bw, "box");
    out["box"] = fit_json(box_fit);

    // Whitney counts.
    const WhitneyDecomposition& w = s.whitney();
    FitWindow ww = s.cfg().whitney_window;
    ww.k_hi = std::min(ww.k_hi, w.k_max - 1);

    // Porosity, perfectness and codimensions sample the same centers.
    const std::vector<Vec> centers = sample_centers(set, 3, 64);
    const DistanceField& field = s.field();
    const double h = field.spacing();
    std::vector<double> scales;
    for (int m = 3; m <= 8; ++m)
        if (std::ldexp(1.0, -m) >= 16.0 * h) scales.push_back(std::ldexp(1.0, -m));
    std::optional<PorosityEstimate> por;
    if (!scales.empty()) por = porosity_estimate(field, centers, scales);
    if (por)
        out["porosity"] = {{"rho", por->rho},
                           {"sample_centers", por->sample_centers},
                           {"scales", por->scales},
                           {"attained_center", vec_json(por->attained_center, d)},
                           {"attained_r", por->attained_r}};

    MinkowskiWhitney mw = minkowski_dims_whitney(w, ww, por ? std::optional<double>(por->rho) : std::nullopt);
    out["whitney"] = fit_json(mw.fit);
    out["zero_measure"] = mw.zero_measure;

    AssouadOptions ao = s.cfg().assouad;
    ao.fine_level = std::min(ao.fine_level, k_box);
    AssouadResult as = assouad_dims(set, ao);
    s.assouad_upper = as.upper.value;
    out["assouad"] = {{"upper", to_json(as.upper)}, {"lower", to_json(as.lower)}, {"triples", as.triples}};

    std::vector<double> radii;
    for (int m = 2; m <= 6; ++m) {
        const double r = std::ldexp(1.0, -m);
        if (diam == 0.0 || r < diam) radii.push_back(r);
    }
    PerfectnessEstimate pf = uniform_perfectness(set, centers, radii);
    nlohmann::json wit = nlohmann::json::array();
    for (const auto& [x, r] : pf.witnesses) wit.push_back({{"center", vec_json(x, d)}, {"r", r}});
    out["perfectness"] = {{"c_hat", pf.infinite ? nlohmann::json("inf") : nlohmann::json(pf.c_hat)},
                          {"infinite", pf.infinite},
                          {"witnesses", wit}};

    CodimOptions co = s.cfg().codim;
    co.min_r = s.min_scale();
    CodimResult cd = codimension_estimates(field, centers, co);
    out["codim"] = {{"lower", to_json(cd.lower_codim)}, {"upper", to_json(cd.upper_codim)}, {"pairs", cd.pairs}};

    // Spherical dimensions.
    std::vector<ProfileRow> profile;
    if (d == 2) {
        profile = boundary_length_profile(s.meter(), s.schedule());
        profile_out = profile;
    }
    SphericalDims sph = spherical_dims(profile, d, mw.fit, ww.tail);
    nlohmann::json sj{{"lower_whitney", to_json(sph.lower_whitney)}, {"upper_whitney", to_json(sph.upper_whitney)}};
    if (sph.lower_boundary) {
        sj["lower_boundary"] = to_json(*sph.lower_boundary);
        sj["upper_boundary"] = to_json(*sph.upper_boundary);
        sj["discrepancy"] = sph.discrepancy;
    }
    out["spherical"] = sj;

    // Consistency checks.
    const double eps = 1e-12;
    checks.push_back(check("box lower <= upper", box_fit.lower.value <= box_fit.upper.value + eps));
    checks.push_back(check("whitney lower <= upper", mw.lower.value <= mw.upper.value + eps));
    checks.push_back(check("assouad lower <= upper", as.lower.value <= as.upper.value + eps));
    checks.push_back(check("assouad lower - 0.1 <= box lower", as.lower.value - 0.1 <= box_fit.lower.value,
                           {{"assouad_lower", as.lower.value}, {"box_lower", box_fit.lower.value}}));
    checks.push_back(check("box upper <= assouad upper + 0.1", box_fit.upper.value <= as.upper.value + 0.1,
                           {{"assouad_upper", as.upper.value}, {"box_upper", box_fit.upper.value}}));
    checks.push_back(check("whitney lower <= box lower + 0.1", mw.lower.value <= box_fit.lower.value + 0.1,
                           {{"whitney_lower", mw.lower.value}, {"box_lower", box_fit.lower.value}}));
    // A finite stage of a non-porous construction looks porous at fine scales.
    const bool porous = set.meta().value("porous", true) && por && por->rho >= 0.05;
    if (mw.zero_measure && porous) {
        checks.push_back(check("|whitney - box| <= 0.1 (porous, null)",
                               std::abs(mw.upper.value - box_fit.upper.value) <= 0.1 &&
                                   std::abs(mw.lower.value - box_fit.lower.value) <= 0.1,
                               {{"upper_gap", mw.upper.value - box_fit.upper.value},
                                {"lower_gap", mw.lower.value - box_fit.lower.value}}));
    }
    if (porous)
        checks.push_back(check("porous => assouad upper < d", as.upper.value < d, {{"rho", por->rho}}));
    checks.push_back(check("assouad upper + lower codim = d within 0.15",
                           std::abs(as.upper.value + cd.lower_codim.value - d) <= 0.15,
                           {{"sum", as.upper.value + cd.lower_codim.value}}));
    if (pf.infinite)
        checks.push_back(check("not uniformly perfect => assouad lower <= 0.1", as.lower.value <= 0.1));
    else
        checks.push_back(check("uniformly perfect => assouad lower > 0", as.lower.value > 0.0,
                               {{"assouad_lower", as.lower.value}}));
    const DimensionEstimate& sph_lower = sph.lower_boundary ? *sph.lower_boundary : sph.lower_whitney;
    checks.push_back(check("spherical lower <= box lower + 0.1", sph_lower.value <= box_fit.lower.value + 0.1,
                           {{"spherical_lower", sph_lower.value}}));
    bool pass = true;
    for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
    out["checks"] = checks;
    out["pass"] = pass;
    return out;
}

nlohmann::json suite_whitney(Session& s) {
    const WhitneyDecomposition& w = s.whitney();
    SandwichAudit audit = audit_sandwich(w);
    const bool disjoint = cubes_disjoint(w);
    const int gap = neighbor_level_gap(w);
    return {{"cubes", w.cubes.size()},
            {"k_max", w.k_max},
            {"residual_cells", w.residual_cells},
            {"residual_volume", w.residual_volume},
            {"audit", {{"checked", audit.checked}, {"lower_failures", audit.lower_failures},
                       {"upper_failures", audit.upper_failures}}},
            {"disjoint", disjoint},
            {"neighbor_level_gap", gap},
            {"pass", audit.lower_failures == 0 && audit.upper_failures == 0 && disjoint}};
}

nlohmann::json suite_boundary(Session& s, std::vector<ProfileRow>& profile) {
    if (profile.empty()) profile = boundary_length_profile(s.meter(), s.schedule());
    std::vector<double> xs, ys;
    bool monotone = true, finite = true;
    double prev_vol = std::numeric_limits<double>::infinity();
    for (const auto& r : profile) {
        if (!std::isfinite(r.length)) finite = false;
        if (!std::isnan(r.volume)) {
            if (r.volume > prev_vol) monotone = false;
            prev_vol = r.volume;
        }
        if (r.length > 0.0) {
            xs.push_back(std::log2(r.r));
            ys.push_back(std::log2(r.length));
        }
    }
    nlohmann::json out{{"profile", profile_json(profile)}, {"volume_monotone", monotone}, {"finite", finite}};
    if (xs.size() >= 2) {
        LineFit lf = least_squares(xs, ys);
        out["slope"] = lf.slope;
        out["residual"] = lf.residual;
    }
    out["pass"] = monotone && finite;
    return out;
}

nlohmann::json suite_sandwich(Session& s) {
    SandwichReport rep = sandwich_check(s.whitney(), s.meter(), s.cfg().sandwich);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"k", r.k}, {"r", r.r}, {"length", r.length}, {"w_k", r.w_k}, {"w_sum", r.w_sum},
                        {"lower_ratio", r.lower_ratio}, {"upper_ratio", r.upper_ratio}});
    return {{"rows", rows},       {"a", rep.a},           {"b", rep.b},
            {"offset", rep.offset}, {"c_hat", rep.c_hat}, {"C_hat", rep.C_hat},
            {"spread", rep.spread}, {"bound", s.cfg().sandwich.bound},
            {"lower_positive", rep.lower_positive},
            {"offsets", rep.offsets}, {"constants", "fitted regression guards, not universal constants"},
            {"pass", rep.pass}};
}

std::vector<double> op_schedule(const BoxSet& set) {
    const double diam = set.diameter();
    std::vector<double> rs;
    for (int i = 0; i < 64; ++i) rs.push_back(0.5 * std::pow(2.0, -0.5 * i));
    return clip_schedule(rs, std::ldexp(1.0, -9), diam > 0.0 ? diam : 0.25);
}

nlohmann::json suite_op(Session& s) {
    OleksivPesinReport rep = oleksiv_pesin_check(s.meter(), op_schedule(*s.set()));
    return {{"diam", rep.diam},   {"inner", profile_json(rep.inner)}, {"outer", profile_json(rep.outer)},
            {"C1", rep.C1},       {"C2", rep.C2},                     {"c1_bound", rep.c1_bound},
            {"pass", rep.pass}};
}

double regular_dim(const Session& s) {
    if (s.cfg().regular_s >= 0.0) return s.cfg().regular_s;
    const auto& meta = s.set()->meta();
    if (meta.contains("similarity_dim")) return meta["similarity_dim"].get<double>();
    const std::string gen = meta.value("generator", "");
    if (gen == "point" || gen == "point1d" || gen == "two-points") return 0.0;
    if (gen == "segment") return 1.0;
    if (gen == "square") return 2.0;
    throw Error(ErrorKind::config, "regular law check needs --regular-s for this set");
}

nlohmann::json suite_regular(Session& s) {
    const double sdim = regular_dim(s);
    std::vector<double> rs = s.cfg().regular_window ? parse_schedule(*s.cfg().regular_window)
                                                    : geometric_schedule(std::ldexp(1.0, -4), std::sqrt(0.5), 11);
    RegularLawReport rep = regular_law_check(s.meter(), sdim, rs);
    return {{"s", rep.s},         {"r_lo", rep.r_lo},       {"r_hi", rep.r_hi},
            {"band_lo", rep.band_lo}, {"band_hi", rep.band_hi}, {"ratio", rep.ratio},
            {"bound", rep.bound}, {"rows", profile_json(rep.rows)}, {"pass", rep.pass}};
}

nlohmann::json suite_percube(Session& s) {
    const int k = std::min(6, s.cfg().k_max - 2);
    const double r = 0.75 * std::ldexp(1.0, -k);
    BoundaryCurve curve = s.meter().curve(r);
    PerCubeReport rep = per_cube_boundary_checks(s.whitney(), curve);
    return {{"r", rep.r},
            {"generation", rep.generation},
            {"matched", rep.matched},
            {"crossed", rep.crossed},
            {"c_hat", rep.c_hat},
            {"C_hat", rep.C_hat},
            {"upper_bound", rep.upper_bound},
            {"lower_pass", rep.lower_pass},
            {"upper_pass", rep.upper_pass},
            {"witnesses", rep.witnesses},
            {"pass", rep.lower_pass && rep.upper_pass}};
}

nlohmann::json suite_local(Session& s) {
    const BoxSet& set = *s.set();
    const std::vector<Vec> centers = sample_centers(set, 3, 64);
    const Vec x = centers[centers.size() / 2];
    // The center must be an exact point of E for the ball to qualify.
    const Ball b0{x, 0.125};
    const double h = std::ldexp(1.0, -s.cfg().grid);
    std::vector<double> rs = clip_schedule(geometric_schedule(b0.radius / 4.0, std::sqrt(0.5), 12), 8.0 * h, 1.0);
    LocalProfile lp = local_boundary_profile(s.meter(), b0, rs);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [r, len] : lp.rows) rows.push_back({{"r", r}, {"length", len}});
    nlohmann::json out{{"center", vec_json(x, set.dim())}, {"radius", b0.radius}, {"rows", rows},
                       {"lambda", to_json(lp.lambda)}};
    if (s.assouad_upper) out["assouad_upper"] = *s.assouad_upper;
    out["pass"] = std::isfinite(lp.lambda.value);
    return out;
}

nlohmann::json suite_thick(Session& s) {
    if (!s.thick()) throw Error(ErrorKind::config, "thick suite needs --thick-cantor");
    ThickCantorCheck c = thick_cantor_check(*s.thick(), *s.set());
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : c.probes)
        probes.push_back({{"r", p.r}, {"grid_level", p.grid_level}, {"length", p.length}, {"ratio", p.ratio}});
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [k, n] : c.odd_counts.counts) counts.push_back({k, n});
    return {{"stages", c.stages},         {"exact_pass", c.exact_pass},   {"probes", probes},
            {"ratio_pass", c.ratio_pass}, {"odd_counts", counts},         {"odd_exponent", c.odd_exponent},
            {"exponent_pass", c.exponent_pass}, {"pass", c.pass}};
}

}  // namespace

VerificationReport run(const RunConfig& config) {
    for (const auto& name : config.suites)
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
            throw Error(ErrorKind::config, "unknown suite '" + name + "'");
    if (config.k_max < 3) throw Error(ErrorKind::config, "k_max must be >= 3");
    if (config.grid < 4) throw Error(ErrorKind::config, "grid level must be >= 4");
    if (config.out_dir && !std::filesystem::is_directory(*config.out_dir))
        throw Error(ErrorKind::config, "output directory does not exist: " + config.out_dir->string());
    const unsigned saved_threads = thread_count();
    set_thread_count(config.threads);

    VerificationReport rep;
    rep.timings = nlohmann::json::object();
    Session s(config, rep.timings);
    if (s.set()->dim() != 2)
        for (const char* n : {"boundary", "sandwich", "op", "regular", "percube", "local"})
            if (std::find(config.suites.begin(), config.suites.end(), n) != config.suites.end())
                throw Error(ErrorKind::config, std::string("suite '") + n + "' needs a planar set");
    nlohmann::json suites = nlohmann::json::object();
    std::vector<ProfileRow> profile;
    bool pass = true;
    auto wants = [&](const char* n) { return std::find(config.suites.begin(), config.suites.end(), n) != config.suites.end(); };
    // Fixed order so that shared state (profile, Assouad) is built identically.
    auto runs = [&](const char* name, auto&& fn) {
        if (!wants(name)) return;
        s.timed(std::string("suite:") + name, [&] { suites[name] = fn(); });
        pass = pass && suites[name]["pass"].get<bool>();
    };
    runs("dims", [&] { return suite_dims(s, profile); });
    runs("whitney", [&] { return suite_whitney(s); });
    runs("boundary", [&] { return suite_boundary(s, profile); });
    runs("sandwich", [&] { return suite_sandwich(s); });
    runs("op", [&] { return suite_op(s); });
    runs("regular", [&] { return suite_regular(s); });
    runs("percube", [&] { return suite_percube(s); });
    runs("local", [&] { return suite_local(s); });
    runs("thick", [&] { return suite_thick(s); });

    rep.pass = pass;
    rep.body = {{"version", kVersion},
                {"config", config.to_json()},
                {"set", {{"dim", s.set()->dim()}, {"boxes", s.set()->size()}, {"diameter", s.set()->diameter()},
                         {"meta", s.set()->meta()}}},
                {"suites", suites},
                {"pass", pass}};
    set_thread_count(saved_threads);

    if (config.out_dir) {
        const auto& dir = *config.out_dir;
        emit_json(rep.body, dir / "report.json");
        emit_json(rep.timings, dir / "timings.json");
        if (wants("dims") || wants("whitney") || wants("sandwich") || wants("percube"))
            emit_csv(counts_table(generation_counts(s.whitney())), dir / "counts.csv");
        if (wants("dims")) emit_csv(counts_table(box_counts(*s.set(), 1, s.box_level())), dir / "box_counts.csv");
        if (!profile.empty()) emit_csv(profile_table(profile), dir / "profile.csv");
    }
    return rep;
}

}  // namespace whitneydim
