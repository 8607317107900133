// Acceptance gate: runs the reference configurations twice (1 and 2 threads)
// and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "whitneydim/report.hpp"

using namespace whitneydim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Case {
    std::string name;
    RunConfig config;
};

struct Outcome {
    json body;
    json timings;
    double seconds = 0.0;
    std::string report_bytes;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig make(const std::string& set, int depth, int k_max, std::vector<std::string> suites) {
    RunConfig c;
    c.set = set;
    c.depth = depth;
    c.k_max = k_max;
    c.grid = 11;
    c.suites = std::move(suites);
    return c;
}

std::vector<Case> cases() {
    std::vector<Case> out;
    out.push_back({"point", make("point", 0, 12, {"dims", "boundary", "sandwich", "op"})});

    RunConfig seg = make("segment", 0, 16, {"dims", "boundary", "sandwich", "op", "regular"});
    seg.schedule = "geo:0.015625,0.70710678,13";
    out.push_back({"segment", seg});

    out.push_back({"cantor3-d8", make("cantor3", 8, 14, {"dims"})});
    out.push_back({"cantor3-d10", make("cantor3", 10, 17, {"dims"})});
    out.push_back({"cantor3x3", make("cantor3x3", 6, 15, {"dims", "sandwich", "op"})});

    RunConfig carpet = make("sierpinski-carpet", 6, 15, {"dims", "regular", "sandwich", "op"});
    carpet.schedule = "geo:0.00390625,0.70710678,9";
    out.push_back({"carpet", carpet});

    RunConfig thick = make("thick-cantor", 0, 16, {"dims", "thick", "op"});
    thick.thick_cantor = "J=2,n=2:6,s=2:1.5";
    out.push_back({"thick", thick});
    return out;
}

Outcome execute(const Case& c, unsigned threads, const fs::path& root) {
    RunConfig cfg = c.config;
    cfg.threads = threads;
    cfg.out_dir = root / c.name / ("t" + std::to_string(threads));
    fs::create_directories(*cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep = run(cfg);
    Outcome o;
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.body = rep.body;
    o.timings = rep.timings;
    o.report_bytes = slurp(*cfg.out_dir / "report.json");
    return o;
}

double v(const json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

class Gate {
public:
    void line(int id, bool pass, const std::string& detail) {
        std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        all_ = all_ && pass;
    }
    bool all() const { return all_; }

private:
    bool all_ = true;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "whitneydim_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    const auto all_cases = cases();
    std::map<std::string, Outcome> first, second;
    for (const auto& c : all_cases) {
        first[c.name] = execute(c, 1, root);
        std::printf("  ran %-12s threads=1 %.1f s\n", c.name.c_str(), first[c.name].seconds);
        std::fflush(stdout);
    }
    for (const auto& c : all_cases) {
        second[c.name] = execute(c, 2, root);
        std::printf("  ran %-12s threads=2 %.1f s\n", c.name.c_str(), second[c.name].seconds);
        std::fflush(stdout);
    }

    auto S = [&](const std::string& n) -> const json& { return first.at(n).body["suites"]; };
    auto dims = [&](const std::string& n) -> const json& { return S(n)["dims"]; };
    const double pi = std::numbers::pi;
    Gate gate;

    // 1. point
    {
        const json& d = dims("point");
        double worst = 0.0;
        for (const char* m : {"box", "whitney", "assouad"})
            for (const char* var : {"upper", "lower"}) worst = std::max(worst, std::abs(v(d[m][var]["value"])));
        for (const char* k : {"lower_boundary", "upper_boundary", "lower_whitney", "upper_whitney"})
            worst = std::max(worst, std::abs(v(d["spherical"][k]["value"])));
        double len = std::nan("");
        for (const auto& row : S("point")["boundary"]["profile"])
            if (within(v(row["r"]), 0.125, 1e-12)) len = v(row["length"]);
        const double rel = std::abs(len - 2 * pi * 0.125) / (2 * pi * 0.125);
        const double t = first.at("point").seconds;
        gate.line(1, worst <= 0.05 && rel <= 0.015 && t < 30,
                  "point: max|dim| " + fmt("%.4f", worst) + ", L(1/8) rel err " + fmt("%.5f", rel) + ", " +
                      fmt("%.1f s", t));
    }

    // 2. segment
    {
        const json& d = dims("segment");
        double worst = 0.0;
        for (const char* m : {"box", "whitney", "assouad"})
            for (const char* var : {"upper", "lower"}) worst = std::max(worst, std::abs(v(d[m][var]["value"]) - 1));
        for (const char* k : {"lower_boundary", "upper_boundary", "lower_whitney", "upper_whitney"})
            worst = std::max(worst, std::abs(v(d["spherical"][k]["value"]) - 1));
        double rel = 0.0;
        for (const auto& row : S("segment")["boundary"]["profile"]) {
            const double r = v(row["r"]);
            const double want = 2 * 0.5 + 2 * pi * r;  // normalized length 1/2
            rel = std::max(rel, std::abs(v(row["length"]) - want) / want);
        }
        const double slope = v(S("segment")["boundary"]["slope"]);
        const double t = first.at("segment").seconds;
        gate.line(2, worst <= 0.05 && rel <= 0.015 && std::abs(slope) <= 0.05 && t < 60,
                  "segment: max|dim-1| " + fmt("%.4f", worst) + ", stadium rel err " + fmt("%.5f", rel) +
                      ", boundary slope " + fmt("%.4f", slope) + ", " + fmt("%.1f s", t));
    }

    // 3. Cantor middle thirds, depth 8, k_max 14
    {
        const json& d = dims("cantor3-d8");
        const double s = std::log(2.0) / std::log(3.0);
        const double wu = v(d["whitney"]["upper"]["value"]), wl = v(d["whitney"]["lower"]["value"]);
        const double au = v(d["assouad"]["upper"]["value"]), al = v(d["assouad"]["lower"]["value"]);
        const double t = first.at("cantor3-d8").seconds;
        gate.line(3, within(wu, s, 0.05) && within(wl, s, 0.05) && within(au, s, 0.1) && within(al, s, 0.1) && t < 60,
                  "cantor3: whitney " + fmt("%.4f", wu) + "/" + fmt("%.4f", wl) + ", assouad " + fmt("%.4f", au) +
                      "/" + fmt("%.4f", al) + " (target 0.63093), " + fmt("%.1f s", t));
    }

    // 4. carpet
    {
        const json& d = dims("carpet");
        const double s = std::log(8.0) / std::log(3.0);
        double worst = 0.0;
        for (const char* m : {"box", "whitney", "assouad"})
            for (const char* var : {"upper", "lower"}) worst = std::max(worst, std::abs(v(d[m][var]["value"]) - s));
        for (const char* k : {"lower_boundary", "upper_boundary", "lower_whitney", "upper_whitney"})
            worst = std::max(worst, std::abs(v(d["spherical"][k]["value"]) - s));
        const json& reg = S("carpet")["regular"];
        const double ratio = v(reg["ratio"]);
        const bool range = within(v(reg["r_lo"]), std::ldexp(1.0, -9), 1e-9) && within(v(reg["r_hi"]), 0.0625, 1e-9);
        const double t = first.at("carpet").seconds;
        gate.line(4, worst <= 0.1 && ratio <= 10 && range && t < 300,
                  "carpet: max|dim-1.89279| " + fmt("%.4f", worst) + ", regular band ratio " + fmt("%.3f", ratio) +
                      ", " + fmt("%.1f s", t));
    }

    // 5. sandwich
    {
        bool ok = true;
        double secs = 0.0;
        std::string detail;
        for (const char* n : {"point", "segment", "cantor3x3", "carpet"}) {
            const json& sw = S(n)["sandwich"];
            bool pos = true;
            for (const auto& row : sw["rows"])
                if (v(row["w_k"]) > 0 && !(v(row["lower_ratio"]) > 0)) pos = false;
            ok = ok && pos && v(sw["spread"]) <= 50 && sw["pass"].get<bool>();
            secs += v(first.at(n).timings["suite:sandwich"]);
            detail += std::string(n) + " spread " + fmt("%.2f", v(sw["spread"])) + " offset " +
                      std::to_string(sw["offset"].get<int>()) + "; ";
        }
        gate.line(5, ok && secs < 300, detail + fmt("%.1f s", secs));
    }

    // 6. Whitney-count vs box-count dimensions
    {
        bool ok = true;
        std::string detail;
        for (const char* n : {"point", "segment", "cantor3-d10", "cantor3x3", "carpet"}) {
            const json& d = dims(n);
            const double gu = std::abs(v(d["whitney"]["upper"]["value"]) - v(d["box"]["upper"]["value"]));
            const double gl = std::abs(v(d["whitney"]["lower"]["value"]) - v(d["box"]["lower"]["value"]));
            ok = ok && gu <= 0.1 && gl <= 0.1;
            detail += std::string(n) + " " + fmt("%.3f", std::max(gu, gl)) + "; ";
        }
        double margin = -1e9;
        for (const auto& c : all_cases) {
            const json& d = dims(c.name);
            margin = std::max(margin, v(d["whitney"]["lower"]["value"]) - v(d["box"]["lower"]["value"]));
        }
        ok = ok && margin <= 0.1;
        gate.line(6, ok, "max |W-B|: " + detail + "max (W lower - B lower) " + fmt("%.3f", margin));
    }

    // 7. thick Cantor
    {
        const json& th = S("thick")["thick"];
        bool ratios = !th["probes"].empty();
        std::string detail;
        for (const auto& p : th["probes"]) {
            const double r = v(p["ratio"]);
            ratios = ratios && r >= 0.1 && r <= 10;
            detail += fmt("%.3f ", r);
        }
        const double ex = v(th["odd_exponent"]);
        const double t = first.at("thick").seconds;
        gate.line(7, th["exact_pass"].get<bool>() && ratios && ex >= 1.8 && t < 180,
                  std::string("thick: exact ") + (th["exact_pass"].get<bool>() ? "yes" : "no") + ", probe ratios " +
                      detail + ", odd exponent " + fmt("%.3f", ex) + ", " + fmt("%.1f s", t));
    }

    // 8. Oleksiv-Pesin on every planar set
    {
        bool ok = true;
        std::string detail;
        for (const char* n : {"point", "segment", "cantor3x3", "carpet", "thick"}) {
            const json& op = S(n)["op"];
            const double c1 = v(op["C1"]), c2 = v(op["C2"]);
            ok = ok && op["pass"].get<bool>() && c1 <= 8 && std::isfinite(c2);
            detail += std::string(n) + " C1 " + fmt("%.2f", c1) + " C2 " + fmt("%.3f", c2) + "; ";
        }
        gate.line(8, ok, detail);
    }

    // 9. codimension identity
    {
        bool ok = true;
        std::string detail;
        for (const char* n : {"point", "segment", "carpet"}) {
            const json& d = dims(n);
            const double sum = v(d["assouad"]["upper"]["value"]) + v(d["codim"]["lower"]["value"]);
            ok = ok && within(sum, 2.0, 0.15);
            detail += std::string(n) + " " + fmt("%.3f", sum) + "; ";
        }
        gate.line(9, ok, "assouad upper + lower codim: " + detail);
    }

    // 10. determinism
    {
        bool ok = true;
        std::string bad;
        for (const auto& c : all_cases) {
            const bool same = first.at(c.name).report_bytes == second.at(c.name).report_bytes &&
                              !first.at(c.name).report_bytes.empty();
            if (!same) bad += c.name + " ";
            ok = ok && same;
        }
        gate.line(10, ok, ok ? "report.json identical for threads 1 and 2 on every run" : "differs: " + bad);
    }

    std::printf("acceptance: %s\n", gate.all() ? "ALL PASS" : "SOME CRITERIA FAIL");
    return gate.all() ? 0 : 1;
}
