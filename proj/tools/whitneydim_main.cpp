// whitneydim command-line driver: gen | whitney | dims | boundary | verify | run
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "whitneydim/boxset_io.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"
#include "whitneydim/report.hpp"
#include "whitneydim/setgen.hpp"
#include "whitneydim/whitney.hpp"

namespace fs = std::filesystem;
using namespace whitneydim;

namespace {

struct Common {
    std::string set = "point";
    int depth = 6;
    std::string thick;
    int threshold = 128;
    int k_max = 12;
    int grid = 11;
};

void add_input(CLI::App* app, Common& c, const char* flag) {
    app->add_option(flag, c.set, "builtin set name, boxset JSON or PGM raster");
    app->add_option("--depth", c.depth, "generator depth for builtin sets");
    app->add_option("--thick-cantor", c.thick, "thick Cantor parameters, e.g. J=2,n=2:6,s=2:1.5");
    app->add_option("--threshold", c.threshold, "raster threshold");
}

RunConfig base_config(const Common& c) {
    RunConfig cfg;
    cfg.set = c.set;
    cfg.depth = c.depth;
    if (!c.thick.empty()) cfg.thick_cantor = c.thick;
    cfg.threshold = c.threshold;
    cfg.k_max = c.k_max;
    cfg.grid = c.grid;
    return cfg;
}

void check_input(const RunConfig& cfg) {
    if (cfg.thick_cantor) return;
    const fs::path p{cfg.set};
    if ((p.extension() == ".json" || p.extension() == ".pgm") && !fs::exists(p))
        throw Error(ErrorKind::config, "input file not found: " + cfg.set);
}

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whitney decompositions, dimension estimates and parallel-set checks"};
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

    // gen
    Common gen_c;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a set and write it as boxset JSON");
    add_input(gen, gen_c, "--set");
    gen->add_option("--out", gen_out, "output boxset JSON")->required();

    // whitney
    Common wh_c;
    std::string wh_counts, wh_dump;
    auto* wh = app.add_subcommand("whitney", "Whitney decomposition and generation counts");
    add_input(wh, wh_c, "--in");
    wh->add_option("--kmax", wh_c.k_max, "finest generation");
    wh->add_option("--counts-out", wh_counts, "k,count CSV ('-' for stdout)");
    wh->add_option("--dump-out", wh_dump, "JSON list of selected cubes");

    // dims
    Common di_c;
    std::string di_method = "all", di_json;
    int di_window = 4, di_width = 5;
    auto* di = app.add_subcommand("dims", "dimension estimates");
    add_input(di, di_c, "--in");
    di->add_option("--kmax", di_c.k_max, "finest Whitney generation");
    di->add_option("--grid", di_c.grid, "distance field level K");
    di->add_option("--method", di_method, "box|whitney|assouad|spherical|codim|all")
        ->check(CLI::IsMember({"box", "whitney", "assouad", "spherical", "codim", "all"}));
    di->add_option("--window", di_window, "tail window (generations) for upper/lower extremes");
    di->add_option("--fit-width", di_width, "levels in the least-squares fit (0 = whole range)");
    di->add_option("--json-out", di_json, "estimate records ('-' for stdout)");

    // boundary
    Common bo_c;
    std::string bo_schedule, bo_profile;
    auto* bo = app.add_subcommand("boundary", "parallel-set boundary length profile");
    add_input(bo, bo_c, "--in");
    bo->add_option("--grid", bo_c.grid, "distance field level K");
    bo->add_option("--r-schedule", bo_schedule, "geo:r0,ratio,n");
    bo->add_option("--profile-out", bo_profile, "r,length,volume CSV ('-' for stdout)");

    // verify
    Common ve_c;
    std::string ve_suite, ve_json, ve_schedule;
    double ve_s = -1.0;
    auto* ve = app.add_subcommand("verify", "run one verification suite");
    add_input(ve, ve_c, "--in");
    ve->add_option("--suite", ve_suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    ve->add_option("--kmax", ve_c.k_max, "finest Whitney generation");
    ve->add_option("--grid", ve_c.grid, "distance field level K");
    ve->add_option("--r-schedule", ve_schedule, "geo:r0,ratio,n");
    ve->add_option("--regular-s", ve_s, "s for the regular law (default: from the set)");
    ve->add_option("--json-out", ve_json, "suite report ('-' for stdout)");

    // run
    Common ru_c;
    std::string ru_config, ru_out, ru_suites, ru_schedule;
    auto* ru = app.add_subcommand("run", "full pipeline with report artifacts");
    add_input(ru, ru_c, "--set");
    ru->add_option("--config", ru_config, "RunConfig JSON (flags are ignored when given)");
    ru->add_option("--kmax", ru_c.k_max, "finest Whitney generation");
    ru->add_option("--grid", ru_c.grid, "distance field level K");
    ru->add_option("--r-schedule", ru_schedule, "geo:r0,ratio,n for the boundary profile");
    ru->add_option("--suites", ru_suites, "comma-separated suites or 'all'");
    ru->add_option("--out-dir", ru_out, "artifact directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        set_thread_count(threads);
        if (*gen) {
            RunConfig cfg = base_config(gen_c);
            check_input(cfg);
            write_boxset(build_set(cfg), gen_out);
            return 0;
        }
        if (*wh) {
            RunConfig cfg = base_config(wh_c);
            check_input(cfg);
            auto set = std::make_shared<const BoxSet>(build_set(cfg));
            WhitneyDecomposition w = whitney_decompose(set, cfg.k_max);
            if (!wh_counts.empty() || wh_dump.empty())
                write_or_print(csv_text(counts_table(generation_counts(w))), wh_counts);
            if (!wh_dump.empty()) {
                nlohmann::json list = nlohmann::json::array();
                for (const auto& c : w.cubes) {
                    nlohmann::json idx = nlohmann::json::array();
                    for (int i = 0; i < w.dim; ++i) idx.push_back(c.cube.index[i]);
                    list.push_back({{"level", c.cube.level}, {"index", idx}, {"dist", c.dist_to_set}});
                }
                write_or_print(json_text(list), wh_dump);
            }
            return 0;
        }
        if (*di) {
            RunConfig cfg = base_config(di_c);
            cfg.whitney_window.tail = cfg.box_window.tail = di_window;
            cfg.whitney_window.width = cfg.box_window.width = di_width;
            check_input(cfg);
            VerificationReport rep = run(cfg);
            const auto& d = rep.body["suites"]["dims"];
            nlohmann::json out = nlohmann::json::array();
            auto want = [&](const char* m) { return di_method == "all" || di_method == m; };
            if (want("box")) {
                out.push_back(d["box"]["upper"]);
                out.push_back(d["box"]["lower"]);
            }
            if (want("whitney")) {
                out.push_back(d["whitney"]["upper"]);
                out.push_back(d["whitney"]["lower"]);
            }
            if (want("assouad")) {
                out.push_back(d["assouad"]["upper"]);
                out.push_back(d["assouad"]["lower"]);
            }
            if (want("spherical")) {
                for (const char* k : {"lower_boundary", "upper_boundary", "lower_whitney", "upper_whitney"})
                    if (d["spherical"].contains(k)) out.push_back(d["spherical"][k]);
            }
            if (want("codim")) {
                out.push_back(d["codim"]["lower"]);
                out.push_back(d["codim"]["upper"]);
            }
            write_or_print(json_text(out), di_json);
            return 0;
        }
        if (*bo) {
            RunConfig cfg = base_config(bo_c);
            check_input(cfg);
            auto set = std::make_shared<const BoxSet>(build_set(cfg));
            BoundaryMeter meter(set, cfg.grid);
            std::vector<double> rs = bo_schedule.empty() ? default_schedule(*set, cfg.grid) : parse_schedule(bo_schedule);
            write_or_print(csv_text(profile_table(boundary_length_profile(meter, rs))), bo_profile);
            return 0;
        }
        if (*ve) {
            RunConfig cfg = base_config(ve_c);
            cfg.suites = {ve_suite};
            if (!ve_schedule.empty()) cfg.schedule = ve_schedule;
            cfg.regular_s = ve_s;
            check_input(cfg);
            VerificationReport rep = run(cfg);
            write_or_print(json_text(rep.body["suites"][ve_suite]), ve_json);
            std::fprintf(stderr, "%s: %s\n", ve_suite.c_str(), rep.pass ? "PASS" : "FAIL");
            return rep.pass ? 0 : 1;
        }
        if (*ru) {
            RunConfig cfg;
            if (!ru_config.empty()) {
                std::ifstream in(ru_config);
                if (!in) throw Error(ErrorKind::config, "config file not found: " + ru_config);
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw Error(ErrorKind::config, std::string("config is not JSON: ") + e.what());
                }
                cfg = RunConfig::from_json(j);
            } else {
                cfg = base_config(ru_c);
                if (!ru_schedule.empty()) cfg.schedule = ru_schedule;
                if (!ru_suites.empty()) {
                    cfg.suites.clear();
                    if (ru_suites == "all") {
                        cfg.suites = suite_names();
                        if (!cfg.thick_cantor) std::erase(cfg.suites, std::string("thick"));
                    } else {
                        std::stringstream ss(ru_suites);
                        for (std::string s; std::getline(ss, s, ',');) cfg.suites.push_back(s);
                    }
                }
            }
            cfg.out_dir = ru_out;
            cfg.threads = threads;
            check_input(cfg);
            fs::create_directories(ru_out);
            VerificationReport rep = run(cfg);
            for (auto it = rep.body["suites"].begin(); it != rep.body["suites"].end(); ++it)
                std::fprintf(stderr, "%-9s %s\n", it.key().c_str(), it.value()["pass"].get<bool>() ? "PASS" : "FAIL");
            return rep.pass ? 0 : 1;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "whitneydim: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "whitneydim: out of memory\n");
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "whitneydim: %s\n", e.what());
        return 2;
    }
    return 0;
}
