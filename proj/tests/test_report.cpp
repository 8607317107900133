#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "whitneydim/error.hpp"
#include "whitneydim/limits.hpp"
#include "whitneydim/report.hpp"

using namespace whitneydim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(WHITNEYDIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Csv, RandomRecordsRoundTrip) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::uniform_int_distribution<int> ex(-30, 30);
    CsvTable t{{"k", "value", "other"}, {}, {true, false, false}};
    for (int i = 0; i < 100; ++i)
        t.rows.push_back({static_cast<double>(rng() % 100000), u(rng) * std::ldexp(1.0, ex(rng)), u(rng)});
    const std::string text = csv_text(t);
    CsvTable back = parse_csv(text);
    EXPECT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows.size(), 100u);
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(back.rows[i][c], round9(t.rows[i][c]));
    back.integer_columns = t.integer_columns;
    EXPECT_EQ(csv_text(back), text);
}

TEST(Csv, MalformedInput) {
    EXPECT_THROW(parse_csv(""), Error);
    EXPECT_THROW(parse_csv("a,b\n1,x\n"), Error);
    EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), Error);
}

TEST(Json, RandomRecordsRoundTrip) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        DimensionEstimate e;
        e.value = u(rng);
        e.variant = static_cast<Variant>(rng() % 3);
        e.method = "whitney";
        e.window_lo = static_cast<double>(rng() % 10);
        e.window_hi = e.window_lo + 5;
        e.residual = u(rng) * 1e-3;
        e.samples = static_cast<int>(rng() % 20);
        const std::string text = json_text(to_json(e));
        const auto parsed = nlohmann::json::parse(text);
        EXPECT_EQ(json_text(parsed), text);
        EXPECT_EQ(parsed["value"].get<double>(), round9(e.value));
        EXPECT_EQ(parsed["variant"], to_string(e.variant));
    }
}

TEST(Json, NonFiniteReals) {
    nlohmann::json j{{"a", std::numeric_limits<double>::infinity()}, {"b", std::nan("")}};
    nlohmann::json r = round_reals(j);
    EXPECT_EQ(r["a"], "inf");
    EXPECT_TRUE(r["b"].is_null());
}

TEST(Config, JsonRoundTrip) {
    RunConfig c;
    c.set = "cantor3x3";
    c.depth = 5;
    c.k_max = 13;
    c.schedule = "geo:0.1,0.5,5";
    c.suites = {"dims", "whitney"};
    c.assouad.fine_level = 11;
    RunConfig back = RunConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_THROW(RunConfig::from_json(nlohmann::json{{"k_max", "twelve"}}), Error);
}

TEST(ExitCodes, Contract) {
    EXPECT_EQ(exit_code_for(ErrorKind::config), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::format), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::invalid_params), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::resource), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::overflow), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::insufficient_data), 1);
    EXPECT_EQ(exit_code_for(ErrorKind::scale_too_fine), 1);
}

TEST(Run, RejectsBadConfig) {
    RunConfig c;
    c.suites = {"nonsense"};
    EXPECT_THROW(run(c), Error);
    c.suites = {"dims"};
    c.k_max = 2;
    EXPECT_THROW(run(c), Error);
    RunConfig one_d;
    one_d.set = "cantor3";
    one_d.suites = {"boundary"};
    EXPECT_THROW(run(one_d), Error);
}

TEST(Run, ReportIndependentOfThreads) {
    RunConfig c;
    c.set = "cantor3x3";
    c.depth = 5;
    c.k_max = 11;
    c.grid = 9;
    c.suites = {"dims", "whitney", "boundary"};
    c.threads = 1;
    const std::string a = run(c).body.dump();
    c.threads = 3;
    const std::string b = run(c).body.dump();
    set_thread_count(1);
    EXPECT_EQ(a, b);
}

TEST(Cli, MissingInputExitsTwoWithoutOutputs) {
    fs::path out = fresh_dir("wd_cli_missing");
    EXPECT_EQ(cli("run --set /nonexistent/set.json --out-dir " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out / "report.json"));
    EXPECT_EQ(cli("dims --in /nonexistent/x.pgm"), 2);
    EXPECT_EQ(cli("dims --bogus-flag"), 2);
    EXPECT_EQ(cli(""), 2);
}

TEST(Cli, ResourceLimitExitsThree) {
    fs::path out = fresh_dir("wd_cli_cap");
    const std::string cmd = "WHITNEYDIM_MAX_CELLS=1000 " + std::string(WHITNEYDIM_CLI) +
                            " run --set segment --kmax 12 --out-dir " + out.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 3);
}

TEST(Cli, GenThenRunWritesArtifacts) {
    fs::path dir = fresh_dir("wd_cli_run");
    fs::create_directories(dir);
    const fs::path set = dir / "dust.json";
    ASSERT_EQ(cli("gen --set cantor3x3 --depth 5 --out " + set.string()), 0);
    ASSERT_TRUE(fs::exists(set));
    // 0 or 1 both mean the suites ran; a shallow pre-fractal may fail a dims check.
    const int rc = cli("run --set " + set.string() + " --kmax 11 --grid 9 --suites dims,whitney --out-dir " +
                       (dir / "out").string());
    EXPECT_TRUE(rc == 0 || rc == 1) << rc;
    for (const char* f : {"report.json", "timings.json", "counts.csv", "box_counts.csv"})
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    EXPECT_TRUE(report["suites"]["whitney"]["pass"].get<bool>());
    EXPECT_EQ(report["pass"].get<bool>(), rc == 0);
    EXPECT_EQ(report["config"]["k_max"], 11);
    EXPECT_EQ(cli("verify --in point --suite whitney --kmax 8 --grid 8"), 0);
}
