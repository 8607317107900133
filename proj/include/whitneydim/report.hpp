#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "whitneydim/dimension.hpp"
#include "whitneydim/parallel_sets.hpp"

namespace whitneydim {

inline constexpr const char* kVersion = "0.1.0";

/// Every real in the tree rounded to 9 significant digits.
nlohmann::json round_reals(const nlohmann::json& j);
double round9(double x);

/// Pretty JSON (reals at 9 significant digits), newline-terminated.
void emit_json(const nlohmann::json& record, const std::filesystem::path& path);
std::string json_text(const nlohmann::json& record);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<bool> integer_columns;  ///< printed without exponent/decimals
};
std::string csv_text(const CsvTable& table);
void emit_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

CsvTable counts_table(const GenerationCounts& counts);
/// Rows sorted by descending r.
CsvTable profile_table(const std::vector<ProfileRow>& rows);

struct RunConfig {
    std::string set = "point";
    int depth = 6;
    std::optional<std::string> thick_cantor;  ///< parameter text, replaces `set`
    int threshold = 128;                       ///< raster inputs
    int k_max = 12;
    int grid = 11;
    FitWindow whitney_window{3, 30, 4, 5};
    FitWindow box_window{1, 30, 4, 5};
    int box_k_max = 16;                        ///< finest box level for non-fractal sets
    AssouadOptions assouad{};
    CodimOptions codim{};
    SandwichOptions sandwich{};
    std::optional<std::string> schedule;       ///< "geo:r0,ratio,n"; default per set
    std::optional<std::string> regular_window; ///< "geo:..." for the regular law; default 2^-4 .. 2^-9
    double regular_s = -1.0;                   ///< < 0: similarity dimension from the set metadata
    std::vector<std::string> suites{"dims"};
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 1;
    std::uint64_t seed = 0;  ///< no stochastic step uses it; echoed for completeness

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// Suites: dims, whitney, boundary, sandwich, op, regular, percube, local, thick.
const std::vector<std::string>& suite_names();

struct VerificationReport {
    nlohmann::json body;     ///< version, config echo, suites, pass
    nlohmann::json timings;  ///< wall-clock seconds per step; kept apart so `body` is reproducible
    bool pass = false;
};

/// Builds the set, runs the requested suites and writes artifacts to out_dir
/// (report.json, timings.json, counts.csv, box_counts.csv, profile.csv) when set.
/// Library errors propagate; a failing suite only clears `pass`.
VerificationReport run(const RunConfig& config);

/// The set a config describes, normalized.
BoxSet build_set(const RunConfig& config);

}  // namespace whitneydim
