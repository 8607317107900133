#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "whitneydim/distance_field.hpp"
#include "whitneydim/geometry.hpp"
#include "whitneydim/whitney.hpp"

namespace whitneydim {

enum class Variant { upper, lower, slope };
const char* to_string(Variant v);

struct DimensionEstimate {
    double value = 0.0;
    Variant variant = Variant::slope;
    std::string method;     ///< box | whitney | assouad-upper | assouad-lower | spherical | codim
    double window_lo = 0.0; ///< k or r range of the data used
    double window_hi = 0.0;
    double residual = 0.0;  ///< rms deviation of the least-squares fit
    int samples = 0;
    nlohmann::json witness = nlohmann::json::object();
};

nlohmann::json to_json(const DimensionEstimate& e);

// ---------------------------------------------------------------- counts

enum class CellRule {
    closure,    ///< level-k cells whose closure meets E
    partition,  ///< half-open cells of the frame [1/4,3/4]^d (top faces closed)
};

/// Exact dyadic cell counts N_box(k) for k in [k_lo, k_hi].
GenerationCounts box_counts(const BoxSet& set, int k_lo, int k_hi, CellRule rule = CellRule::closure);

// ---------------------------------------------------------------- fitting

enum class ExponentRule {
    raw,       ///< e_k = log2(N_k) / k
    anchored,  ///< e_k = (log2(N_k) - a) / k, a = least-squares intercept over the window
};

struct FitWindow {
    int k_lo = 3;
    int k_hi = 30;
    int tail = 4;  ///< generations used for the upper/lower extremes
    int width = 0; ///< when > 0, only the last `width` levels up to k_hi are fitted
};

struct CountFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    int samples = 0;
    int k_lo = 0, k_hi = 0;            ///< usable range actually used
    std::vector<std::pair<int, double>> exponents;  ///< (k, e_k) over the tail
    DimensionEstimate upper, lower, slope_estimate;
};

/// Least-squares fit of log2 N_k on k plus tail extremes of the pointwise
/// exponents. Zero counts are skipped; all-zero input gives value 0.
/// Throws ErrorKind::insufficient_data with fewer than 3 usable points.
CountFit fit_counts(const GenerationCounts& counts, const FitWindow& window, const std::string& method,
                    ExponentRule rule = ExponentRule::anchored);
DimensionEstimate fit_dimension(const GenerationCounts& counts, const FitWindow& window, Variant variant,
                                const std::string& method = "whitney", ExponentRule rule = ExponentRule::anchored);

/// Same fit over arbitrary (x, y) samples, x playing the role of k.
struct LineFit {
    double slope = 0.0, intercept = 0.0, residual = 0.0;
    int samples = 0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------- scale budget

/// Finest dyadic level box counts may use for E: a pre-fractal's resolution
/// level; other sets are capped by `fallback`.
int resolution_level(const BoxSet& set, int fallback);

// ---------------------------------------------------------------- pipelines

struct MinkowskiWhitney {
    DimensionEstimate upper, lower;
    CountFit fit;
    bool zero_measure = false;
    std::optional<double> porosity;  ///< set when the porosity hypothesis was checked
};
MinkowskiWhitney minkowski_dims_whitney(const WhitneyDecomposition& w, const FitWindow& window,
                                        std::optional<double> porosity = std::nullopt);

/// Points of E nearest to the centers of the level-`level` half-open cells
/// meeting E, in cell order; stride-subsampled down to `cap` when larger.
std::vector<Vec> sample_centers(const BoxSet& set, int level, std::size_t cap);

struct AssouadOptions {
    int coarse_level = 3;   ///< center sampling level
    std::size_t max_samples = 256;
    int m_lo = 2;           ///< outer radius R = 2^-m
    int m_hi = 6;
    int g_lo = 2;           ///< gaps g: inner level m + g
    int g_min_span = 5;     ///< minimum number of g values per (x, m)
    int fine_level = 12;    ///< finest level m + g allowed
};

struct AssouadResult {
    DimensionEstimate upper, lower;
    int triples = 0;
};

/// Per (x, m) the slope of log2 N(x, m, g) against g, N counting level-(m+g)
/// half-open cells meeting E ∩ B(x, 2^-m); upper/lower are the extreme slopes.
AssouadResult assouad_dims(const BoxSet& set, const AssouadOptions& opt);

/// Level-(m+g) half-open cells meeting E ∩ B(x, 2^-m), for g = 0..g_max
/// (entry g of the result). For a normalized E the cells are those of the
/// frame with top faces closed.
std::vector<std::uint64_t> ball_cell_counts(const BoxSet& set, const Vec& x, int m, int g_max);

struct PorosityEstimate {
    double rho = 0.5;
    std::size_t sample_centers = 0;
    std::vector<double> scales;
    Vec attained_center{};
    double attained_r = 0.0;
};
/// Throws ErrorKind::scale_too_fine when some r < 16 h.
PorosityEstimate porosity_estimate(const DistanceField& field, const std::vector<Vec>& centers,
                                   const std::vector<double>& scales);

struct PerfectnessEstimate {
    double c_hat = 1.25;
    bool infinite = false;
    std::vector<std::pair<Vec, double>> witnesses;  ///< annuli empty at the largest C tried
};
PerfectnessEstimate uniform_perfectness(const BoxSet& set, const std::vector<Vec>& centers,
                                        const std::vector<double>& radii);
const std::vector<double>& perfectness_grid();

struct CodimOptions {
    int m_lo = 2;
    int m_hi = 4;
    int g_lo = 2;
    int g_hi = 6;
    double min_r = 0.0;     ///< r below this (e.g. pre-fractal resolution) is skipped
};
struct CodimResult {
    DimensionEstimate lower_codim, upper_codim;
    int pairs = 0;
};
/// Lebesgue node-count ratios |E_r ∩ B(x,R)| / |B(x,R)| fitted against r/R.
CodimResult codimension_estimates(const DistanceField& field, const std::vector<Vec>& centers,
                                  const CodimOptions& opt);

}  // namespace whitneydim
