#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "whitneydim/contour.hpp"
#include "whitneydim/dimension.hpp"
#include "whitneydim/distance_field.hpp"
#include "whitneydim/setgen.hpp"
#include "whitneydim/whitney.hpp"

namespace whitneydim {

/// (#nodes with value < r) * h^d. Throws ErrorKind::scale_too_fine for r < 4h.
double neighborhood_volume(const DistanceField& field, double r);

/// r_i = r0 * ratio^i, i = 0..n-1.
std::vector<double> geometric_schedule(double r0, double ratio, int n);
/// "geo:r0,ratio,n".
std::vector<double> parse_schedule(std::string_view text);
/// Keeps lo <= r <= hi, sorted by descending r.
std::vector<double> clip_schedule(std::vector<double> rs, double lo, double hi);
/// r0 * 2^{-i/2} clipped to [8h, diam/2] (to [8h, 1/4] for a single point).
std::vector<double> default_schedule(const BoxSet& set, int grid_level);

/// Boundary lengths of E_r at any r > 0. Scales covered by the level-K field
/// (r >= 8h) are contoured on it; finer ones use the sparse tracer at the
/// coarsest adequate level. When ∂E_r would leave [0,1]^2, E is shrunk by a
/// power of two about the center of [0,1]^2, traced sparsely with h <= r/64, and the length scaled back.
class BoundaryMeter {
public:
    BoundaryMeter(std::shared_ptr<const BoxSet> set, int grid_level);

    const BoxSet& set() const noexcept { return *set_; }
    int grid_level() const noexcept { return level_; }
    double length(double r);
    /// Curve with segments, in the coordinates of E (no rescaling allowed).
    BoundaryCurve curve(double r);
    /// Volume of E_r from the level-K field (requires r >= 4h, no rescaling).
    double volume(double r);
    const DistanceField& field();

private:
    int shrink_for(double r) const;
    std::shared_ptr<const BoxSet> scaled(int p);

    std::shared_ptr<const BoxSet> set_;
    int level_;
    std::optional<DistanceField> field_;
    std::map<int, std::shared_ptr<const BoxSet>> scaled_;
    std::map<double, double> lengths_;
};

struct ProfileRow {
    double r = 0.0;
    double length = 0.0;
    double volume = 0.0;
};
/// One row per r in descending order.
std::vector<ProfileRow> boundary_length_profile(BoundaryMeter& meter, const std::vector<double>& rs);

struct SphericalDims {
    std::optional<DimensionEstimate> lower_boundary, upper_boundary;  ///< d = 2 only
    DimensionEstimate lower_whitney, upper_whitney;
    double discrepancy = 0.0;  ///< max |boundary - whitney| over the two variants
};
/// Boundary method: alpha(r) = (log2 L(r) - b) / log2 r with b the
/// least-squares intercept of log2 L on log2 r; lower = (d-1) - max tail alpha,
/// upper = (d-1) - min tail alpha. Whitney method: tail extremes of the count fit.
SphericalDims spherical_dims(const std::vector<ProfileRow>& profile, int dim, const CountFit& whitney, int tail);

struct SandwichRow {
    int k = 0;
    double r = 0.0;
    double length = 0.0;
    std::uint64_t w_k = 0;
    std::uint64_t w_sum = 0;
    double lower_ratio = 0.0;  ///< length / (r^{d-1} W_k)
    double upper_ratio = 0.0;  ///< length / (r^{d-1} sum_{j=k+a}^{k+b} W_j)
};

struct SandwichOptions {
    int a = 2, b = 4;
    bool search = true;
    int search_radius = 3;
    int k_lo = 4;
    int k_hi = 8;
    double r_factor = 0.75;
    double bound = 50.0;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    int a = 2, b = 4;
    int offset = 0;
    double c_hat = 0.0;   ///< min lower_ratio
    double C_hat = 0.0;   ///< max upper_ratio
    double spread = 0.0;  ///< C_hat / c_hat
    bool lower_positive = false;
    bool pass = false;
    nlohmann::json offsets = nlohmann::json::array();  ///< spread per eligible offset
};
/// Throws ErrorKind::no_overlap when no generation of the window has both a
/// measurable boundary scale and complete counts for any eligible offset.
SandwichReport sandwich_check(const WhitneyDecomposition& w, BoundaryMeter& meter, const SandwichOptions& opt);

struct PerCubeReport {
    double r = 0.0;
    int generation = 0;               ///< k with 2^{-k-1} < r <= 2^{-k}
    std::uint64_t matched = 0;        ///< cubes whose Whitney ball is in that generation
    std::uint64_t crossed = 0;        ///< cubes the r-boundary can meet
    double c_hat = 0.0;               ///< min over matched of length(∂E_r ∩ 8B) / r
    double C_hat = 0.0;               ///< max over cubes of length(∂E_r ∩ Q) / side(Q)
    double upper_bound = 6.0;
    bool lower_pass = false;
    bool upper_pass = false;
    nlohmann::json witnesses = nlohmann::json::object();
};
/// The Whitney ball of a cube Q is B(c_Q, dist(c_Q, E)/8), so 8B touches E.
PerCubeReport per_cube_boundary_checks(const WhitneyDecomposition& w, const BoundaryCurve& curve,
                                       double upper_bound = 6.0);

struct OleksivPesinReport {
    double diam = 0.0;
    std::vector<ProfileRow> inner;  ///< r <= diam
    std::vector<ProfileRow> outer;  ///< r > diam
    double C1 = 0.0;                ///< max length / r over outer
    double C2 = 0.0;                ///< max r * length over inner
    double c1_bound = 8.0;
    bool pass = false;
};
/// Outer scales are r = 2^i diam for i = 1..3 (the given schedule when
/// diam = 0); inner scales are the schedule entries <= diam.
OleksivPesinReport oleksiv_pesin_check(BoundaryMeter& meter, const std::vector<double>& schedule,
                                       double c1_bound = 8.0);

struct RegularLawReport {
    double s = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double band_lo = 0.0, band_hi = 0.0;
    double ratio = 0.0;
    double bound = 10.0;
    std::vector<ProfileRow> rows;
    bool pass = false;
};
/// Band of length(r) * r^{s+1-d} over the schedule.
RegularLawReport regular_law_check(BoundaryMeter& meter, double s, const std::vector<double>& schedule,
                                   double bound = 10.0);

struct LocalProfile {
    Ball b0;
    std::vector<std::pair<double, double>> rows;  ///< (r, clipped length)
    DimensionEstimate lambda;
};
/// Fits lambda from log(L_clip / r^{d-1}) = -lambda log(r/R) + c.
LocalProfile local_boundary_profile(BoundaryMeter& meter, const Ball& b0, const std::vector<double>& schedule);

struct ThickCantorCheck {
    bool exact_pass = false;   ///< counts, sides, gaps and areas match the closed forms
    nlohmann::json stages = nlohmann::json::array();
    struct Probe {
        double r = 0.0;         ///< normalized units
        int grid_level = 0;
        double length = 0.0;
        double ratio = 0.0;     ///< length / (count_j l_j), both normalized
    };
    std::vector<Probe> probes;
    bool ratio_pass = false;
    GenerationCounts odd_counts;
    double odd_exponent = 0.0; ///< box-count slope over the last odd stage's scale range
    bool exponent_pass = false;
    bool pass = false;
};
ThickCantorCheck thick_cantor_check(const ThickCantorInstance& inst, const BoxSet& normalized);

}  // namespace whitneydim
