#include <cmath>

#include <gtest/gtest.h>

#include "whitneydim/dimension.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/setgen.hpp"

using namespace whitneydim;

namespace {

GenerationCounts synthetic(double slope, double intercept, int k_lo, int k_hi) {
    GenerationCounts g;
    g.k_lo = k_lo;
    g.k_hi = k_hi;
    for (int k = k_lo; k <= k_hi; ++k) g.counts[k] = static_cast<std::uint64_t>(std::llround(std::exp2(intercept + slope * k)));
    return g;
}

}  // namespace

TEST(Fit, LeastSquaresExactLine) {
    LineFit f = least_squares({1, 2, 3, 4}, {1.5, 3.5, 5.5, 7.5});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, -0.5, 1e-14);
    EXPECT_NEAR(f.residual, 0.0, 1e-14);
    EXPECT_EQ(f.samples, 4);
}

TEST(Fit, AnchoredRemovesConstantFactor) {
    GenerationCounts g = synthetic(1.5, 5.0, 3, 20);
    FitWindow win{3, 20, 4, 5};
    CountFit anchored = fit_counts(g, win, "whitney");
    EXPECT_NEAR(anchored.upper.value, 1.5, 1e-5);
    EXPECT_NEAR(anchored.lower.value, 1.5, 1e-5);
    EXPECT_EQ(anchored.k_lo, 16);
    EXPECT_EQ(anchored.k_hi, 20);
    CountFit raw = fit_counts(g, win, "whitney", ExponentRule::raw);
    // e_k = 1.5 + 5/k over k = 17..20.
    EXPECT_NEAR(raw.upper.value, 1.5 + 5.0 / 17, 1e-5);
    EXPECT_NEAR(raw.lower.value, 1.5 + 5.0 / 20, 1e-5);
    EXPECT_NEAR(raw.slope_estimate.value, 1.5, 1e-5);
}

TEST(Fit, UpperNotBelowLower) {
    // Oscillating counts: period-2 staircase.
    GenerationCounts g;
    for (int k = 3; k <= 16; ++k) g.counts[k] = (std::uint64_t{1} << k) * (k % 2 ? 3 : 1);
    CountFit f = fit_counts(g, FitWindow{3, 16, 4, 8}, "box");
    EXPECT_GE(f.upper.value, f.lower.value);
    EXPECT_GT(f.upper.value - f.lower.value, 0.01);
}

TEST(Fit, DegenerateInputs) {
    GenerationCounts g;
    g.counts[3] = 4;
    g.counts[4] = 8;
    try {
        fit_counts(g, FitWindow{}, "box");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
    GenerationCounts zeros;
    for (int k = 3; k < 9; ++k) zeros.counts[k] = 0;
    EXPECT_EQ(fit_counts(zeros, FitWindow{}, "whitney").upper.value, 0.0);
}

TEST(BoxCounts, SegmentIsOneDimensional) {
    BoxSet seg = make_set("segment", 0).normalize();
    GenerationCounts g = box_counts(seg, 2, 14, CellRule::partition);
    for (int k = 2; k <= 14; ++k) EXPECT_EQ(g.at(k), std::uint64_t{1} << (k - 1)) << k;
    CountFit f = fit_counts(g, FitWindow{2, 14, 4, 5}, "box");
    EXPECT_NEAR(f.upper.value, 1.0, 1e-9);
}

TEST(Resolution, PreFractalLevel) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3"), 8).normalize();
    // Normalized resolution 3^-8 / 2; floor(log2(2 * 3^8)) = 14, plus one.
    EXPECT_EQ(resolution_level(c, 16), static_cast<int>(std::floor(std::log2(std::pow(3.0, 8)))) + 1);
    EXPECT_EQ(resolution_level(make_set("segment", 0).normalize(), 16), 16);
}

TEST(Assouad, SegmentAndPoint) {
    AssouadOptions opt;
    opt.fine_level = 13;
    AssouadResult seg = assouad_dims(make_set("segment", 0).normalize(), opt);
    EXPECT_NEAR(seg.upper.value, 1.0, 0.05);
    EXPECT_NEAR(seg.lower.value, 1.0, 0.05);
    EXPECT_GT(seg.triples, 0);
    AssouadResult pt = assouad_dims(make_set("point", 0).normalize(), opt);
    EXPECT_NEAR(pt.upper.value, 0.0, 1e-12);
}

TEST(Assouad, BallCountsOnSegment) {
    BoxSet seg = make_set("segment", 0).normalize();
    // Ball of radius 1/8 about (1/2,1/2): the chord has length 1/4.
    auto n = ball_cell_counts(seg, Vec{0.5, 0.5, 0}, 3, 5);
    ASSERT_EQ(n.size(), 6u);
    for (int g = 0; g <= 5; ++g) {
        const double cells = std::ldexp(0.25, 3 + g);
        EXPECT_GE(static_cast<double>(n[g]), cells);
        EXPECT_LE(static_cast<double>(n[g]), cells + 2);
    }
}

TEST(SampleCenters, InsideTheSet) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3x3"), 4).normalize();
    auto pts = sample_centers(c, 4, 20);
    EXPECT_LE(pts.size(), 20u);
    EXPECT_FALSE(pts.empty());
    for (const auto& p : pts) EXPECT_EQ(dist_point_to_set(p, c), 0.0);
}

TEST(Porosity, PointAndSquare) {
    BoxSet pt = make_set("point", 0).normalize();
    DistanceField f = compute_distance_field(pt, 9);
    PorosityEstimate e = porosity_estimate(f, {Vec{0.5, 0.5, 0}}, {0.125, 0.0625});
    EXPECT_GT(e.rho, 0.4);
    BoxSet sq = make_set("square", 0).normalize();
    DistanceField g = compute_distance_field(sq, 9);
    PorosityEstimate s = porosity_estimate(g, {Vec{0.5, 0.5, 0}}, {0.125, 0.0625});
    EXPECT_LT(s.rho, 0.01);
    EXPECT_THROW(porosity_estimate(f, {Vec{0.5, 0.5, 0}}, {0.01}), Error);
}

TEST(Perfectness, FiniteOnCarpetInfiniteOnTwoPoints) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3x3"), 5).normalize();
    auto pc = uniform_perfectness(c, sample_centers(c, 3, 16), {0.125, 0.0625, 0.03125});
    EXPECT_FALSE(pc.infinite);
    BoxSet tp = make_set("two-points", 0).normalize();
    auto pt = uniform_perfectness(tp, sample_centers(tp, 3, 16), {0.125, 0.0625});
    EXPECT_TRUE(pt.infinite);
}

TEST(Codim, SegmentHasCodimensionOne) {
    BoxSet seg = make_set("segment", 0).normalize();
    DistanceField f = compute_distance_field(seg, 11);
    CodimOptions opt;
    opt.min_r = std::ldexp(1.0, -11);
    CodimResult r = codimension_estimates(f, sample_centers(seg, 3, 16), opt);
    EXPECT_NEAR(r.lower_codim.value, 1.0, 0.15);
    EXPECT_NEAR(r.upper_codim.value, 1.0, 0.15);
    EXPECT_GT(r.pairs, 0);
}

TEST(MinkowskiWhitney, CarpetLikeDust) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3x3"), 6).normalize();
    WhitneyDecomposition w = whitney_decompose(c, 14);
    MinkowskiWhitney m = minkowski_dims_whitney(w, FitWindow{3, 13, 4, 5});
    const double s = std::log(4.0) / std::log(3.0);
    EXPECT_TRUE(m.zero_measure);
    EXPECT_NEAR(m.upper.value, s, 0.1);
    EXPECT_NEAR(m.lower.value, s, 0.1);
    EXPECT_GE(m.upper.value, m.lower.value);
}
