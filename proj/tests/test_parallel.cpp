#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "whitneydim/contour.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/parallel_sets.hpp"
#include "whitneydim/setgen.hpp"

using namespace whitneydim;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const BoxSet> normalized(const char* name, int depth = 0) {
    return std::make_shared<const BoxSet>(make_set(name, depth).normalize());
}

}  // namespace

TEST(Contour, CircleAroundPoint) {
    auto pt = normalized("point");
    DistanceField f = compute_distance_field(pt, 9);
    BoundaryCurve c = extract_boundary(f, 0.2);
    EXPECT_NEAR(c.total_length, 2 * kPi * 0.2, 0.01 * 2 * kPi * 0.2);
    EXPECT_EQ(c.segment_count, c.segments.size());
    EXPECT_TRUE(std::is_sorted(c.cells.begin(), c.cells.end()));
}

TEST(Contour, TwoDisjointCircles) {
    auto tp = normalized("two-points");
    DistanceField f = compute_distance_field(tp, 10);
    const double r = 0.1;
    EXPECT_NEAR(extract_boundary(f, r).total_length, 4 * kPi * r, 0.02 * 4 * kPi * r);
}

TEST(Contour, Stadium) {
    auto seg = normalized("segment");
    DistanceField f = compute_distance_field(seg, 10);
    const double r = 0.0625;
    const double want = 2 * 0.5 + 2 * kPi * r;
    EXPECT_NEAR(want, 1.3927, 1e-4);
    EXPECT_NEAR(extract_boundary(f, r).total_length, want, 0.015 * want);
}

TEST(Contour, MidpointsNearLevel) {
    for (const char* name : {"segment", "two-points", "point-segment"}) {
        auto set = normalized(name);
        DistanceField f = compute_distance_field(set, 9);
        const double h = f.spacing();
        for (double r : {0.03, 0.07, 0.15}) {
            BoundaryCurve c = extract_boundary(f, r);
            ASSERT_FALSE(c.segments.empty());
            for (const auto& s : c.segments) {
                Vec m{(s.a[0] + s.b[0]) / 2, (s.a[1] + s.b[1]) / 2, 0};
                EXPECT_LE(std::abs(dist_point_to_set(m, *set) - r), 2 * h) << name;
            }
        }
    }
}

TEST(Contour, GridRefinementConverges) {
    auto c = std::make_shared<const BoxSet>(ifs_generate(builtin_ifs("cantor3x3"), 3).normalize());
    for (double r : {0.02, 0.05}) {
        const double l10 = extract_boundary(compute_distance_field(c, 10), r).total_length;
        const double l11 = extract_boundary(compute_distance_field(c, 11), r).total_length;
        EXPECT_LE(std::abs(l11 - l10), 0.01 * l11) << r;
    }
}

TEST(Contour, SparseMatchesDense) {
    auto c = std::make_shared<const BoxSet>(ifs_generate(builtin_ifs("sierpinski-carpet"), 2).normalize());
    DistanceField f = compute_distance_field(c, 9);
    for (double r : {0.02, 0.04, 0.1}) {
        BoundaryCurve dense = extract_boundary(f, r);
        BoundaryCurve sparse = extract_boundary_sparse(*c, 9, r, true);
        EXPECT_EQ(dense.segment_count, sparse.segment_count);
        EXPECT_NEAR(dense.total_length, sparse.total_length, 1e-9 * dense.total_length);
        EXPECT_EQ(dense.cells, sparse.cells);
    }
}

TEST(Contour, ScaleGuards) {
    auto pt = normalized("point");
    DistanceField f = compute_distance_field(pt, 6);
    try {
        extract_boundary(f, f.spacing());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::scale_too_fine);
    }
    EXPECT_EQ(extract_boundary(f, 5.0).total_length, 0.0);
}

TEST(Volume, MonotoneAndDerivativeMatchesLength) {
    for (const char* name : {"point", "segment", "two-points"}) {
        auto set = normalized(name);
        BoundaryMeter meter(set, 11);
        double prev = 0;
        for (double r : {0.02, 0.04, 0.08, 0.16}) {
            const double v = meter.volume(r);
            EXPECT_GE(v, prev);
            prev = v;
            const double d = r / 16;
            const double dv = (meter.volume(r + d) - meter.volume(r - d)) / (2 * d);
            EXPECT_NEAR(dv, meter.length(r), 0.1 * meter.length(r)) << name << " r=" << r;
        }
    }
    auto pt = normalized("point");
    EXPECT_THROW(neighborhood_volume(compute_distance_field(pt, 6), 0.01), Error);
}

TEST(Schedule, ParseAndClip) {
    auto rs = parse_schedule("geo:0.5,0.5,4");
    ASSERT_EQ(rs.size(), 4u);
    EXPECT_DOUBLE_EQ(rs[3], 0.0625);
    auto c = clip_schedule({0.01, 0.5, 0.1, 0.2}, 0.05, 0.3);
    EXPECT_EQ(c, (std::vector<double>{0.2, 0.1}));
    for (const char* bad : {"lin:1,2,3", "geo:1,2", "geo:a,b,c", "geo:-1,0.5,3"})
        EXPECT_THROW(parse_schedule(bad), Error) << bad;
    auto d = default_schedule(*normalized("point"), 10);
    EXPECT_FALSE(d.empty());
    EXPECT_LE(d.front(), 0.25);
    EXPECT_GE(d.back(), 8 * std::ldexp(1.0, -10));
}

TEST(Meter, FineAndWideScales) {
    auto pt = normalized("point");
    BoundaryMeter meter(pt, 8);
    // Below 8h the sparse tracer takes over; above 1/2 the set is shrunk.
    for (double r : {0.004, 0.01, 0.3, 1.0, 3.0})
        EXPECT_NEAR(meter.length(r), 2 * kPi * r, 0.01 * 2 * kPi * r) << r;
}

TEST(OleksivPesin, PointAttainsTwoPi) {
    auto pt = normalized("point");
    BoundaryMeter meter(pt, 10);
    OleksivPesinReport op = oleksiv_pesin_check(meter, geometric_schedule(0.25, 0.5, 4));
    EXPECT_EQ(op.diam, 0.0);
    EXPECT_TRUE(op.inner.empty());
    EXPECT_NEAR(op.C1, 2 * kPi, 0.01 * 2 * kPi);
    EXPECT_TRUE(op.pass);
}

TEST(OleksivPesin, SegmentBounded) {
    auto seg = normalized("segment");
    BoundaryMeter meter(seg, 10);
    OleksivPesinReport op = oleksiv_pesin_check(meter, geometric_schedule(0.25, 0.5, 5));
    EXPECT_EQ(op.outer.size(), 3u);
    EXPECT_LE(op.C1, 8.0);
    EXPECT_TRUE(op.pass);
    // r * L(r) stays bounded as r -> 0.
    for (const auto& row : op.inner) EXPECT_LE(row.r * row.length, op.C2 + 1e-15);
}

TEST(Sandwich, SegmentRatiosStayComparable) {
    auto seg = normalized("segment");
    WhitneyDecomposition w = whitney_decompose(seg, 15);
    BoundaryMeter meter(seg, 10);
    SandwichOptions opt;
    opt.k_lo = 5;
    opt.k_hi = 10;
    opt.search = false;
    SandwichReport rep = sandwich_check(w, meter, opt);
    ASSERT_EQ(rep.rows.size(), 6u);
    double lo = 1e300, hi = 0;
    for (const auto& row : rep.rows) {
        EXPECT_GT(row.lower_ratio, 0.0);
        lo = std::min(lo, row.lower_ratio);
        hi = std::max(hi, row.lower_ratio);
    }
    EXPECT_LE(hi / lo, 3.0);
    EXPECT_TRUE(rep.lower_positive);
}

TEST(Sandwich, NoOverlapIsReported) {
    auto pt = normalized("point");
    WhitneyDecomposition w = whitney_decompose(pt, 6);
    BoundaryMeter meter(pt, 9);
    SandwichOptions opt;
    opt.k_lo = 8;
    opt.k_hi = 9;
    opt.search = false;
    try {
        sandwich_check(w, meter, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::no_overlap);
    }
}

TEST(PerCube, PointLowerBound) {
    auto pt = normalized("point");
    WhitneyDecomposition w = whitney_decompose(pt, 12);
    BoundaryMeter meter(pt, 11);
    const double r = 0.75 * std::ldexp(1.0, -5);
    PerCubeReport rep = per_cube_boundary_checks(w, meter.curve(r));
    EXPECT_EQ(rep.generation, 5);
    EXPECT_GT(rep.matched, 0u);
    EXPECT_GE(rep.c_hat, 0.5);
    EXPECT_LE(rep.C_hat, rep.upper_bound);
    EXPECT_TRUE(rep.lower_pass && rep.upper_pass);
}

TEST(RegularLaw, SegmentIsOneRegular) {
    auto seg = normalized("segment");
    BoundaryMeter meter(seg, 11);
    RegularLawReport rep = regular_law_check(meter, 1.0, geometric_schedule(0.0625, std::sqrt(0.5), 9));
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.ratio, 2.0);
}

TEST(Spherical, SegmentProfile) {
    auto seg = normalized("segment");
    BoundaryMeter meter(seg, 11);
    auto profile = boundary_length_profile(meter, geometric_schedule(0.015625, std::sqrt(0.5), 13));
    ASSERT_EQ(profile.size(), 13u);
    EXPECT_TRUE(std::is_sorted(profile.begin(), profile.end(), [](auto& a, auto& b) { return a.r > b.r; }));
    WhitneyDecomposition w = whitney_decompose(seg, 14);
    CountFit fit = fit_counts(generation_counts(w), FitWindow{3, 13, 4, 5}, "whitney");
    SphericalDims sd = spherical_dims(profile, 2, fit, 4);
    ASSERT_TRUE(sd.lower_boundary && sd.upper_boundary);
    EXPECT_NEAR(sd.lower_boundary->value, 1.0, 0.05);
    EXPECT_NEAR(sd.upper_boundary->value, 1.0, 0.05);
    EXPECT_LE(sd.lower_boundary->value, sd.upper_boundary->value);
}

TEST(LocalProfile, SegmentCenter) {
    auto seg = normalized("segment");
    BoundaryMeter meter(seg, 11);
    Ball b0{{0.5, 0.5, 0}, 0.125};
    LocalProfile lp = local_boundary_profile(meter, b0, geometric_schedule(0.03125, std::sqrt(0.5), 8));
    // Inside the ball the boundary is two chords of length ~2R, so L_clip / r ~ 4R / r.
    EXPECT_NEAR(lp.lambda.value, 1.0, 0.1);
}
