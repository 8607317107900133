#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "whitneydim/candidates.hpp"
#include "whitneydim/distance_field.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/geometry.hpp"
#include "whitneydim/kernels/kernels.hpp"
#include "whitneydim/limits.hpp"
#include "whitneydim/qsqrt2.hpp"
#include "whitneydim/rational.hpp"
#include "whitneydim/setgen.hpp"
#include "test_util.hpp"

using namespace whitneydim;
using wdtest::random_set;

TEST(Rational, ReducesAndCompares) {
    Rational a(6, -4);
    EXPECT_EQ(a.num(), -3);
    EXPECT_EQ(a.den(), 2);
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
    EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
    EXPECT_LT(Rational(1, 3), Rational(34, 100));
    EXPECT_EQ(Rational::parse("-7/21"), Rational(-1, 3));
    EXPECT_EQ(Rational::parse("5"), Rational(5));
}

TEST(Rational, ScaledFloorCeil) {
    Rational x(1, 3);
    EXPECT_EQ(x.floor_scaled(4), 5);
    EXPECT_EQ(x.ceil_scaled(4), 6);
    EXPECT_EQ(Rational(-1, 3).floor_scaled(4), -6);
    EXPECT_EQ(Rational(3, 8).floor_scaled(3), 3);
    EXPECT_EQ(Rational(3, 8).ceil_scaled(3), 3);
}

TEST(Rational, OverflowIsReported) {
    Rational big(std::int64_t{1} << 62);
    try {
        (void)(big * big);
        FAIL() << "no overflow";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::overflow);
    }
    EXPECT_THROW(Rational(1, 0), Error);
}

TEST(Rational, DyadicRounding) {
    EXPECT_EQ(Rational::from_double_dyadic(0.3, 4), Rational(5, 16));
    EXPECT_EQ(Rational::from_double_dyadic(0.25, 10), Rational(1, 4));
}

TEST(QSqrt2, FieldArithmetic) {
    QSqrt2 s(Rational(0), Rational(1));
    EXPECT_EQ(s * s, QSqrt2(Rational(2)));
    QSqrt2 x(Rational(3), Rational(-2));  // 3 - 2 sqrt2 > 0
    EXPECT_EQ(x.sign(), 1);
    EXPECT_EQ(QSqrt2(Rational(1), Rational(-1)).sign(), -1);
    EXPECT_EQ(x / x, QSqrt2(Rational(1)));
    EXPECT_EQ(pow(s, 4), QSqrt2(Rational(4)));
    EXPECT_NEAR((x * QSqrt2(Rational(3), Rational(2))).to_double(), 1.0, 0.0);
    EXPECT_LT(QSqrt2(Rational(7, 5)), s);
    EXPECT_GT(QSqrt2(Rational(3, 2)), s);
}

// Scalar and SIMD row kernels must agree bit for bit.
class KernelEquivalence : public ::testing::TestWithParam<const kernels::KernelTable*> {};

TEST_P(KernelEquivalence, MatchesScalar) {
    const kernels::KernelTable* simd = GetParam();
    const auto& ref = kernels::scalar_table();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nb = 1 + rng() % 40;
        std::vector<double> lx(nb), hx(nb), ly(nb), hy(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
            lx[b] = std::min(a0, a1);
            hx[b] = std::max(a0, a1);
            ly[b] = std::min(b0, b1);
            hy[b] = std::max(b0, b1);
        }
        kernels::BoxRows rows{lx, hx, ly, hy};
        const std::size_t n = 1 + rng() % 70;
        std::vector<double> o1(n, 4.0), o2(n, 4.0);
        const double x0 = u(rng) * 0.2, dx = 1.0 / 64, y = u(rng);
        ref.min_sq_dist_row(x0, dx, y, rows, o1);
        simd->min_sq_dist_row(x0, dx, y, rows, o2);
        ASSERT_EQ(0, std::memcmp(o1.data(), o2.data(), n * sizeof(double))) << simd->name;

        const double thr = u(rng) * 0.3;
        EXPECT_EQ(ref.count_below(o1, thr), simd->count_below(o1, thr));
        const double cx = u(rng), dy = u(rng) * 0.1, rad = u(rng);
        EXPECT_EQ(ref.count_below_in_disc(o1, x0, dx, cx, dy, rad, thr),
                  simd->count_below_in_disc(o1, x0, dx, cx, dy, rad, thr));
        const double c1 = ref.clearance_row(o1, x0, dx, cx, dy, rad);
        const double c2 = simd->clearance_row(o1, x0, dx, cx, dy, rad);
        EXPECT_EQ(0, std::memcmp(&c1, &c2, sizeof(double)));
    }
}

std::vector<const kernels::KernelTable*> simd_tables() {
    std::vector<const kernels::KernelTable*> t;
    if (auto* p = kernels::avx2_table()) t.push_back(p);
    if (auto* p = kernels::neon_table()) t.push_back(p);
    if (t.empty()) t.push_back(&kernels::scalar_table());
    return t;
}
INSTANTIATE_TEST_SUITE_P(Simd, KernelEquivalence, ::testing::ValuesIn(simd_tables()));

TEST(Kernels, SelectByName) {
    EXPECT_TRUE(kernels::select("scalar"));
    EXPECT_STREQ(kernels::active().name, "scalar");
    EXPECT_FALSE(kernels::select("sse9"));
    EXPECT_TRUE(kernels::select("auto"));
}

TEST(Distance, BruteForceOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int dim : {1, 2}) {
        BoxSet set = random_set(rng, dim, 25);
        CandidateFilter filter(set);
        std::vector<Vec> pts;
        for (int q = 0; q < 1000; ++q) {
            Vec p{};
            for (int a = 0; a < dim; ++a) p[a] = u(rng);
            pts.push_back(p);
        }
        std::vector<double> batch = batch_distances(filter, pts);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const double want = wdtest::brute_dist(set, pts[q]);
            ASSERT_NEAR(dist_point_to_set(pts[q], set), want, 1e-12);
            ASSERT_NEAR(batch[q], want, 1e-12);
        }
    }
}

TEST(Distance, CubeVersusCenter) {
    std::mt19937_64 rng(12);
    BoxSet set = random_set(rng, 2, 30);
    for (int q = 0; q < 500; ++q) {
        DyadicCube c;
        c.dim = 2;
        c.level = 1 + static_cast<int>(rng() % 8);
        c.index[0] = static_cast<std::int64_t>(rng() % (1u << c.level));
        c.index[1] = static_cast<std::int64_t>(rng() % (1u << c.level));
        const double db = dist_box_to_set(c, set);
        const double dc = dist_point_to_set(c.center(), set);
        EXPECT_LE(db, dc + 1e-15);
        EXPECT_LE(dc - db, c.diam() / 2 + 1e-12);
    }
}

TEST(Distance, TriangleInequality) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BoxSet set = random_set(rng, 2, 20);
    for (int q = 0; q < 1000; ++q) {
        Vec p{u(rng), u(rng), 0}, r{u(rng), u(rng), 0};
        const double pr = std::hypot(p[0] - r[0], p[1] - r[1]);
        EXPECT_LE(dist_point_to_set(p, set), dist_point_to_set(r, set) + pr + 1e-12);
    }
}

TEST(Distance, ExactComparison) {
    BoxSet seg = make_set("segment", 0).normalize();
    const RationalBox& b = seg.boxes().front();
    std::mt19937_64 rng(14);
    for (int q = 0; q < 2000; ++q) {
        DyadicCube c;
        c.dim = 2;
        c.level = 2 + static_cast<int>(rng() % 8);
        c.index[0] = static_cast<std::int64_t>(rng() % (1u << c.level));
        c.index[1] = static_cast<std::int64_t>(rng() % (1u << c.level));
        for (int f : {1, 4}) {
            const double d = std::sqrt(sq_dist_box_box(c.dbox(), seg.dboxes().front(), 2));
            const double t = f * c.diam();
            const int got = compare_cube_box_dist_to_diam(c, b, f);
            if (std::abs(d - t) > 1e-9) EXPECT_EQ(got, d < t ? -1 : 1);
        }
    }
    // A tie: cube [0,1/4]x[0,1/4]... placed at distance exactly diam from a point.
    BoxSet pt = make_set("point", 0).normalize();  // (1/2, 1/2)
    DyadicCube c;
    c.dim = 2;
    c.level = 3;
    c.index = {6, 6, 0};  // [3/4, 7/8]^2, corner (3/4,3/4): dist = sqrt2/4 = 2 diam
    EXPECT_EQ(compare_cube_box_dist_to_diam(c, pt.boxes().front(), 2), 0);
}

TEST(Field, NodesAreExactAndLipschitz) {
    std::mt19937_64 rng(15);
    BoxSet set = random_set(rng, 2, 15);
    DistanceField f = compute_distance_field(set, 6);
    const std::size_t n = f.nodes_per_axis();
    ASSERT_EQ(n, 65u);
    const double h = f.spacing();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_NEAR(f.at(i, j), wdtest::brute_dist(set, Vec{f.coord(i), f.coord(j), 0}), 1e-12);
            if (i + 1 < n) EXPECT_LE(std::abs(f.at(i + 1, j) - f.at(i, j)), h + 1e-12);
            if (j + 1 < n) EXPECT_LE(std::abs(f.at(i, j + 1) - f.at(i, j)), h + 1e-12);
        }
}

TEST(Field, ZeroOnPointsOfE) {
    BoxSet pt = make_set("point", 0).normalize();
    DistanceField f = compute_distance_field(pt, 5);
    EXPECT_EQ(f.at(16, 16), 0.0);
    EXPECT_DOUBLE_EQ(f.at(0, 16), 0.5);
}

TEST(Field, ZeroInsideSolidBox) {
    BoxSet sq = make_set("square", 0).normalize();
    DistanceField f = compute_distance_field(sq, 9);
    for (std::size_t j = 128; j <= 384; j += 16)
        for (std::size_t i = 128; i <= 384; i += 16) ASSERT_EQ(f.at(i, j), 0.0);
    EXPECT_DOUBLE_EQ(f.at(0, 256), 0.25);
}

TEST(Field, BudgetAndLevelGuards) {
    BoxSet pt = make_set("point", 0).normalize();
    set_max_cells(1000);
    EXPECT_THROW(
        {
            try {
                compute_distance_field(pt, 6);
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::resource);
                throw;
            }
        },
        Error);
    set_max_cells(0);
    EXPECT_THROW(compute_distance_field(pt, 3), Error);
}

TEST(Packing, SeparatedInsideAndMonotone) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 5; ++trial) {
        BoxSet set = random_set(rng, 2, 10);
        std::size_t prev = 0;
        for (double r : {0.2, 0.1, 0.05, 0.025}) {
            auto pk = maximal_packing(set, r);
            ASSERT_FALSE(pk.empty());
            for (std::size_t a = 0; a < pk.size(); ++a) {
                EXPECT_LE(dist_point_to_set(pk[a], set), 1e-15);
                for (std::size_t b = a + 1; b < pk.size(); ++b)
                    EXPECT_GT(std::hypot(pk[a][0] - pk[b][0], pk[a][1] - pk[b][1]), 2 * r);
            }
            EXPECT_GE(pk.size(), prev) << "r=" << r;
            prev = pk.size();
        }
    }
}

TEST(BoxSet, NormalizeMapsIntoFrame) {
    BoxSet sq = make_set("square", 0);
    BoxSet n = sq.normalize();
    EXPECT_TRUE(n.normalized());
    EXPECT_EQ(n.boxes().front().lo[0], Rational(1, 4));
    EXPECT_EQ(n.boxes().front().side[0], Rational(1, 2));
    EXPECT_EQ(n.volume_sum(), Rational(1, 4));
    EXPECT_NEAR(n.diameter(), std::sqrt(0.5), 1e-15);
}
