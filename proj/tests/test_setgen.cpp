#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "whitneydim/boxset_io.hpp"
#include "whitneydim/error.hpp"
#include "whitneydim/setgen.hpp"

using namespace whitneydim;

namespace {

bool box_inside(const RationalBox& in, const RationalBox& out, int dim) {
    for (int a = 0; a < dim; ++a)
        if (in.lo[a] < out.lo[a] || in.hi(a) > out.hi(a)) return false;
    return true;
}

}  // namespace

class IfsNesting : public ::testing::TestWithParam<std::string> {};

TEST_P(IfsNesting, EachStageInsideThePrevious) {
    IfsSpec spec = builtin_ifs(GetParam());
    for (int depth = 0; depth < 4; ++depth) {
        BoxSet coarse = ifs_generate(spec, depth);
        BoxSet fine = ifs_generate(spec, depth + 1);
        EXPECT_EQ(fine.size(), coarse.size() * spec.maps.size());
        for (const auto& b : fine.boxes()) {
            bool found = false;
            for (const auto& c : coarse.boxes()) found = found || box_inside(b, c, fine.dim());
            ASSERT_TRUE(found) << GetParam() << " depth " << depth + 1;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Builtins, IfsNesting,
                         ::testing::Values("cantor3", "cantor3x3", "sierpinski-carpet", "vicsek", "cantor3-line"));

TEST(Ifs, SimilarityDimensions) {
    EXPECT_NEAR(builtin_ifs("cantor3").similarity_dim(), std::log(2.0) / std::log(3.0), 1e-12);
    EXPECT_NEAR(builtin_ifs("cantor3x3").similarity_dim(), std::log(4.0) / std::log(3.0), 1e-12);
    EXPECT_NEAR(builtin_ifs("sierpinski-carpet").similarity_dim(), std::log(8.0) / std::log(3.0), 1e-12);
    // 0.5^s + 2 * 0.25^s = 1 has root s = 1.
    EXPECT_NEAR(moran_dimension({0.5, 0.25, 0.25}), 1.0, 1e-10);
}

TEST(Ifs, CantorBoxesAreExactThirds) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3"), 3);
    ASSERT_EQ(c.size(), 8u);
    EXPECT_EQ(c.boxes()[0].side[0], Rational(1, 27));
    EXPECT_EQ(c.boxes()[1].lo[0], Rational(2, 27));
    EXPECT_EQ(c.boxes()[7].lo[0], Rational(26, 27));
    EXPECT_NEAR(c.meta()["resolution"].get<double>(), 1.0 / 27, 1e-15);
}

TEST(Setgen, UnknownNameIsConfigError) {
    try {
        make_set("no-such-set", 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(ThickCantor, ClosedForms) {
    ThickCantorParams p = parse_thick_cantor("J=2,n=2:6,s=2:1.5");
    ThickCantorInstance inst = thick_cantor_generate(p);
    ASSERT_EQ(inst.stages.size(), 3u);
    const auto& s1 = inst.stages[1];
    const auto& s2 = inst.stages[2];
    EXPECT_EQ(s1.count, 16u);
    EXPECT_EQ(s2.count, 65536u);
    EXPECT_EQ(s1.side, QSqrt2(Rational(1, 4)));
    // lambda_2 = 2^{-3/2}, so lambda_2^6 = 2^-9 and l_2 = 2^-11.
    EXPECT_EQ(thick_cantor_lambda(2), QSqrt2(Rational(0), Rational(1, 4)));
    EXPECT_EQ(s2.side, QSqrt2(Rational(1, 2048)));
    ASSERT_TRUE(s2.gap.has_value());
    EXPECT_EQ(*s2.gap, QSqrt2(Rational(-2, 2048), Rational(2, 2048)));
    EXPECT_TRUE(s2.gap_verified);
    ASSERT_TRUE(s2.probe.has_value());
    EXPECT_GT(*s2.probe, 0.0);
}

TEST(ThickCantor, OddStageKeepsArea) {
    ThickCantorInstance inst = thick_cantor_generate(parse_thick_cantor("J=3,n=1:2:1,s=2:1.5:1.5"));
    ASSERT_EQ(inst.stages.size(), 4u);
    EXPECT_EQ(inst.stages[3].count, inst.stages[2].count * 4);
    EXPECT_TRUE(inst.stages[3].area_verified);
    const QSqrt2 a2 = QSqrt2(Rational(static_cast<std::int64_t>(inst.stages[2].count))) * inst.stages[2].side *
                      inst.stages[2].side;
    const QSqrt2 a3 = QSqrt2(Rational(static_cast<std::int64_t>(inst.stages[3].count))) * inst.stages[3].side *
                      inst.stages[3].side;
    EXPECT_EQ(a2, a3);
}

TEST(ThickCantor, BadParameters) {
    EXPECT_THROW(thick_cantor_generate(parse_thick_cantor("J=2,n=2,s=2:1.5")), Error);
    EXPECT_THROW(parse_thick_cantor("J=two"), Error);
}

TEST(BoxsetIo, RoundTrip) {
    BoxSet c = ifs_generate(builtin_ifs("cantor3x3"), 2).normalize();
    const auto path = std::filesystem::temp_directory_path() / "wd_roundtrip.json";
    write_boxset(c, path);
    BoxSet back = read_boxset(path);
    std::filesystem::remove(path);
    EXPECT_EQ(back.dim(), c.dim());
    EXPECT_EQ(back.boxes(), c.boxes());
    EXPECT_TRUE(back.normalized());
}

TEST(Raster, ThresholdedPixels) {
    const auto path = std::filesystem::temp_directory_path() / "wd_raster.pgm";
    {
        std::ofstream out(path);
        out << "P2\n4 2\n255\n0 255 0 0\n0 0 0 200\n";
    }
    BoxSet r = load_raster(path, 128);
    std::filesystem::remove(path);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(r.normalized());
    EXPECT_EQ(r.volume_sum(), Rational(2, 64));
}
