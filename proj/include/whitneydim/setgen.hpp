#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "whitneydim/geometry.hpp"
#include "whitneydim/qsqrt2.hpp"

namespace whitneydim {

/// x -> ratio * P x + t, with P a signed permutation matrix
/// (row a picks source axis perm[a] with sign flip[a]).
struct SimilarityMap {
    Rational ratio;
    std::array<Rational, kMaxDim> translation{};
    std::array<int, kMaxDim> perm{0, 1, 2};
    std::array<int, kMaxDim> flip{1, 1, 1};
};

enum class Initiator { unit_cube, unit_segment };

struct IfsSpec {
    std::string name;
    int dim = 2;
    std::vector<SimilarityMap> maps;
    Initiator initiator = Initiator::unit_cube;
    /// Pre-fractals are embedded at this y offset when the maps act on d = 1
    /// but the set lives in the plane (cantor3-line). Unused otherwise.
    std::optional<Rational> embed_y;

    double similarity_dim() const;
    /// Largest ratio; resolution of the depth-n pre-fractal is max_ratio^n.
    double max_ratio() const;
};

/// Root s of sum_i r_i^s = 1.
double moran_dimension(const std::vector<double>& ratios);

const std::vector<std::string>& builtin_ifs_names();
IfsSpec builtin_ifs(std::string_view name);
/// Depth-th pre-fractal as exact boxes in canonical (lexicographic) order.
BoxSet ifs_generate(const IfsSpec& spec, int depth);

/// Simple sets: point, point1d, segment, square, two-points, point-segment.
const std::vector<std::string>& builtin_simple_names();
/// A named IFS (at `depth`) or simple set, or a JSON box set file.
BoxSet make_set(std::string_view name_or_path, int depth);

struct ThickCantorParams {
    int stages = 2;
    std::vector<int> n{2, 6};
    std::vector<double> s{2.0, 1.5};
};

/// "J=2,n=2:6,s=2:1.5" (list items separated by ':').
ThickCantorParams parse_thick_cantor(std::string_view text);

/// Stage contraction: 1/2 for odd j, 2^{-1-1/j} for even j. Exact only when
/// it lies in Q(sqrt 2), i.e. for j = 2 among even stages.
QSqrt2 thick_cantor_lambda(int j);

struct ThickCantorStage {
    int j = 0;
    QSqrt2 lambda;
    QSqrt2 side;                   ///< l_j
    std::uint64_t count = 0;       ///< #Q_j
    std::vector<std::array<QSqrt2, 2>> corners;  ///< lower-left corners, lexicographic
    std::optional<QSqrt2> gap;     ///< D_j (even j), closed form
    std::optional<QSqrt2> min_gap; ///< smallest generated pairwise gap (even j)
    std::uint64_t contacts = 0;    ///< touching pairs (even j); they sit on stage-1 tile seams
    std::optional<double> probe;   ///< d_j (even j)
    bool gap_verified = false;     ///< smallest positive generated gap equals D_j exactly
    bool area_verified = false;    ///< odd j: union area equals that of stage j-1
};

struct ThickCantorInstance {
    ThickCantorParams params;
    std::vector<ThickCantorStage> stages;  ///< Q_0 .. Q_J

    /// Final stage rounded to the 2^-bits dyadic grid (corners and side).
    BoxSet to_boxset(int bits = 48) const;
};

ThickCantorInstance thick_cantor_generate(const ThickCantorParams& params);

/// PGM (P2 or P5, maxval <= 255). Pixels >= threshold become cells of side
/// 1/max(W,H); row 0 is the top of the image. Result is normalized.
BoxSet load_raster(const std::filesystem::path& path, int threshold);

}  // namespace whitneydim
