#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "whitneydim/geometry.hpp"

namespace whitneydim {

/// dist(., E) sampled at the nodes of the level-K grid on [0,1]^d
/// (spacing h = 2^-K, (2^K + 1)^d nodes, x fastest).
class DistanceField {
public:
    DistanceField(std::shared_ptr<const BoxSet> source, int level, std::vector<double> values);

    int dim() const noexcept { return source_->dim(); }
    int level() const noexcept { return level_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t nodes_per_axis() const noexcept { return n_; }
    std::span<const double> values() const noexcept { return values_; }
    const BoxSet& source() const noexcept { return *source_; }
    std::shared_ptr<const BoxSet> source_ptr() const noexcept { return source_; }

    double at(std::size_t i) const noexcept { return values_[i]; }
    double at(std::size_t i, std::size_t j) const noexcept { return values_[j * n_ + i]; }
    std::span<const double> row(std::size_t j) const noexcept { return {values_.data() + j * n_, n_}; }
    double coord(std::size_t i) const noexcept { return static_cast<double>(i) * spacing_; }

private:
    std::shared_ptr<const BoxSet> source_;
    int level_;
    double spacing_;
    std::size_t n_;
    std::vector<double> values_;
};

/// Exact Euclidean distance at every node: a quadtree over node blocks prunes
/// E's boxes to those that can be nearest within each block, and the row
/// kernels take the exact minimum over the survivors.
/// Throws ErrorKind::resource above max_cells() nodes and
/// ErrorKind::invalid_params for K < 4.
DistanceField compute_distance_field(std::shared_ptr<const BoxSet> set, int level);
DistanceField compute_distance_field(const BoxSet& set, int level);

}  // namespace whitneydim
