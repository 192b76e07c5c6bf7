#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ragdesk/binary_io.hpp"

namespace ragdesk {

struct HnswParams {
    std::size_t m_neighbors = 16;
    std::size_t ef_construction = 200;
    std::uint64_t seed = 42;

    bool operator==(const HnswParams&) const = default;
};

/// Row-major table of unit vectors, addressed by node number.
struct VectorTable {
    const float* data = nullptr;
    std::size_t dimension = 0;

    const float* row(std::uint32_t node) const { return data + std::size_t{node} * dimension; }
};

float dot_product(const float* a, const float* b, std::size_t n);

/// Hierarchical navigable small-world graph over cosine distance (1 - dot) of
/// unit vectors. Nodes are numbered densely in insertion order; vector storage
/// lives outside the graph and is passed to every call.
///
/// Layer assignment draws from a seeded generator, so inserting the same
/// vectors in the same order always yields the same graph.
class HnswGraph {
public:
    using Neighbor = std::pair<float, std::uint32_t>;  // (distance, node)

    explicit HnswGraph(HnswParams params = {});

    /// Inserts node number size(); `vectors` must already contain its row.
    void insert(VectorTable vectors);

    /// Up to k nearest nodes, ascending by distance, from a beam of width
    /// max(ef, k) on the bottom layer.
    std::vector<Neighbor> search(const float* query, std::size_t k, std::size_t ef,
                                 VectorTable vectors) const;

    std::size_t size() const noexcept { return levels_.size(); }
    const HnswParams& params() const noexcept { return params_; }
    int max_level() const noexcept { return max_level_; }
    std::uint32_t entry_point() const noexcept { return entry_; }
    int level(std::uint32_t node) const { return levels_.at(node); }
    const std::vector<std::uint32_t>& neighbors(std::uint32_t node, int layer) const {
        return links_.at(node).at(static_cast<std::size_t>(layer));
    }

    bool operator==(const HnswGraph& other) const;

    void save(BinaryWriter& out) const;
    static HnswGraph load(BinaryReader& in, std::size_t node_count);

private:
    int draw_level();
    std::size_t max_links(int layer) const {
        return layer == 0 ? 2 * params_.m_neighbors : params_.m_neighbors;
    }

    // Beam search on one layer; returns up to ef nodes ascending by distance.
    std::vector<Neighbor> search_layer(const float* query, const std::vector<Neighbor>& entry_points,
                                       std::size_t ef, int layer, VectorTable vectors) const;

    // Diversity-preserving neighbor selection: keeps a candidate only if it is
    // closer to the base than to every neighbor already kept.
    std::vector<std::uint32_t> select_neighbors(const std::vector<Neighbor>& candidates,
                                                std::size_t m, VectorTable vectors) const;

    HnswParams params_;
    double level_mult_;
    std::mt19937_64 rng_;
    std::vector<int> levels_;
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // node -> layer -> neighbors
    int max_level_ = -1;
    std::uint32_t entry_ = 0;
};

}  // namespace ragdesk
