#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ragdesk/hits.hpp"
#include "ragdesk/hnsw.hpp"

namespace ragdesk {

/// Chunk-aligned store of unit vectors with exhaustive cosine search and an
/// optional HNSW layer. Not internally synchronized.
class DenseIndex {
public:
    static constexpr std::size_t kDefaultExactThreshold = 1000;
    static constexpr std::uint32_t kSnapshotVersion = 1;

    explicit DenseIndex(std::size_t dimension);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool contains(ChunkId id) const { return slot_of_.contains(id); }

    /// Stores normalized copies. Rejects the whole batch on a duplicate id, a
    /// dimension mismatch or a zero/non-finite vector. Extends the ANN graph
    /// when one is present.
    void add_vectors(std::span<const std::pair<ChunkId, std::vector<float>>> pairs);

    std::vector<ScoredHit> search_exact(std::span<const float> query, std::size_t k) const;

    /// Builds the HNSW graph over every stored vector in insertion order.
    void build_ann(HnswParams params = {});
    bool has_ann() const noexcept { return graph_.has_value(); }
    const HnswGraph* ann_graph() const noexcept { return graph_ ? &*graph_ : nullptr; }

    /// Approximate top-k. Below exact_threshold() stored vectors this is
    /// search_exact.
    std::vector<ScoredHit> search_ann(std::span<const float> query, std::size_t k,
                                      std::size_t ef_search = 100) const;

    /// search_ann when a graph exists, search_exact otherwise.
    std::vector<ScoredHit> search(std::span<const float> query, std::size_t k,
                                  std::size_t ef_search = 100) const;

    std::size_t exact_threshold() const noexcept { return exact_threshold_; }
    void set_exact_threshold(std::size_t n) noexcept { exact_threshold_ = n; }

    std::span<const float> vector(ChunkId id) const;
    std::vector<ChunkId> chunk_ids() const;

    std::string save() const;
    static DenseIndex load(std::string_view bytes);

private:
    std::vector<float> normalized_query(std::span<const float> query) const;
    VectorTable table() const { return {data_.data(), dimension_}; }

    std::size_t dimension_;
    std::vector<ChunkId> ids_;
    std::vector<float> data_;
    std::unordered_map<ChunkId, std::uint32_t> slot_of_;
    std::optional<HnswGraph> graph_;
    std::size_t exact_threshold_ = kDefaultExactThreshold;
};

double l2_norm(std::span<const float> v);

/// Scales v to unit length in place; throws on a zero or non-finite vector.
void normalize(std::span<float> v);

}  // namespace ragdesk
