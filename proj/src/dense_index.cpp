#include "ragdesk/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ragdesk/binary_io.hpp"

namespace ragdesk {
namespace {

constexpr std::string_view kMagic = "RDDENSE_";

}  // namespace

double l2_norm(std::span<const float> v) {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * x;
    return std::sqrt(sum);
}

void normalize(std::span<float> v) {
    const double norm = l2_norm(v);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::invalid_argument, "cannot normalize a zero or non-finite vector");
    }
    for (float& x : v) x = static_cast<float>(x / norm);
}

DenseIndex::DenseIndex(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw Error(ErrorCode::invalid_argument, "dimension must be positive");
}

void DenseIndex::add_vectors(std::span<const std::pair<ChunkId, std::vector<float>>> pairs) {
    std::unordered_set<ChunkId> batch;
    std::vector<float> staged;
    staged.reserve(pairs.size() * dimension_);
    for (const auto& [id, vec] : pairs) {
        if (slot_of_.contains(id) || !batch.insert(id).second) {
            throw Error(ErrorCode::conflict, "chunk_ref " + std::to_string(id.value) + " already has a vector");
        }
        if (vec.size() != dimension_) {
            throw Error(ErrorCode::invalid_argument,
                        "vector for chunk_ref " + std::to_string(id.value) + " has dimension " +
                            std::to_string(vec.size()) + ", index expects " + std::to_string(dimension_));
        }
        const std::size_t at = staged.size();
        staged.insert(staged.end(), vec.begin(), vec.end());
        normalize(std::span<float>(staged.data() + at, dimension_));
    }

    data_.insert(data_.end(), staged.begin(), staged.end());
    for (const auto& [id, vec] : pairs) {
        slot_of_.emplace(id, static_cast<std::uint32_t>(ids_.size()));
        ids_.push_back(id);
        if (graph_) graph_->insert(table());
    }
}

std::vector<float> DenseIndex::normalized_query(std::span<const float> query) const {
    if (query.size() != dimension_) {
        throw Error(ErrorCode::invalid_argument, "query dimension " + std::to_string(query.size()) +
                                                     " does not match index dimension " +
                                                     std::to_string(dimension_));
    }
    std::vector<float> q(query.begin(), query.end());
    normalize(q);
    return q;
}

std::vector<ScoredHit> DenseIndex::search_exact(std::span<const float> query, std::size_t k) const {
    if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
    const std::vector<float> q = normalized_query(query);
    std::vector<ScoredHit> hits;
    hits.reserve(ids_.size());
    for (std::uint32_t slot = 0; slot < ids_.size(); ++slot) {
        hits.push_back({ids_[slot], dot_product(q.data(), table().row(slot), dimension_), Origin::dense});
    }
    rank_hits(hits, k);
    return hits;
}

void DenseIndex::build_ann(HnswParams params) {
    if (ids_.empty()) throw Error(ErrorCode::invalid_argument, "build_ann needs at least one vector");
    HnswGraph graph(params);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        graph.insert(VectorTable{data_.data(), dimension_});
    }
    graph_ = std::move(graph);
}

std::vector<ScoredHit> DenseIndex::search_ann(std::span<const float> query, std::size_t k,
                                              std::size_t ef_search) const {
    if (!graph_) throw Error(ErrorCode::invalid_argument, "ANN graph not built; call build_ann first");
    if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
    if (ef_search < k) throw Error(ErrorCode::invalid_argument, "ef_search must be at least k");
    if (ids_.size() < exact_threshold_) return search_exact(query, k);

    const std::vector<float> q = normalized_query(query);
    std::vector<ScoredHit> hits;
    for (const auto& [dist, slot] : graph_->search(q.data(), k, ef_search, table())) {
        hits.push_back({ids_[slot], dot_product(q.data(), table().row(slot), dimension_), Origin::dense});
    }
    rank_hits(hits, k);
    return hits;
}

std::vector<ScoredHit> DenseIndex::search(std::span<const float> query, std::size_t k,
                                          std::size_t ef_search) const {
    if (graph_) return search_ann(query, k, std::max(ef_search, k));
    return search_exact(query, k);
}

std::span<const float> DenseIndex::vector(ChunkId id) const {
    const auto it = slot_of_.find(id);
    if (it == slot_of_.end()) {
        throw Error(ErrorCode::not_found, "unknown chunk_ref " + std::to_string(id.value));
    }
    return {data_.data() + std::size_t{it->second} * dimension_, dimension_};
}

std::vector<ChunkId> DenseIndex::chunk_ids() const {
    std::vector<ChunkId> ids = ids_;
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string DenseIndex::save() const {
    BinaryWriter w;
    w.put_magic(kMagic);
    w.put<std::uint32_t>(kSnapshotVersion);
    w.put<std::uint64_t>(dimension_);
    w.put<std::uint64_t>(ids_.size());
    const HnswParams params = graph_ ? graph_->params() : HnswParams{};
    w.put<std::uint64_t>(params.m_neighbors);
    w.put<std::uint64_t>(params.ef_construction);
    w.put<std::uint64_t>(params.seed);
    w.put<std::uint64_t>(exact_threshold_);
    w.put<std::uint8_t>(graph_ ? 1 : 0);
    for (ChunkId id : ids_) w.put<std::uint64_t>(id.value);
    w.put_bytes(data_.data(), data_.size() * sizeof(float));
    if (graph_) graph_->save(w);
    return w.take();
}

DenseIndex DenseIndex::load(std::string_view bytes) {
    BinaryReader r(bytes);
    r.expect_magic(kMagic, "dense index snapshot");
    const auto version = r.get<std::uint32_t>();
    if (version != kSnapshotVersion) {
        throw Error(ErrorCode::version_mismatch,
                    "dense index snapshot version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kSnapshotVersion) + ")");
    }
    const auto dimension = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    r.get<std::uint64_t>();  // header copies of the HNSW params; the graph block is authoritative
    r.get<std::uint64_t>();
    r.get<std::uint64_t>();
    const auto threshold = r.get<std::uint64_t>();
    const bool has_graph = r.get<std::uint8_t>() != 0;

    DenseIndex index(dimension);
    index.exact_threshold_ = threshold;
    if (count > r.remaining() / (sizeof(std::uint64_t) + dimension * sizeof(float))) {
        throw Error(ErrorCode::corrupt_data, "dense snapshot truncated");
    }
    index.ids_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const ChunkId id{r.get<std::uint64_t>()};
        if (!index.slot_of_.emplace(id, static_cast<std::uint32_t>(i)).second) {
            throw Error(ErrorCode::corrupt_data, "dense snapshot repeats a chunk id");
        }
        index.ids_.push_back(id);
    }
    index.data_.resize(count * dimension);
    r.get_bytes(index.data_.data(), index.data_.size() * sizeof(float));
    if (has_graph) index.graph_ = HnswGraph::load(r, count);
    if (!r.at_end()) throw Error(ErrorCode::corrupt_data, "trailing bytes in dense snapshot");
    return index;
}

}  // namespace ragdesk
