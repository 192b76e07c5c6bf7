#include "ragdesk/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

#include "ragdesk/common.hpp"

namespace ragdesk {
namespace {

// Per-thread visited marks, reset in O(1) by bumping the epoch.
class VisitedSet {
public:
    void reset(std::size_t n) {
        if (marks_.size() < n) marks_.resize(n, 0);
        if (++epoch_ == 0) {
            std::fill(marks_.begin(), marks_.end(), 0);
            epoch_ = 1;
        }
    }
    bool insert(std::uint32_t node) {
        if (marks_[node] == epoch_) return false;
        marks_[node] = epoch_;
        return true;
    }

private:
    std::vector<std::uint32_t> marks_;
    std::uint32_t epoch_ = 0;
};

VisitedSet& visited_for_thread() {
    thread_local VisitedSet visited;
    return visited;
}

float distance(const float* a, const float* b, std::size_t n) { return 1.0f - dot_product(a, b, n); }

}  // namespace

float dot_product(const float* a, const float* b, std::size_t n) {
    float s0 = 0.f, s1 = 0.f, s2 = 0.f, s3 = 0.f;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

HnswGraph::HnswGraph(HnswParams params)
    : params_(params),
      level_mult_(params.m_neighbors > 1 ? 1.0 / std::log(static_cast<double>(params.m_neighbors))
                                         : 1.0),
      rng_(params.seed) {
    if (params_.m_neighbors < 2 || params_.ef_construction < 1) {
        throw Error(ErrorCode::invalid_argument, "HNSW requires M >= 2 and ef_construction >= 1");
    }
}

int HnswGraph::draw_level() {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = -std::log(1.0 - unit(rng_)) * level_mult_;
    return static_cast<int>(std::min(r, 32.0));
}

std::vector<HnswGraph::Neighbor> HnswGraph::search_layer(const float* query,
                                                         const std::vector<Neighbor>& entry_points,
                                                         std::size_t ef, int layer,
                                                         VectorTable vectors) const {
    VisitedSet& visited = visited_for_thread();
    visited.reset(levels_.size());

    std::priority_queue<Neighbor, std::vector<Neighbor>, std::greater<>> candidates;
    std::priority_queue<Neighbor> results;  // max-heap: worst on top
    for (const Neighbor& ep : entry_points) {
        if (!visited.insert(ep.second)) continue;
        candidates.push(ep);
        results.push(ep);
    }
    while (results.size() > ef) results.pop();

    while (!candidates.empty()) {
        const Neighbor current = candidates.top();
        if (current.first > results.top().first && results.size() >= ef) break;
        candidates.pop();

        for (std::uint32_t next : links_[current.second][static_cast<std::size_t>(layer)]) {
            if (!visited.insert(next)) continue;
            const float d = distance(query, vectors.row(next), vectors.dimension);
            if (results.size() < ef || d < results.top().first) {
                candidates.push({d, next});
                results.push({d, next});
                if (results.size() > ef) results.pop();
            }
        }
    }

    std::vector<Neighbor> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> HnswGraph::select_neighbors(const std::vector<Neighbor>& candidates,
                                                       std::size_t m, VectorTable vectors) const {
    std::vector<std::uint32_t> kept;
    if (candidates.size() <= m) {
        for (const Neighbor& c : candidates) kept.push_back(c.second);
        return kept;
    }
    for (const Neighbor& c : candidates) {
        if (kept.size() >= m) break;
        bool diverse = true;
        for (std::uint32_t r : kept) {
            if (distance(vectors.row(c.second), vectors.row(r), vectors.dimension) < c.first) {
                diverse = false;
                break;
            }
        }
        if (diverse) kept.push_back(c.second);
    }
    return kept;
}

void HnswGraph::insert(VectorTable vectors) {
    const auto node = static_cast<std::uint32_t>(levels_.size());
    const int level = draw_level();
    levels_.push_back(level);
    links_.emplace_back(static_cast<std::size_t>(level) + 1);

    if (max_level_ < 0) {
        entry_ = node;
        max_level_ = level;
        return;
    }

    const float* query = vectors.row(node);
    std::vector<Neighbor> eps{{distance(query, vectors.row(entry_), vectors.dimension), entry_}};

    for (int layer = max_level_; layer > level; --layer) {
        eps = {search_layer(query, eps, 1, layer, vectors).front()};
    }

    for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
        std::vector<Neighbor> found = search_layer(query, eps, params_.ef_construction, layer, vectors);
        const auto lyr = static_cast<std::size_t>(layer);
        std::vector<std::uint32_t> chosen = select_neighbors(found, params_.m_neighbors, vectors);
        links_[node][lyr] = chosen;

        for (std::uint32_t peer : chosen) {
            auto& peer_links = links_[peer][lyr];
            peer_links.push_back(node);
            if (peer_links.size() > max_links(layer)) {
                std::vector<Neighbor> pool;
                pool.reserve(peer_links.size());
                for (std::uint32_t other : peer_links) {
                    pool.push_back({distance(vectors.row(peer), vectors.row(other), vectors.dimension),
                                    other});
                }
                std::sort(pool.begin(), pool.end());
                peer_links = select_neighbors(pool, max_links(layer), vectors);
            }
        }
        eps = std::move(found);
    }

    if (level > max_level_) {
        max_level_ = level;
        entry_ = node;
    }
}

std::vector<HnswGraph::Neighbor> HnswGraph::search(const float* query, std::size_t k, std::size_t ef,
                                                   VectorTable vectors) const {
    if (levels_.empty() || k == 0) return {};
    std::vector<Neighbor> eps{{distance(query, vectors.row(entry_), vectors.dimension), entry_}};
    for (int layer = max_level_; layer > 0; --layer) {
        eps = {search_layer(query, eps, 1, layer, vectors).front()};
    }
    std::vector<Neighbor> found = search_layer(query, eps, std::max(ef, k), 0, vectors);
    if (found.size() > k) found.resize(k);
    return found;
}

bool HnswGraph::operator==(const HnswGraph& other) const {
    return params_ == other.params_ && rng_ == other.rng_ && levels_ == other.levels_ &&
           links_ == other.links_ && max_level_ == other.max_level_ && entry_ == other.entry_;
}

void HnswGraph::save(BinaryWriter& out) const {
    out.put<std::uint64_t>(params_.m_neighbors);
    out.put<std::uint64_t>(params_.ef_construction);
    out.put<std::uint64_t>(params_.seed);
    std::ostringstream rng_state;
    rng_state << rng_;
    out.put_string(rng_state.str());
    out.put<std::int32_t>(max_level_);
    out.put<std::uint32_t>(entry_);
    for (std::size_t node = 0; node < levels_.size(); ++node) {
        out.put<std::int32_t>(levels_[node]);
        for (const auto& layer : links_[node]) {
            out.put<std::uint32_t>(static_cast<std::uint32_t>(layer.size()));
            for (std::uint32_t peer : layer) out.put<std::uint32_t>(peer);
        }
    }
}

HnswGraph HnswGraph::load(BinaryReader& in, std::size_t node_count) {
    HnswParams params;
    params.m_neighbors = in.get<std::uint64_t>();
    params.ef_construction = in.get<std::uint64_t>();
    params.seed = in.get<std::uint64_t>();
    HnswGraph graph(params);
    std::istringstream rng_state(in.get_string());
    rng_state >> graph.rng_;
    if (rng_state.fail()) throw Error(ErrorCode::corrupt_data, "HNSW snapshot has a bad RNG state");
    graph.max_level_ = in.get<std::int32_t>();
    graph.entry_ = in.get<std::uint32_t>();
    graph.levels_.reserve(node_count);
    graph.links_.reserve(node_count);
    for (std::size_t node = 0; node < node_count; ++node) {
        const int level = in.get<std::int32_t>();
        if (level < 0 || level > 64) throw Error(ErrorCode::corrupt_data, "HNSW snapshot level out of range");
        graph.levels_.push_back(level);
        auto& layers = graph.links_.emplace_back(static_cast<std::size_t>(level) + 1);
        for (auto& layer : layers) {
            const auto count = in.get<std::uint32_t>();
            layer.resize(count);
            for (auto& peer : layer) {
                peer = in.get<std::uint32_t>();
                if (peer >= node_count) throw Error(ErrorCode::corrupt_data, "HNSW snapshot link out of range");
            }
        }
    }
    if (node_count > 0 && (graph.entry_ >= node_count || graph.max_level_ != graph.levels_[graph.entry_])) {
        throw Error(ErrorCode::corrupt_data, "HNSW snapshot entry point is inconsistent");
    }
    return graph;
}

}  // namespace ragdesk
