#pragma once

#include <cstddef>
#include <vector>

#include "ragdesk/common.hpp"

namespace ragdesk {

enum class Origin { sparse, dense };

struct ScoredHit {
    ChunkId chunk;
    double score = 0.0;
    Origin origin = Origin::sparse;

    bool operator==(const ScoredHit&) const = default;
};

/// Orders hits by descending score, ties by ascending chunk id, and keeps at
/// most k of them.
void rank_hits(std::vector<ScoredHit>& hits, std::size_t k);

}  // namespace ragdesk
