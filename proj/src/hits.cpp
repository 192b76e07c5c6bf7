#include "ragdesk/hits.hpp"

#include <algorithm>

namespace ragdesk {

void rank_hits(std::vector<ScoredHit>& hits, std::size_t k) {
    const auto better = [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk < b.chunk;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                          better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
}

}  // namespace ragdesk
