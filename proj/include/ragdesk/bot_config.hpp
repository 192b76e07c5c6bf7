#pragma once

#include <string>

#include "ragdesk/common.hpp"
#include "ragdesk/retrieval.hpp"

namespace ragdesk {

inline constexpr int kMinOpenness = 0;
inline constexpr int kMaxOpenness = 100;

struct BotConfig {
    std::string bot_id;
    std::string name;
    std::string greeting;
    int openness = 0;  // 0 = context only, 100 = unrestricted
    RetrievalConfig retrieval;
    std::string embedding_provider_ref;
    std::string llm_ref;
    std::string public_key;
    Timestamp created_at;

    /// Throws ErrorCode::invalid_argument on an empty name, an openness
    /// outside [0, 100] or an invalid retrieval block.
    void validate() const;
};

}  // namespace ragdesk
