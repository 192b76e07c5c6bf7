#pragma once

#include <nlohmann/json.hpp>

#include "ragdesk/bot_config.hpp"
#include "ragdesk/corpus.hpp"
#include "ragdesk/feedback.hpp"
#include "ragdesk/retrieval.hpp"

namespace ragdesk {

void to_json(nlohmann::json& j, const RetrievalConfig& cfg);
void from_json(const nlohmann::json& j, RetrievalConfig& cfg);

/// Public key is omitted unless include_secrets is set.
nlohmann::json bot_to_json(const BotConfig& bot, bool include_secrets);
BotConfig bot_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const Document& doc);
void from_json(const nlohmann::json& j, Document& doc);

void to_json(nlohmann::json& j, const Chunk& chunk);
void from_json(const nlohmann::json& j, Chunk& chunk);

void to_json(nlohmann::json& j, const InteractionRecord& record);
void from_json(const nlohmann::json& j, InteractionRecord& record);

void to_json(nlohmann::json& j, const ContextPassage& passage);

}  // namespace ragdesk
