#include "ragdesk/json_io.hpp"

namespace ragdesk {
namespace {

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

void to_json(nlohmann::json& j, const RetrievalConfig& cfg) {
    j = nlohmann::json{{"k_sparse", cfg.k_sparse},         {"k_dense", cfg.k_dense},
                       {"k_final", cfg.k_final},           {"fusion", to_string(cfg.fusion)},
                       {"rrf_constant", cfg.rrf_constant}, {"weight_dense", cfg.weight_dense},
                       {"reranker_id", cfg.reranker_id},   {"ef_search", cfg.ef_search}};
}

void from_json(const nlohmann::json& j, RetrievalConfig& cfg) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "retrieval must be an object");
    read_optional(j, "k_sparse", cfg.k_sparse);
    read_optional(j, "k_dense", cfg.k_dense);
    read_optional(j, "k_final", cfg.k_final);
    if (const auto it = j.find("fusion"); it != j.end()) cfg.fusion = parse_fusion(it->get<std::string>());
    read_optional(j, "rrf_constant", cfg.rrf_constant);
    read_optional(j, "weight_dense", cfg.weight_dense);
    read_optional(j, "reranker_id", cfg.reranker_id);
    read_optional(j, "ef_search", cfg.ef_search);
}

nlohmann::json bot_to_json(const BotConfig& bot, bool include_secrets) {
    nlohmann::json j = {{"bot_id", bot.bot_id},
                        {"name", bot.name},
                        {"greeting", bot.greeting},
                        {"openness", bot.openness},
                        {"retrieval", bot.retrieval},
                        {"embedding_provider_ref", bot.embedding_provider_ref},
                        {"llm_ref", bot.llm_ref},
                        {"created_at", format_timestamp(bot.created_at)}};
    if (include_secrets) j["public_key"] = bot.public_key;
    return j;
}

BotConfig bot_from_json(const nlohmann::json& j) {
    BotConfig bot;
    j.at("bot_id").get_to(bot.bot_id);
    j.at("name").get_to(bot.name);
    read_optional(j, "greeting", bot.greeting);
    j.at("openness").get_to(bot.openness);
    if (const auto it = j.find("retrieval"); it != j.end()) it->get_to(bot.retrieval);
    read_optional(j, "embedding_provider_ref", bot.embedding_provider_ref);
    read_optional(j, "llm_ref", bot.llm_ref);
    read_optional(j, "public_key", bot.public_key);
    bot.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    return bot;
}

void to_json(nlohmann::json& j, const Document& doc) {
    j = nlohmann::json{{"doc_id", doc.doc_id.value},
                       {"source_name", doc.source_name},
                       {"raw_text", doc.raw_text},
                       {"format", to_string(doc.format)},
                       {"ingested_at", format_timestamp(doc.ingested_at)}};
}

void from_json(const nlohmann::json& j, Document& doc) {
    doc.doc_id = DocId{j.at("doc_id").get<std::uint64_t>()};
    j.at("source_name").get_to(doc.source_name);
    j.at("raw_text").get_to(doc.raw_text);
    doc.format = parse_format(j.at("format").get<std::string>());
    doc.ingested_at = parse_timestamp(j.at("ingested_at").get<std::string>());
}

void to_json(nlohmann::json& j, const Chunk& chunk) {
    j = nlohmann::json{{"chunk_id", chunk.chunk_id.value}, {"doc_id", chunk.doc_id.value},
                       {"heading", chunk.heading},         {"body", chunk.body},
                       {"token_count", chunk.token_count}, {"ordinal", chunk.ordinal}};
}

void from_json(const nlohmann::json& j, Chunk& chunk) {
    chunk.chunk_id = ChunkId{j.at("chunk_id").get<std::uint64_t>()};
    chunk.doc_id = DocId{j.at("doc_id").get<std::uint64_t>()};
    j.at("heading").get_to(chunk.heading);
    j.at("body").get_to(chunk.body);
    j.at("token_count").get_to(chunk.token_count);
    j.at("ordinal").get_to(chunk.ordinal);
}

void to_json(nlohmann::json& j, const InteractionRecord& r) {
    nlohmann::json passages = nlohmann::json::array();
    for (ChunkId id : r.passages_used) passages.push_back(id.value);
    nlohmann::json audit = nlohmann::json::array();
    for (const AuditEntry& a : r.audit) audit.push_back({{"at", format_timestamp(a.at)}, {"event", a.event}});

    j = nlohmann::json{{"record_id", r.record_id.value},
                       {"session_id", r.session_id},
                       {"bot_id", r.bot_id},
                       {"question", r.question},
                       {"answer", r.answer},
                       {"passages_used", std::move(passages)},
                       {"rating", r.rating ? nlohmann::json(to_string(*r.rating)) : nlohmann::json()},
                       {"correction", r.correction ? nlohmann::json(*r.correction) : nlohmann::json()},
                       {"correction_author",
                        r.correction_author ? nlohmann::json(*r.correction_author) : nlohmann::json()},
                       {"created_at", format_timestamp(r.created_at)},
                       {"corrected_at",
                        r.corrected_at ? nlohmann::json(format_timestamp(*r.corrected_at)) : nlohmann::json()},
                       {"failed", r.failed},
                       {"degraded", r.degraded},
                       {"audit", std::move(audit)}};
}

void from_json(const nlohmann::json& j, InteractionRecord& r) {
    r.record_id = RecordId{j.at("record_id").get<std::uint64_t>()};
    j.at("session_id").get_to(r.session_id);
    j.at("bot_id").get_to(r.bot_id);
    j.at("question").get_to(r.question);
    j.at("answer").get_to(r.answer);
    r.passages_used.clear();
    for (const auto& id : j.at("passages_used")) r.passages_used.push_back(ChunkId{id.get<std::uint64_t>()});
    r.rating.reset();
    if (const auto it = j.find("rating"); it != j.end() && !it->is_null()) {
        r.rating = parse_rating(it->get<std::string>());
    }
    r.correction.reset();
    if (const auto it = j.find("correction"); it != j.end() && !it->is_null()) r.correction = it->get<std::string>();
    r.correction_author.reset();
    if (const auto it = j.find("correction_author"); it != j.end() && !it->is_null()) {
        r.correction_author = it->get<std::string>();
    }
    r.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    r.corrected_at.reset();
    if (const auto it = j.find("corrected_at"); it != j.end() && !it->is_null()) {
        r.corrected_at = parse_timestamp(it->get<std::string>());
    }
    read_optional(j, "failed", r.failed);
    read_optional(j, "degraded", r.degraded);
    r.audit.clear();
    if (const auto it = j.find("audit"); it != j.end()) {
        for (const auto& a : *it) {
            r.audit.push_back({parse_timestamp(a.at("at").get<std::string>()), a.at("event").get<std::string>()});
        }
    }
}

void to_json(nlohmann::json& j, const ContextPassage& p) {
    nlohmann::json provenance = nlohmann::json::array();
    if (p.provenance.sparse) provenance.push_back("sparse");
    if (p.provenance.dense) provenance.push_back("dense");
    j = nlohmann::json{{"chunk_id", p.chunk.value},      {"heading", p.heading},
                       {"body", p.body},                 {"fused_score", p.fused_score},
                       {"rerank_score", p.rerank_score}, {"provenance", std::move(provenance)}};
}

}  // namespace ragdesk
