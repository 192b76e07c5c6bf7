#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragdesk/bot_config.hpp"
#include "ragdesk/corpus.hpp"
#include "ragdesk/dense_index.hpp"
#include "ragdesk/embedding.hpp"
#include "ragdesk/feedback.hpp"
#include "ragdesk/generation.hpp"
#include "ragdesk/retrieval.hpp"
#include "ragdesk/sparse_index.hpp"
#include "ragdesk/store.hpp"

namespace ragdesk {

struct Providers {
    std::shared_ptr<const EmbeddingProvider> embedder;
    std::shared_ptr<LlmClient> llm;
    std::shared_ptr<const Reranker> reranker;  // external; optional
};

struct ServiceOptions {
    std::string database = ":memory:";
    ChunkerConfig chunker;
    TokenizerConfig tokenizer;
    Bm25Params bm25;
    HnswParams hnsw;
    std::size_t ann_threshold = DenseIndex::kDefaultExactThreshold;
    RetryPolicy retry;
    Clock clock = now_utc;
};

struct CreateBotRequest {
    std::string name;
    std::string greeting;
    int openness = 0;
    std::optional<RetrievalConfig> retrieval;
};

struct UploadRequest {
    std::string source_name;
    std::string format;  // empty: inferred from source_name
    std::string content;
};

struct IngestionReport {
    DocId doc_id;
    std::size_t chunk_count = 0;
    std::size_t token_total = 0;
};

struct QueryResponse {
    std::string answer;
    std::vector<ContextPassage> passages;
    RecordId record_id;
    bool degraded = false;
    bool query_truncated = false;
    std::string session_id;
};

/// The pipeline failed after the question was accepted; the failed exchange
/// has been recorded under record_id.
class QueryFailure : public Error {
public:
    QueryFailure(ErrorCode code, const std::string& message, RecordId record, std::string session)
        : Error(code, message), record_id(record), session_id(std::move(session)) {}
    RecordId record_id;
    std::string session_id;
};

struct CorrectionReport {
    InteractionRecord record;
    IngestionReport ingestion;
};

struct BotStats {
    std::size_t documents = 0;
    std::size_t chunks = 0;
    std::size_t records = 0;
    std::size_t vocab_size = 0;
    bool has_ann = false;
    bool parity = true;
};

inline constexpr std::uint32_t kArchiveVersion = 1;

/// Shared core behind the HTTP API and the CLI. Mutations of one bot are
/// serialized; queries run concurrently with each other and with mutations
/// of other bots.
class Service {
public:
    Service(ServiceOptions options, Providers providers);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    BotConfig create_bot(const CreateBotRequest& request);
    BotConfig bot(const std::string& bot_id) const;
    std::vector<BotConfig> bots() const;
    std::optional<BotConfig> find_bot_by_name(const std::string& name) const;
    bool check_bot_key(const std::string& bot_id, const std::string& key) const;

    IngestionReport upload_document(const std::string& bot_id, const UploadRequest& request);

    /// An empty session id starts a new session.
    QueryResponse query(const std::string& bot_id, const std::string& session_id, const std::string& text);

    RetrievalResult retrieve(const std::string& bot_id, const std::string& text) const;
    std::vector<ChunkId> retrieve_ids(const std::string& bot_id, RetrievalMode mode, const std::string& text,
                                      std::size_t k) const;

    InteractionRecord rate(RecordId id, Rating rating);
    CorrectionReport submit_correction(RecordId id, const std::string& text, const std::string& author);
    InteractionRecord record(RecordId id) const;
    /// Documents created by corrections of the record, oldest first.
    std::vector<DocId> correction_documents(RecordId id) const;
    std::vector<InteractionRecord> list_records(const std::string& bot_id, Timestamp from, Timestamp to,
                                                RecordFilter filter) const;

    /// Rebuilds both indexes from the stored chunks.
    BotStats rebuild(const std::string& bot_id);
    BotStats stats(const std::string& bot_id) const;
    /// Sparse index, dense index and corpus cover the same chunk ids.
    bool check_parity(const std::string& bot_id) const;
    std::vector<Chunk> chunks(const std::string& bot_id) const;
    std::vector<Document> documents(const std::string& bot_id) const;

    std::string snapshot(const std::string& bot_id) const;
    BotConfig restore(std::string_view archive, bool replace);

    const Providers& providers() const noexcept { return providers_; }
    const ServiceOptions& options() const noexcept { return options_; }

private:
    struct Session;
    struct BotState;

    std::shared_ptr<BotState> state_of(const std::string& bot_id) const;
    std::shared_ptr<BotState> state_of(RecordId id) const;
    std::shared_ptr<BotState> make_state(BotData data) const;
    const Reranker& reranker_for(const BotConfig& bot) const;
    std::string random_token(std::size_t hex_digits);
    IngestionReport ingest_locked(BotState& state, Document doc, const InteractionRecord* correction);
    void maintain_ann(BotState& state) const;

    ServiceOptions options_;
    Providers providers_;
    Store store_;
    LexicalOverlapReranker lexical_;

    mutable std::shared_mutex bots_mutex_;
    std::map<std::string, std::shared_ptr<BotState>> bots_;
    std::unordered_map<RecordId, std::string> record_owner_;  // guarded by bots_mutex_

    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

/// HTML snippet embedding the chat widget for a bot.
std::string embed_snippet(const BotConfig& bot);

}  // namespace ragdesk
