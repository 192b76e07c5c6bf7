#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ragdesk/bot_config.hpp"
#include "ragdesk/corpus.hpp"
#include "ragdesk/feedback.hpp"

struct sqlite3;

namespace ragdesk {

struct StoredChunk {
    Chunk chunk;
    std::vector<float> vector;
};

/// Everything persisted for one bot.
struct BotData {
    BotConfig config;
    std::vector<Document> documents;
    std::vector<StoredChunk> chunks;  // ascending chunk id
    std::vector<InteractionRecord> records;
    std::vector<std::pair<DocId, RecordId>> correction_links;  // correction document -> record
};

/// Write-ahead-logged sqlite database. One connection, serialized by an
/// internal mutex; every mutation is a single transaction.
class Store {
public:
    /// ":memory:" opens a private in-memory database.
    explicit Store(const std::string& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    void insert_bot(const BotConfig& bot);
    std::vector<BotConfig> load_bots() const;
    BotData load_bot(const std::string& bot_id) const;

    /// Stores a document with its chunks and their vectors. When correction
    /// is set, the record is updated in the same transaction.
    void insert_document(const std::string& bot_id, const Document& doc, std::span<const Chunk> chunks,
                         std::span<const std::vector<float>> vectors,
                         const InteractionRecord* correction = nullptr);

    /// Assigns and returns the record id.
    RecordId insert_record(const InteractionRecord& record);
    void update_record(const InteractionRecord& record);

    /// Largest document and chunk ids stored for the bot (0 when none).
    std::uint64_t max_doc_id(const std::string& bot_id) const;
    std::uint64_t max_chunk_id(const std::string& bot_id) const;

    /// Replaces (or creates) all rows of one bot in a single transaction.
    void replace_bot(const BotData& data);
    bool record_id_taken(RecordId id, const std::string& except_bot) const;

private:
    void exec(const char* sql) const;
    void write_bot_rows(const BotData& data);
    void delete_bot_rows(const std::string& bot_id);

    sqlite3* db_ = nullptr;
    mutable std::mutex mutex_;
};

}  // namespace ragdesk
