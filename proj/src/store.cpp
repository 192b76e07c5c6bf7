#include "ragdesk/store.hpp"

#include <sqlite3.h>

#include <cstring>
#include <filesystem>
#include <map>

#include "ragdesk/json_io.hpp"

namespace ragdesk {
namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS bots (
  bot_id TEXT PRIMARY KEY,
  name TEXT NOT NULL UNIQUE,
  config TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS documents (
  bot_id TEXT NOT NULL REFERENCES bots(bot_id),
  doc_id INTEGER NOT NULL,
  record_id INTEGER,
  data TEXT NOT NULL,
  PRIMARY KEY(bot_id, doc_id)
);
CREATE TABLE IF NOT EXISTS chunks (
  bot_id TEXT NOT NULL,
  chunk_id INTEGER NOT NULL,
  doc_id INTEGER NOT NULL,
  data TEXT NOT NULL,
  vector BLOB NOT NULL,
  PRIMARY KEY(bot_id, chunk_id),
  FOREIGN KEY(bot_id, doc_id) REFERENCES documents(bot_id, doc_id)
);
CREATE TABLE IF NOT EXISTS records (
  record_id INTEGER PRIMARY KEY AUTOINCREMENT,
  bot_id TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  data TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS records_bot ON records(bot_id, created_at);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
    throw Error(ErrorCode::internal, what + ": " + (db ? sqlite3_errmsg(db) : "out of memory"));
}

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare");
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, const std::string& v) {
        check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int i, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Statement& bind_null(int i) {
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }
    Statement& bind_blob(int i, const void* data, std::size_t n) {
        check(sqlite3_bind_blob(stmt_, i, n ? data : "", static_cast<int>(n), SQLITE_TRANSIENT));
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        fail(db_, "step");
    }
    void run() {
        while (step()) {
        }
    }

    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    std::string text(int col) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }
    std::vector<float> floats(int col) const {
        const auto n = static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col));
        if (n % sizeof(float) != 0) throw Error(ErrorCode::corrupt_data, "vector blob has a partial float");
        std::vector<float> out(n / sizeof(float));
        if (n) std::memcpy(out.data(), sqlite3_column_blob(stmt_, col), n);
        return out;
    }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) fail(db_, "bind");
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Transaction {
public:
    explicit Transaction(sqlite3* db) : db_(db) { exec("BEGIN IMMEDIATE"); }
    ~Transaction() {
        if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit() {
        exec("COMMIT");
        done_ = true;
    }

private:
    void exec(const char* sql) {
        if (sqlite3_exec(db_, sql, nullptr, nullptr, nullptr) != SQLITE_OK) fail(db_, sql);
    }
    sqlite3* db_;
    bool done_ = false;
};

template <typename T>
T parse_row(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corrupt_data, std::string("stored row is not valid: ") + e.what());
    }
}

std::int64_t millis(Timestamp ts) { return ts.time_since_epoch().count(); }

}  // namespace

Store::Store(const std::string& path) {
    if (path != ":memory:") {
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
    }
    const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        throw Error(ErrorCode::internal, "cannot open database " + path + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=FULL");
    exec("PRAGMA foreign_keys=ON");
    exec(kSchema);
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const char* sql) const {
    char* msg = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &msg) != SQLITE_OK) {
        const std::string text = msg ? msg : "unknown error";
        sqlite3_free(msg);
        throw Error(ErrorCode::internal, "sqlite: " + text);
    }
}

void Store::insert_bot(const BotConfig& bot) {
    std::lock_guard lock(mutex_);
    Statement(db_, "INSERT INTO bots(bot_id, name, config) VALUES(?, ?, ?)")
        .bind(1, bot.bot_id)
        .bind(2, bot.name)
        .bind(3, bot_to_json(bot, true).dump())
        .run();
}

std::vector<BotConfig> Store::load_bots() const {
    std::lock_guard lock(mutex_);
    std::vector<BotConfig> out;
    Statement st(db_, "SELECT config FROM bots ORDER BY bot_id");
    while (st.step()) {
        try {
            out.push_back(bot_from_json(nlohmann::json::parse(st.text(0))));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::corrupt_data, std::string("stored bot is not valid: ") + e.what());
        }
    }
    return out;
}

BotData Store::load_bot(const std::string& bot_id) const {
    std::lock_guard lock(mutex_);
    BotData data;
    {
        Statement st(db_, "SELECT config FROM bots WHERE bot_id = ?");
        st.bind(1, bot_id);
        if (!st.step()) throw Error(ErrorCode::not_found, "no bot " + bot_id);
        data.config = bot_from_json(nlohmann::json::parse(st.text(0)));
    }
    {
        Statement st(db_, "SELECT data FROM documents WHERE bot_id = ? ORDER BY doc_id");
        st.bind(1, bot_id);
        while (st.step()) data.documents.push_back(parse_row<Document>(st.text(0)));
    }
    {
        Statement st(db_, "SELECT data, vector FROM chunks WHERE bot_id = ? ORDER BY chunk_id");
        st.bind(1, bot_id);
        while (st.step()) data.chunks.push_back({parse_row<Chunk>(st.text(0)), st.floats(1)});
    }
    {
        Statement st(db_, "SELECT data FROM records WHERE bot_id = ? ORDER BY record_id");
        st.bind(1, bot_id);
        while (st.step()) data.records.push_back(parse_row<InteractionRecord>(st.text(0)));
    }
    {
        Statement st(db_,
                     "SELECT doc_id, record_id FROM documents WHERE bot_id = ? AND record_id IS NOT NULL "
                     "ORDER BY doc_id");
        st.bind(1, bot_id);
        while (st.step()) {
            data.correction_links.emplace_back(DocId{static_cast<std::uint64_t>(st.integer(0))},
                                               RecordId{static_cast<std::uint64_t>(st.integer(1))});
        }
    }
    return data;
}

void Store::insert_document(const std::string& bot_id, const Document& doc, std::span<const Chunk> chunks,
                            std::span<const std::vector<float>> vectors, const InteractionRecord* correction) {
    if (chunks.size() != vectors.size()) throw Error(ErrorCode::internal, "chunk/vector count mismatch");
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    {
        Statement st(db_, "INSERT INTO documents(doc_id, bot_id, record_id, data) VALUES(?, ?, ?, ?)");
        st.bind(1, static_cast<std::int64_t>(doc.doc_id.value)).bind(2, bot_id);
        if (correction) {
            st.bind(3, static_cast<std::int64_t>(correction->record_id.value));
        } else {
            st.bind_null(3);
        }
        st.bind(4, nlohmann::json(doc).dump()).run();
    }
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        Statement(db_, "INSERT INTO chunks(chunk_id, doc_id, bot_id, data, vector) VALUES(?, ?, ?, ?, ?)")
            .bind(1, static_cast<std::int64_t>(chunks[i].chunk_id.value))
            .bind(2, static_cast<std::int64_t>(doc.doc_id.value))
            .bind(3, bot_id)
            .bind(4, nlohmann::json(chunks[i]).dump())
            .bind_blob(5, vectors[i].data(), vectors[i].size() * sizeof(float))
            .run();
    }
    if (correction) {
        Statement(db_, "UPDATE records SET data = ? WHERE record_id = ?")
            .bind(1, nlohmann::json(*correction).dump())
            .bind(2, static_cast<std::int64_t>(correction->record_id.value))
            .run();
    }
    tx.commit();
}

RecordId Store::insert_record(const InteractionRecord& record) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Statement(db_, "INSERT INTO records(bot_id, created_at, data) VALUES(?, ?, '{}')")
        .bind(1, record.bot_id)
        .bind(2, millis(record.created_at))
        .run();
    InteractionRecord stored = record;
    stored.record_id = RecordId{static_cast<std::uint64_t>(sqlite3_last_insert_rowid(db_))};
    Statement(db_, "UPDATE records SET data = ? WHERE record_id = ?")
        .bind(1, nlohmann::json(stored).dump())
        .bind(2, static_cast<std::int64_t>(stored.record_id.value))
        .run();
    tx.commit();
    return stored.record_id;
}

void Store::update_record(const InteractionRecord& record) {
    std::lock_guard lock(mutex_);
    Statement(db_, "UPDATE records SET data = ? WHERE record_id = ?")
        .bind(1, nlohmann::json(record).dump())
        .bind(2, static_cast<std::int64_t>(record.record_id.value))
        .run();
    if (sqlite3_changes(db_) != 1) {
        throw Error(ErrorCode::not_found, "no record " + std::to_string(record.record_id.value));
    }
}

std::uint64_t Store::max_doc_id(const std::string& bot_id) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT COALESCE(MAX(doc_id), 0) FROM documents WHERE bot_id = ?");
    st.bind(1, bot_id);
    st.step();
    return static_cast<std::uint64_t>(st.integer(0));
}

std::uint64_t Store::max_chunk_id(const std::string& bot_id) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT COALESCE(MAX(chunk_id), 0) FROM chunks WHERE bot_id = ?");
    st.bind(1, bot_id);
    st.step();
    return static_cast<std::uint64_t>(st.integer(0));
}

bool Store::record_id_taken(RecordId id, const std::string& except_bot) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT 1 FROM records WHERE record_id = ? AND bot_id <> ?");
    st.bind(1, static_cast<std::int64_t>(id.value)).bind(2, except_bot);
    return st.step();
}

void Store::delete_bot_rows(const std::string& bot_id) {
    for (const char* sql : {"DELETE FROM chunks WHERE bot_id = ?", "DELETE FROM documents WHERE bot_id = ?",
                            "DELETE FROM records WHERE bot_id = ?", "DELETE FROM bots WHERE bot_id = ?"}) {
        Statement(db_, sql).bind(1, bot_id).run();
    }
}

void Store::write_bot_rows(const BotData& data) {
    const std::string& bot_id = data.config.bot_id;
    Statement(db_, "INSERT INTO bots(bot_id, name, config) VALUES(?, ?, ?)")
        .bind(1, bot_id)
        .bind(2, data.config.name)
        .bind(3, bot_to_json(data.config, true).dump())
        .run();
    std::map<DocId, RecordId> links(data.correction_links.begin(), data.correction_links.end());
    for (const Document& doc : data.documents) {
        Statement st(db_, "INSERT INTO documents(doc_id, bot_id, record_id, data) VALUES(?, ?, ?, ?)");
        st.bind(1, static_cast<std::int64_t>(doc.doc_id.value)).bind(2, bot_id);
        if (const auto it = links.find(doc.doc_id); it != links.end()) {
            st.bind(3, static_cast<std::int64_t>(it->second.value));
        } else {
            st.bind_null(3);
        }
        st.bind(4, nlohmann::json(doc).dump()).run();
    }
    for (const StoredChunk& c : data.chunks) {
        Statement(db_, "INSERT INTO chunks(chunk_id, doc_id, bot_id, data, vector) VALUES(?, ?, ?, ?, ?)")
            .bind(1, static_cast<std::int64_t>(c.chunk.chunk_id.value))
            .bind(2, static_cast<std::int64_t>(c.chunk.doc_id.value))
            .bind(3, bot_id)
            .bind(4, nlohmann::json(c.chunk).dump())
            .bind_blob(5, c.vector.data(), c.vector.size() * sizeof(float))
            .run();
    }
    for (const InteractionRecord& r : data.records) {
        Statement(db_, "INSERT INTO records(record_id, bot_id, created_at, data) VALUES(?, ?, ?, ?)")
            .bind(1, static_cast<std::int64_t>(r.record_id.value))
            .bind(2, bot_id)
            .bind(3, millis(r.created_at))
            .bind(4, nlohmann::json(r).dump())
            .run();
    }
}

void Store::replace_bot(const BotData& data) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    delete_bot_rows(data.config.bot_id);
    write_bot_rows(data);
    tx.commit();
}

}  // namespace ragdesk
