#include "ragdesk/service.hpp"

#include <algorithm>
#include <mutex>

#include "ragdesk/binary_io.hpp"
#include "ragdesk/json_io.hpp"

namespace ragdesk {

struct Service::Session {
    std::mutex mutex;
    std::vector<Turn> history;
};

struct Service::BotState {
    BotState(BotConfig cfg, const ServiceOptions& options, std::size_t dimension)
        : config(std::move(cfg)), sparse(options.bm25, options.tokenizer), dense(dimension) {
        dense.set_exact_threshold(options.ann_threshold);
    }

    const BotConfig config;

    mutable std::shared_mutex index_mutex;
    Corpus corpus;
    std::multimap<RecordId, DocId> corrections;
    SparseIndex sparse;
    DenseIndex dense;

    std::mutex write_mutex;
    std::uint64_t next_doc = 1;
    std::uint64_t next_chunk = 1;

    mutable std::mutex records_mutex;
    std::map<RecordId, InteractionRecord> records;

    std::mutex sessions_mutex;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions;

    std::shared_ptr<Session> session(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto& s = sessions[id];
        if (!s) s = std::make_shared<Session>();
        return s;
    }

    bool parity() const {
        const std::vector<ChunkId> sparse_ids = sparse.chunk_ids();
        if (sparse_ids != dense.chunk_ids() || sparse_ids.size() != corpus.chunk_count()) return false;
        std::size_t i = 0;
        for (const auto& [id, chunk] : corpus.chunks()) {
            if (sparse_ids[i++] != id) return false;
        }
        return true;
    }
};

namespace {

void remember_turn(std::vector<Turn>& history, const std::string& question, const std::string& answer) {
    history.push_back({"user", question});
    history.push_back({"assistant", answer});
    if (history.size() > kHistoryTurns) history.erase(history.begin(), history.end() - kHistoryTurns);
}

std::vector<std::pair<ChunkId, std::vector<float>>> pair_vectors(std::span<const Chunk> chunks,
                                                                 std::vector<std::vector<float>> vectors) {
    std::vector<std::pair<ChunkId, std::vector<float>>> out;
    out.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) out.emplace_back(chunks[i].chunk_id, std::move(vectors[i]));
    return out;
}

}  // namespace

Service::Service(ServiceOptions options, Providers providers)
    : options_(std::move(options)),
      providers_(std::move(providers)),
      store_(options_.database),
      lexical_(options_.tokenizer),
      rng_(std::random_device{}()) {
    if (!providers_.embedder) throw Error(ErrorCode::invalid_argument, "an embedding provider is required");
    if (!providers_.llm) throw Error(ErrorCode::invalid_argument, "an LLM client is required");
    if (!options_.clock) options_.clock = now_utc;

    for (const BotConfig& cfg : store_.load_bots()) {
        auto state = make_state(store_.load_bot(cfg.bot_id));
        for (const auto& [id, r] : state->records) record_owner_[id] = cfg.bot_id;
        bots_[cfg.bot_id] = std::move(state);
    }
}

Service::~Service() = default;

std::shared_ptr<Service::BotState> Service::make_state(BotData data) const {
    if (data.config.embedding_provider_ref != providers_.embedder->provider_id()) {
        throw Error(ErrorCode::invalid_argument,
                    "bot " + data.config.bot_id + " was built with embedding provider '" +
                        data.config.embedding_provider_ref + "' but the service uses '" +
                        providers_.embedder->provider_id() + "'");
    }
    auto state = std::make_shared<BotState>(data.config, options_, providers_.embedder->dimension());

    std::map<DocId, std::vector<Chunk>> by_doc;
    std::vector<Chunk> all;
    std::vector<std::pair<ChunkId, std::vector<float>>> vectors;
    for (StoredChunk& c : data.chunks) {
        by_doc[c.chunk.doc_id].push_back(c.chunk);
        all.push_back(c.chunk);
        vectors.emplace_back(c.chunk.chunk_id, std::move(c.vector));
        state->next_chunk = std::max(state->next_chunk, c.chunk.chunk_id.value + 1);
    }
    for (Document& doc : data.documents) {
        state->next_doc = std::max(state->next_doc, doc.doc_id.value + 1);
        const DocId id = doc.doc_id;
        state->corpus.add_document(std::move(doc), std::move(by_doc[id]));
    }
    state->sparse.add_chunks(all);
    state->dense.add_vectors(vectors);
    if (!state->dense.has_ann() && state->dense.size() >= options_.ann_threshold) {
        state->dense.build_ann(options_.hnsw);
    }

    for (const auto& [doc, rec] : data.correction_links) state->corrections.emplace(rec, doc);

    std::map<std::string, std::vector<const InteractionRecord*>> by_session;
    for (InteractionRecord& r : data.records) {
        const RecordId id = r.record_id;
        state->records.emplace(id, std::move(r));
    }
    for (const auto& [id, r] : state->records) {
        if (!r.failed) by_session[r.session_id].push_back(&r);
    }
    for (const auto& [sid, list] : by_session) {
        auto session = state->session(sid);
        for (const InteractionRecord* r : list) remember_turn(session->history, r->question, r->answer);
    }
    return state;
}

std::string Service::random_token(std::size_t hex_digits) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::lock_guard lock(rng_mutex_);
    std::string out;
    while (out.size() < hex_digits) {
        std::uint64_t v = rng_();
        for (int i = 0; i < 16 && out.size() < hex_digits; ++i, v >>= 4) out.push_back(kHex[v & 0xf]);
    }
    return out;
}

std::shared_ptr<Service::BotState> Service::state_of(const std::string& bot_id) const {
    std::shared_lock lock(bots_mutex_);
    const auto it = bots_.find(bot_id);
    if (it == bots_.end()) throw Error(ErrorCode::not_found, "no bot with id '" + bot_id + "'");
    return it->second;
}

std::shared_ptr<Service::BotState> Service::state_of(RecordId id) const {
    std::shared_lock lock(bots_mutex_);
    const auto owner = record_owner_.find(id);
    if (owner == record_owner_.end()) {
        throw Error(ErrorCode::not_found, "no record with id " + std::to_string(id.value));
    }
    return bots_.at(owner->second);
}

const Reranker& Service::reranker_for(const BotConfig& bot) const {
    if (bot.retrieval.reranker_id == lexical_.reranker_id()) return lexical_;
    if (bot.retrieval.reranker_id == "cross_encoder" && providers_.reranker) return *providers_.reranker;
    throw Error(ErrorCode::invalid_argument,
                "reranker '" + bot.retrieval.reranker_id + "' is not available; use 'lexical_overlap'" +
                    (providers_.reranker ? " or 'cross_encoder'" : ""));
}

BotConfig Service::create_bot(const CreateBotRequest& request) {
    BotConfig bot;
    bot.name = request.name;
    bot.greeting = request.greeting;
    bot.openness = request.openness;
    if (request.retrieval) bot.retrieval = *request.retrieval;
    bot.embedding_provider_ref = providers_.embedder->provider_id();
    bot.llm_ref = providers_.llm->model_id();
    bot.created_at = options_.clock();
    bot.validate();
    reranker_for(bot);

    std::unique_lock lock(bots_mutex_);
    for (const auto& [id, state] : bots_) {
        if (state->config.name == bot.name) {
            throw Error(ErrorCode::conflict, "a bot named '" + bot.name + "' already exists");
        }
    }
    do {
        bot.bot_id = "bot-" + random_token(12);
    } while (bots_.contains(bot.bot_id));
    bot.public_key = "pk-" + random_token(32);

    store_.insert_bot(bot);
    bots_[bot.bot_id] = std::make_shared<BotState>(bot, options_, providers_.embedder->dimension());
    return bot;
}

BotConfig Service::bot(const std::string& bot_id) const { return state_of(bot_id)->config; }

std::vector<BotConfig> Service::bots() const {
    std::shared_lock lock(bots_mutex_);
    std::vector<BotConfig> out;
    for (const auto& [id, state] : bots_) out.push_back(state->config);
    return out;
}

std::optional<BotConfig> Service::find_bot_by_name(const std::string& name) const {
    std::shared_lock lock(bots_mutex_);
    for (const auto& [id, state] : bots_) {
        if (state->config.name == name) return state->config;
    }
    return std::nullopt;
}

bool Service::check_bot_key(const std::string& bot_id, const std::string& key) const {
    std::shared_lock lock(bots_mutex_);
    const auto it = bots_.find(bot_id);
    return it != bots_.end() && !key.empty() && it->second->config.public_key == key;
}

IngestionReport Service::ingest_locked(BotState& state, Document doc, const InteractionRecord* correction) {
    validate_document(doc);
    if (!correction) {
        std::shared_lock lock(state.index_mutex);
        for (const auto& [id, existing] : state.corpus.documents()) {
            if (existing.source_name == doc.source_name && existing.raw_text == doc.raw_text) {
                throw Error(ErrorCode::conflict, "document '" + doc.source_name +
                                                     "' with identical content is already indexed as doc " +
                                                     std::to_string(id.value));
            }
        }
    }

    doc.doc_id = DocId{state.next_doc};
    std::vector<Chunk> chunks = chunk_document(doc, options_.chunker);
    std::uint64_t next_chunk = state.next_chunk;
    IngestionReport report{doc.doc_id, chunks.size(), 0};
    std::vector<std::string> texts;
    for (Chunk& c : chunks) {
        c.chunk_id = ChunkId{next_chunk++};
        report.token_total += c.token_count;
        texts.push_back(c.indexed_text());
    }

    std::vector<std::vector<float>> vectors;
    if (!texts.empty()) {
        std::vector<Embedding> embedded;
        try {
            embedded = providers_.embedder->embed_batch(texts);
        } catch (const Error& e) {
            throw Error(e.code() == ErrorCode::invalid_argument ? ErrorCode::ingestion : e.code(),
                        "embedding failed, nothing was ingested: " + std::string(e.what()));
        }
        if (embedded.size() != texts.size()) {
            throw Error(ErrorCode::ingestion, "embedding provider returned " + std::to_string(embedded.size()) +
                                                  " vectors for " + std::to_string(texts.size()) + " chunks");
        }
        for (Embedding& e : embedded) {
            if (e.values.size() != state.dense.dimension()) {
                throw Error(ErrorCode::ingestion, "embedding provider returned a vector of dimension " +
                                                      std::to_string(e.values.size()) + ", expected " +
                                                      std::to_string(state.dense.dimension()));
            }
            vectors.push_back(std::move(e.values));
        }
    }

    store_.insert_document(state.config.bot_id, doc, chunks, vectors, correction);

    {
        std::unique_lock lock(state.index_mutex);
        state.sparse.add_chunks(chunks);
        state.dense.add_vectors(pair_vectors(chunks, std::move(vectors)));
        if (correction) state.corrections.emplace(correction->record_id, doc.doc_id);
        state.corpus.add_document(std::move(doc), std::move(chunks));
    }
    state.next_doc += 1;
    state.next_chunk = next_chunk;
    maintain_ann(state);
    return report;
}

void Service::maintain_ann(BotState& state) const {
    std::optional<DenseIndex> copy;
    {
        std::shared_lock lock(state.index_mutex);
        if (state.dense.has_ann() || state.dense.size() < options_.ann_threshold) return;
        copy.emplace(state.dense);
    }
    copy->build_ann(options_.hnsw);
    std::unique_lock lock(state.index_mutex);
    state.dense = std::move(*copy);
}

IngestionReport Service::upload_document(const std::string& bot_id, const UploadRequest& request) {
    auto state = state_of(bot_id);
    if (clean_text(request.source_name).empty()) {
        throw Error(ErrorCode::invalid_argument, "source_name must not be empty");
    }
    Document doc;
    doc.source_name = request.source_name;
    doc.format = request.format.empty() ? format_from_filename(request.source_name) : parse_format(request.format);
    doc.raw_text = request.content;
    doc.ingested_at = options_.clock();

    std::lock_guard lock(state->write_mutex);
    return ingest_locked(*state, std::move(doc), nullptr);
}

QueryResponse Service::query(const std::string& bot_id, const std::string& session_id, const std::string& text) {
    auto state = state_of(bot_id);
    if (clean_text(text).empty()) throw Error(ErrorCode::invalid_argument, "query text must not be empty");

    QueryResponse response;
    response.session_id = session_id.empty() ? "s-" + random_token(16) : session_id;
    auto session = state->session(response.session_id);
    std::lock_guard session_lock(session->mutex);

    InteractionRecord record;
    record.session_id = response.session_id;
    record.bot_id = bot_id;
    record.question = text;
    record.created_at = options_.clock();

    const auto persist = [&] {
        record.record_id = store_.insert_record(record);
        {
            std::lock_guard lock(state->records_mutex);
            state->records[record.record_id] = record;
        }
        std::unique_lock lock(bots_mutex_);
        record_owner_[record.record_id] = bot_id;
    };

    RetrievalResult retrieved;
    try {
        retrieved = retrieve(bot_id, text);
        const PromptBundle bundle = build_prompt(text, retrieved.passages, session->history, state->config);
        GenerationResult generated = generate(bundle, *providers_.llm, options_.retry);
        record.answer = std::move(generated.answer_text);
        record.passages_used = std::move(generated.passages_used);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_argument) throw;
        record.failed = true;
        record.degraded = retrieved.degraded;
        record.answer = std::string("answer generation failed: ") + e.what();
        persist();
        throw QueryFailure(e.code(), record.answer, record.record_id, record.session_id);
    }

    record.degraded = retrieved.degraded;
    persist();
    remember_turn(session->history, record.question, record.answer);

    response.answer = record.answer;
    response.passages = std::move(retrieved.passages);
    response.record_id = record.record_id;
    response.degraded = retrieved.degraded;
    response.query_truncated = retrieved.query_truncated;
    return response;
}

RetrievalResult Service::retrieve(const std::string& bot_id, const std::string& text) const {
    auto state = state_of(bot_id);
    const Reranker& reranker = reranker_for(state->config);
    std::shared_lock lock(state->index_mutex);
    const RetrievalContext ctx{state->sparse, state->dense, state->corpus, *providers_.embedder, reranker};
    return ragdesk::retrieve(text, ctx, state->config.retrieval);
}

std::vector<ChunkId> Service::retrieve_ids(const std::string& bot_id, RetrievalMode mode, const std::string& text,
                                           std::size_t k) const {
    auto state = state_of(bot_id);
    const Reranker& reranker = reranker_for(state->config);
    std::shared_lock lock(state->index_mutex);
    const RetrievalContext ctx{state->sparse, state->dense, state->corpus, *providers_.embedder, reranker};
    return ragdesk::retrieve_ids(mode, text, ctx, state->config.retrieval, k);
}

InteractionRecord Service::record(RecordId id) const {
    auto state = state_of(id);
    std::lock_guard lock(state->records_mutex);
    return state->records.at(id);
}

std::vector<DocId> Service::correction_documents(RecordId id) const {
    auto state = state_of(id);
    std::shared_lock lock(state->index_mutex);
    std::vector<DocId> out;
    const auto [begin, end] = state->corrections.equal_range(id);
    for (auto it = begin; it != end; ++it) out.push_back(it->second);
    std::sort(out.begin(), out.end());
    return out;
}

InteractionRecord Service::rate(RecordId id, Rating rating) {
    auto state = state_of(id);
    std::lock_guard write(state->write_mutex);
    InteractionRecord updated = record(id);
    apply_rating(updated, rating, options_.clock());
    store_.update_record(updated);
    std::lock_guard lock(state->records_mutex);
    state->records[id] = updated;
    return updated;
}

CorrectionReport Service::submit_correction(RecordId id, const std::string& text, const std::string& author) {
    auto state = state_of(id);
    std::lock_guard write(state->write_mutex);
    CorrectionReport report;
    report.record = record(id);
    const Timestamp now = options_.clock();
    apply_correction(report.record, text, author, now);
    report.ingestion = ingest_locked(*state, correction_document(report.record, text, now), &report.record);
    std::lock_guard lock(state->records_mutex);
    state->records[id] = report.record;
    return report;
}

std::vector<InteractionRecord> Service::list_records(const std::string& bot_id, Timestamp from, Timestamp to,
                                                     RecordFilter filter) const {
    auto state = state_of(bot_id);
    std::vector<InteractionRecord> all;
    {
        std::lock_guard lock(state->records_mutex);
        for (const auto& [rid, r] : state->records) all.push_back(r);
    }
    return list_interactions(all, bot_id, from, to, filter);
}

BotStats Service::stats(const std::string& bot_id) const {
    auto state = state_of(bot_id);
    BotStats s;
    {
        std::shared_lock lock(state->index_mutex);
        s.documents = state->corpus.document_count();
        s.chunks = state->corpus.chunk_count();
        s.vocab_size = state->sparse.vocab_size();
        s.has_ann = state->dense.has_ann();
        s.parity = state->parity();
    }
    std::lock_guard lock(state->records_mutex);
    s.records = state->records.size();
    return s;
}

bool Service::check_parity(const std::string& bot_id) const {
    auto state = state_of(bot_id);
    std::shared_lock lock(state->index_mutex);
    return state->parity();
}

std::vector<Chunk> Service::chunks(const std::string& bot_id) const {
    auto state = state_of(bot_id);
    std::shared_lock lock(state->index_mutex);
    std::vector<Chunk> out;
    for (const auto& [id, c] : state->corpus.chunks()) out.push_back(c);
    return out;
}

std::vector<Document> Service::documents(const std::string& bot_id) const {
    auto state = state_of(bot_id);
    std::shared_lock lock(state->index_mutex);
    std::vector<Document> out;
    for (const auto& [id, d] : state->corpus.documents()) out.push_back(d);
    return out;
}

BotStats Service::rebuild(const std::string& bot_id) {
    auto state = state_of(bot_id);
    {
        std::lock_guard write(state->write_mutex);
        SparseIndex sparse(options_.bm25, options_.tokenizer);
        DenseIndex dense(state->dense.dimension());
        dense.set_exact_threshold(options_.ann_threshold);
        {
            std::shared_lock lock(state->index_mutex);
            std::vector<Chunk> all;
            std::vector<std::pair<ChunkId, std::vector<float>>> vectors;
            for (const auto& [id, c] : state->corpus.chunks()) {
                all.push_back(c);
                const auto v = state->dense.vector(id);
                vectors.emplace_back(id, std::vector<float>(v.begin(), v.end()));
            }
            sparse.add_chunks(all);
            dense.add_vectors(vectors);
        }
        if (dense.size() >= options_.ann_threshold) dense.build_ann(options_.hnsw);
        std::unique_lock lock(state->index_mutex);
        state->sparse = std::move(sparse);
        state->dense = std::move(dense);
    }
    return stats(bot_id);
}

std::string Service::snapshot(const std::string& bot_id) const {
    auto state = state_of(bot_id);
    nlohmann::json meta;
    std::string sparse_bytes;
    std::string dense_bytes;
    {
        std::shared_lock lock(state->index_mutex);
        meta["config"] = bot_to_json(state->config, true);
        meta["documents"] = nlohmann::json::array();
        for (const auto& [id, d] : state->corpus.documents()) meta["documents"].push_back(d);
        meta["chunks"] = nlohmann::json::array();
        for (const auto& [id, c] : state->corpus.chunks()) meta["chunks"].push_back(c);
        meta["correction_links"] = nlohmann::json::array();
        for (const auto& [rec, doc] : state->corrections) {
            meta["correction_links"].push_back({{"doc_id", doc.value}, {"record_id", rec.value}});
        }
        sparse_bytes = state->sparse.save();
        dense_bytes = state->dense.save();
    }
    {
        std::lock_guard lock(state->records_mutex);
        meta["records"] = nlohmann::json::array();
        for (const auto& [id, r] : state->records) meta["records"].push_back(r);
    }

    BinaryWriter w;
    w.put_magic("RDARCHIV");
    w.put<std::uint32_t>(kArchiveVersion);
    w.put_string(meta.dump());
    w.put_string(sparse_bytes);
    w.put_string(dense_bytes);
    return w.take();
}

BotConfig Service::restore(std::string_view archive, bool replace) {
    BinaryReader r(archive);
    r.expect_magic("RDARCHIV", "bot archive");
    const auto version = r.get<std::uint32_t>();
    if (version != kArchiveVersion) {
        throw Error(ErrorCode::version_mismatch, "archive format version " + std::to_string(version) +
                                                     " is not supported; this build reads version " +
                                                     std::to_string(kArchiveVersion));
    }
    const std::string meta_text = r.get_string();
    SparseIndex sparse = SparseIndex::load(r.get_string());
    DenseIndex dense = DenseIndex::load(r.get_string());
    if (!r.at_end()) throw Error(ErrorCode::corrupt_data, "trailing bytes after archive payload");

    BotData data;
    try {
        const nlohmann::json meta = nlohmann::json::parse(meta_text);
        data.config = bot_from_json(meta.at("config"));
        data.documents = meta.at("documents").get<std::vector<Document>>();
        for (const auto& c : meta.at("chunks")) data.chunks.push_back({c.get<Chunk>(), {}});
        data.records = meta.at("records").get<std::vector<InteractionRecord>>();
        for (const auto& link : meta.at("correction_links")) {
            data.correction_links.emplace_back(DocId{link.at("doc_id").get<std::uint64_t>()},
                                               RecordId{link.at("record_id").get<std::uint64_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corrupt_data, std::string("archive metadata is not valid: ") + e.what());
    }
    data.config.validate();

    std::vector<ChunkId> ids;
    for (const StoredChunk& c : data.chunks) ids.push_back(c.chunk.chunk_id);
    if (sparse.chunk_ids() != ids || dense.chunk_ids() != ids) {
        throw Error(ErrorCode::corrupt_data, "archive indexes do not cover the archived chunks");
    }
    if (data.config.embedding_provider_ref != providers_.embedder->provider_id() ||
        dense.dimension() != providers_.embedder->dimension()) {
        throw Error(ErrorCode::invalid_argument, "archive was built with embedding provider '" +
                                                     data.config.embedding_provider_ref +
                                                     "' but the service uses '" +
                                                     providers_.embedder->provider_id() + "'");
    }
    for (StoredChunk& c : data.chunks) {
        const auto v = dense.vector(c.chunk.chunk_id);
        c.vector.assign(v.begin(), v.end());
    }
    for (const InteractionRecord& rec : data.records) {
        if (rec.bot_id != data.config.bot_id) throw Error(ErrorCode::corrupt_data, "record belongs to another bot");
    }

    std::unique_lock lock(bots_mutex_);
    const std::string& bot_id = data.config.bot_id;
    std::shared_ptr<BotState> previous;
    if (const auto it = bots_.find(bot_id); it != bots_.end()) {
        if (!replace) throw Error(ErrorCode::conflict, "bot " + bot_id + " already exists; pass --replace");
        previous = it->second;
    }
    for (const auto& [id, state] : bots_) {
        if (id != bot_id && state->config.name == data.config.name) {
            throw Error(ErrorCode::conflict, "another bot is already named '" + data.config.name + "'");
        }
    }
    for (const InteractionRecord& rec : data.records) {
        if (store_.record_id_taken(rec.record_id, bot_id)) {
            throw Error(ErrorCode::conflict, "record id " + std::to_string(rec.record_id.value) +
                                                 " is used by another bot; restore into a fresh data directory");
        }
    }

    std::unique_lock<std::mutex> previous_write;
    if (previous) previous_write = std::unique_lock(previous->write_mutex);
    store_.replace_bot(data);

    auto state = std::make_shared<BotState>(data.config, options_, dense.dimension());
    std::map<DocId, std::vector<Chunk>> by_doc;
    for (const StoredChunk& c : data.chunks) {
        by_doc[c.chunk.doc_id].push_back(c.chunk);
        state->next_chunk = std::max(state->next_chunk, c.chunk.chunk_id.value + 1);
    }
    for (Document& doc : data.documents) {
        state->next_doc = std::max(state->next_doc, doc.doc_id.value + 1);
        const DocId id = doc.doc_id;
        state->corpus.add_document(std::move(doc), std::move(by_doc[id]));
    }
    for (const auto& [doc, rec] : data.correction_links) state->corrections.emplace(rec, doc);
    state->sparse = std::move(sparse);
    state->dense = std::move(dense);
    state->dense.set_exact_threshold(options_.ann_threshold);
    for (InteractionRecord& rec : data.records) {
        const RecordId id = rec.record_id;
        state->records.emplace(id, std::move(rec));
    }

    if (previous) {
        std::lock_guard records(previous->records_mutex);
        for (const auto& [id, rec] : previous->records) record_owner_.erase(id);
    }
    for (const auto& [id, rec] : state->records) record_owner_[id] = bot_id;
    bots_[bot_id] = state;
    return state->config;
}

std::string embed_snippet(const BotConfig& bot) {
    return "<script src=\"/widget.js\" data-bot-id=\"" + bot.bot_id + "\" data-bot-key=\"" + bot.public_key +
           "\" async></script>";
}

}  // namespace ragdesk
