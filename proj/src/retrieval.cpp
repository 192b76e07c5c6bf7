#include "ragdesk/retrieval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "http_client.hpp"

namespace ragdesk {
namespace {

void sort_by_fused(std::vector<ContextPassage>& passages) {
    std::sort(passages.begin(), passages.end(), [](const ContextPassage& a, const ContextPassage& b) {
        if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
        return a.chunk < b.chunk;
    });
}

// Min-max normalized scores; a list whose scores are all equal maps to 1.
std::vector<double> min_max(std::span<const ScoredHit> hits) {
    std::vector<double> out(hits.size(), 1.0);
    if (hits.empty()) return out;
    const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.score < b.score;
    });
    const double range = hi->score - lo->score;
    if (range > 0.0) {
        for (std::size_t i = 0; i < hits.size(); ++i) out[i] = (hits[i].score - lo->score) / range;
    }
    return out;
}

std::string passage_text(const ContextPassage& p) {
    return p.heading.empty() ? p.body : p.heading + "\n" + p.body;
}

}  // namespace

std::string_view to_string(FusionMethod method) noexcept {
    return method == FusionMethod::rrf ? "rrf" : "weighted";
}

FusionMethod parse_fusion(std::string_view name) {
    if (name == "rrf") return FusionMethod::rrf;
    if (name == "weighted") return FusionMethod::weighted;
    throw Error(ErrorCode::invalid_argument, "unknown fusion method '" + std::string(name) + "'");
}

void RetrievalConfig::validate() const {
    if (k_sparse == 0 || k_dense == 0 || k_final == 0) {
        throw Error(ErrorCode::invalid_argument, "k_sparse, k_dense and k_final must be at least 1");
    }
    if (k_final > k_sparse + k_dense) {
        throw Error(ErrorCode::invalid_argument, "k_final must not exceed k_sparse + k_dense");
    }
    if (!(rrf_constant >= 0.0)) throw Error(ErrorCode::invalid_argument, "rrf_constant must be non-negative");
    if (!(weight_dense >= 0.0 && weight_dense <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "weight_dense must lie in [0, 1]");
    }
    if (ef_search == 0) throw Error(ErrorCode::invalid_argument, "ef_search must be at least 1");
}

std::vector<ContextPassage> fuse(std::span<const ScoredHit> sparse_hits, std::span<const ScoredHit> dense_hits,
                                 const RetrievalConfig& cfg, const Corpus& corpus) {
    std::map<ChunkId, ContextPassage> merged;

    auto absorb = [&](std::span<const ScoredHit> hits, bool dense) {
        const double weight = dense ? cfg.weight_dense : 1.0 - cfg.weight_dense;
        const std::vector<double> norm = cfg.fusion == FusionMethod::weighted ? min_max(hits) : std::vector<double>{};
        for (std::size_t i = 0; i < hits.size(); ++i) {
            auto [it, inserted] = merged.try_emplace(hits[i].chunk);
            ContextPassage& p = it->second;
            if (inserted) {
                const Chunk* chunk = corpus.find_chunk(hits[i].chunk);
                if (chunk == nullptr) {
                    throw Error(ErrorCode::internal,
                                "index returned chunk_ref " + std::to_string(hits[i].chunk.value) +
                                    " that is not in the corpus");
                }
                p.chunk = chunk->chunk_id;
                p.heading = chunk->heading;
                p.body = chunk->body;
            }
            if (cfg.fusion == FusionMethod::rrf) {
                p.fused_score += 1.0 / (cfg.rrf_constant + static_cast<double>(i + 1));
            } else {
                p.fused_score += weight * norm[i];
            }
            (dense ? p.provenance.dense : p.provenance.sparse) = true;
        }
    };
    absorb(sparse_hits, false);
    absorb(dense_hits, true);

    std::vector<ContextPassage> out;
    out.reserve(merged.size());
    for (auto& [id, passage] : merged) out.push_back(std::move(passage));
    sort_by_fused(out);
    return out;
}

std::vector<ContextPassage> hybrid_candidates(std::span<const std::string> query_tokens,
                                              std::span<const float> query_vector, const SparseIndex& sparse,
                                              const DenseIndex& dense, const Corpus& corpus,
                                              const RetrievalConfig& cfg) {
    std::vector<ScoredHit> sparse_hits;
    std::vector<ScoredHit> dense_hits;
    if (sparse.num_chunks() > 0 && !query_tokens.empty()) {
        sparse_hits = sparse.search(query_tokens, cfg.k_sparse, SparseScorer::bm25);
    }
    if (dense.size() > 0 && !query_vector.empty()) {
        dense_hits = dense.search(query_vector, cfg.k_dense, cfg.ef_search);
    }
    return fuse(sparse_hits, dense_hits, cfg, corpus);
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
    const std::set<std::string> sa(a.begin(), a.end());
    const std::set<std::string> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::vector<double> LexicalOverlapReranker::score(std::string_view query,
                                                  std::span<const ContextPassage> passages) const {
    const std::vector<std::string> q = tokenize(query, tokenizer_);
    std::vector<double> scores;
    scores.reserve(passages.size());
    for (const ContextPassage& p : passages) {
        scores.push_back(jaccard(q, tokenize(passage_text(p), tokenizer_)));
    }
    return scores;
}

std::vector<double> HttpCrossEncoder::score(std::string_view query,
                                            std::span<const ContextPassage> passages) const {
    nlohmann::json request = {{"query", std::string(query)}, {"passages", nlohmann::json::array()}};
    for (const ContextPassage& p : passages) request["passages"].push_back(passage_text(p));
    const nlohmann::json reply = detail::post_json(url_, request, timeout_);
    const auto scores = reply.find("scores");
    if (scores == reply.end() || !scores->is_array() || scores->size() != passages.size()) {
        throw Error(ErrorCode::transport, "reranker reply lacks one score per passage");
    }
    std::vector<double> out;
    out.reserve(passages.size());
    for (const auto& s : *scores) {
        if (!s.is_number()) throw Error(ErrorCode::transport, "reranker returned a non-numeric score");
        out.push_back(s.get<double>());
    }
    return out;
}

RerankOutcome rerank(std::string_view query, std::vector<ContextPassage> candidates, const Reranker& reranker,
                     std::size_t k_final) {
    RerankOutcome outcome;
    if (candidates.empty()) return outcome;

    std::vector<double> scores;
    try {
        scores = reranker.score(query, candidates);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::transport && e.code() != ErrorCode::rate_limited &&
            e.code() != ErrorCode::unauthorized) {
            throw;
        }
        outcome.degraded = true;
    }

    if (outcome.degraded) {
        for (ContextPassage& p : candidates) p.rerank_score = 0.0;
        sort_by_fused(candidates);
    } else {
        for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].rerank_score = scores[i];
        std::sort(candidates.begin(), candidates.end(), [](const ContextPassage& a, const ContextPassage& b) {
            if (a.rerank_score != b.rerank_score) return a.rerank_score > b.rerank_score;
            if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
            return a.chunk < b.chunk;
        });
    }
    if (candidates.size() > k_final) candidates.resize(k_final);
    outcome.passages = std::move(candidates);
    return outcome;
}

namespace {

struct EncodedQuery {
    std::vector<std::string> tokens;
    Embedding embedding;
};

EncodedQuery encode_query(std::string_view query, const RetrievalContext& ctx) {
    if (clean_text(query).empty()) {
        throw Error(ErrorCode::invalid_argument, "query is empty");
    }
    EncodedQuery encoded;
    encoded.tokens = ctx.sparse.tokenize_query(query);
    encoded.embedding = ctx.embedder.embed(std::string(query));
    return encoded;
}

bool corpus_empty(const RetrievalContext& ctx) {
    return ctx.sparse.num_chunks() == 0 && ctx.dense.size() == 0;
}

}  // namespace

RetrievalResult retrieve(std::string_view query, const RetrievalContext& ctx, const RetrievalConfig& cfg) {
    cfg.validate();
    RetrievalResult result;
    if (clean_text(query).empty()) throw Error(ErrorCode::invalid_argument, "query is empty");
    if (corpus_empty(ctx)) return result;

    const EncodedQuery encoded = encode_query(query, ctx);
    result.query_truncated = encoded.embedding.truncated;
    result.candidates =
        hybrid_candidates(encoded.tokens, encoded.embedding.values, ctx.sparse, ctx.dense, ctx.corpus, cfg);
    RerankOutcome ranked = rerank(query, result.candidates, ctx.reranker, cfg.k_final);
    result.passages = std::move(ranked.passages);
    result.degraded = ranked.degraded;
    return result;
}

std::string_view to_string(RetrievalMode mode) noexcept {
    switch (mode) {
        case RetrievalMode::sparse: return "sparse";
        case RetrievalMode::dense: return "dense";
        case RetrievalMode::hybrid: return "hybrid";
        case RetrievalMode::hybrid_rerank: return "hybrid_rerank";
    }
    return "hybrid_rerank";
}

RetrievalMode parse_retrieval_mode(std::string_view name) {
    if (name == "sparse") return RetrievalMode::sparse;
    if (name == "dense") return RetrievalMode::dense;
    if (name == "hybrid") return RetrievalMode::hybrid;
    if (name == "hybrid_rerank" || name == "hybrid+rerank") return RetrievalMode::hybrid_rerank;
    throw Error(ErrorCode::invalid_argument, "unknown retrieval mode '" + std::string(name) + "'");
}

std::vector<ChunkId> retrieve_ids(RetrievalMode mode, std::string_view query, const RetrievalContext& ctx,
                                  const RetrievalConfig& cfg, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
    cfg.validate();
    std::vector<ChunkId> ids;
    if (corpus_empty(ctx)) return ids;

    if (mode == RetrievalMode::hybrid_rerank) {
        RetrievalConfig staged = cfg;
        staged.k_final = k;
        staged.k_sparse = std::max(cfg.k_sparse, k);
        staged.k_dense = std::max(cfg.k_dense, k);
        for (const auto& p : retrieve(query, ctx, staged).passages) ids.push_back(p.chunk);
        return ids;
    }

    const EncodedQuery encoded = encode_query(query, ctx);
    std::vector<ScoredHit> hits;
    if (mode == RetrievalMode::sparse) {
        if (!encoded.tokens.empty()) hits = ctx.sparse.search(encoded.tokens, k, SparseScorer::bm25);
    } else if (mode == RetrievalMode::dense) {
        hits = ctx.dense.search(encoded.embedding.values, k, cfg.ef_search);
    } else {
        for (const auto& p : hybrid_candidates(encoded.tokens, encoded.embedding.values, ctx.sparse, ctx.dense,
                                               ctx.corpus, cfg)) {
            if (ids.size() == k) break;
            ids.push_back(p.chunk);
        }
        return ids;
    }
    for (const ScoredHit& h : hits) ids.push_back(h.chunk);
    return ids;
}

}  // namespace ragdesk
