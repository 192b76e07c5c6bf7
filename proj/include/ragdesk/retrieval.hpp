#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragdesk/corpus.hpp"
#include "ragdesk/dense_index.hpp"
#include "ragdesk/embedding.hpp"
#include "ragdesk/hits.hpp"
#include "ragdesk/sparse_index.hpp"

namespace ragdesk {

enum class FusionMethod { rrf, weighted };

std::string_view to_string(FusionMethod method) noexcept;
FusionMethod parse_fusion(std::string_view name);

struct RetrievalConfig {
    std::size_t k_sparse = 20;
    std::size_t k_dense = 20;
    std::size_t k_final = 5;
    FusionMethod fusion = FusionMethod::rrf;
    double rrf_constant = 60.0;
    double weight_dense = 0.5;
    std::string reranker_id = "lexical_overlap";
    std::size_t ef_search = 100;

    /// Throws ErrorCode::invalid_argument when a knob is out of range.
    void validate() const;
};

struct Provenance {
    bool sparse = false;
    bool dense = false;

    bool empty() const noexcept { return !sparse && !dense; }
    bool operator==(const Provenance&) const = default;
};

struct ContextPassage {
    ChunkId chunk;
    std::string heading;
    std::string body;
    double fused_score = 0.0;
    double rerank_score = 0.0;
    Provenance provenance;

    bool operator==(const ContextPassage&) const = default;
};

/// Merges two ranked lists by chunk id. Ranks are 1-based positions in each
/// list. The result is ordered by fused score, ties by ascending chunk id.
std::vector<ContextPassage> fuse(std::span<const ScoredHit> sparse_hits,
                                 std::span<const ScoredHit> dense_hits, const RetrievalConfig& cfg,
                                 const Corpus& corpus);

/// Union of the top-k_sparse BM25 hits and top-k_dense dense hits, fused.
std::vector<ContextPassage> hybrid_candidates(std::span<const std::string> query_tokens,
                                              std::span<const float> query_vector,
                                              const SparseIndex& sparse, const DenseIndex& dense,
                                              const Corpus& corpus, const RetrievalConfig& cfg);

enum class RerankerKind { external_cross_encoder, lexical_overlap };

/// Scores (query, passage) pairs; deterministic for a fixed reranker.
class Reranker {
public:
    virtual ~Reranker() = default;
    virtual std::string reranker_id() const = 0;
    virtual RerankerKind kind() const = 0;

    /// One score per passage, in input order. Remote rerankers throw
    /// ErrorCode::transport when unreachable.
    virtual std::vector<double> score(std::string_view query,
                                      std::span<const ContextPassage> passages) const = 0;
};

/// Jaccard similarity between the query's token set and the token set of the
/// passage's heading plus body.
class LexicalOverlapReranker final : public Reranker {
public:
    explicit LexicalOverlapReranker(TokenizerConfig tokenizer = {}) : tokenizer_(std::move(tokenizer)) {}

    std::string reranker_id() const override { return "lexical_overlap"; }
    RerankerKind kind() const override { return RerankerKind::lexical_overlap; }
    std::vector<double> score(std::string_view query,
                              std::span<const ContextPassage> passages) const override;

private:
    TokenizerConfig tokenizer_;
};

/// Remote cross-encoder speaking `{query, passages: [string]} -> {scores: [real]}`.
class HttpCrossEncoder final : public Reranker {
public:
    HttpCrossEncoder(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30))
        : url_(std::move(url)), timeout_(timeout) {}

    std::string reranker_id() const override { return "cross_encoder:" + url_; }
    RerankerKind kind() const override { return RerankerKind::external_cross_encoder; }
    std::vector<double> score(std::string_view query,
                              std::span<const ContextPassage> passages) const override;

private:
    std::string url_;
    std::chrono::milliseconds timeout_;
};

double jaccard(std::span<const std::string> a, std::span<const std::string> b);

struct RerankOutcome {
    std::vector<ContextPassage> passages;
    bool degraded = false;  // reranker failed; fused order served instead
};

/// Sorts by rerank score (ties: fused score, then chunk id) and keeps k_final.
/// A transport failure of the reranker falls back to fused order.
RerankOutcome rerank(std::string_view query, std::vector<ContextPassage> candidates,
                     const Reranker& reranker, std::size_t k_final);

/// Read-only view of one bot's retrieval state.
struct RetrievalContext {
    const SparseIndex& sparse;
    const DenseIndex& dense;
    const Corpus& corpus;
    const EmbeddingProvider& embedder;
    const Reranker& reranker;
};

struct RetrievalResult {
    std::vector<ContextPassage> candidates;  // fused, before reranking
    std::vector<ContextPassage> passages;    // final, at most k_final
    bool degraded = false;
    bool query_truncated = false;
};

/// Tokenize and embed the query, gather hybrid candidates, rerank.
RetrievalResult retrieve(std::string_view query, const RetrievalContext& ctx, const RetrievalConfig& cfg);

enum class RetrievalMode { sparse, dense, hybrid, hybrid_rerank };

std::string_view to_string(RetrievalMode mode) noexcept;
RetrievalMode parse_retrieval_mode(std::string_view name);

/// Top-k chunk ids produced by a single retriever or stage; used to compare
/// retrievers against each other.
std::vector<ChunkId> retrieve_ids(RetrievalMode mode, std::string_view query, const RetrievalContext& ctx,
                                  const RetrievalConfig& cfg, std::size_t k);

}  // namespace ragdesk
