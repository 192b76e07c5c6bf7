#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragdesk/corpus.hpp"
#include "ragdesk/hits.hpp"
#include "ragdesk/tokenizer.hpp"

namespace ragdesk {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

enum class SparseScorer { bm25, tfidf };

/// Inverted index over chunk text with TF-IDF cosine and BM25 scoring.
///
/// All logarithms are natural. Chunk length |d| is the token count of the
/// heading-prefixed body without stopword removal; postings exclude stopwords.
/// Not internally synchronized: callers hold a reader-writer lock.
class SparseIndex {
public:
    /// Canonical, order-independent view of the index statistics.
    struct Statistics {
        std::map<std::string, std::map<ChunkId, std::uint32_t>> postings;
        std::map<std::string, std::size_t> doc_freq;
        std::map<ChunkId, std::size_t> chunk_lengths;
        std::size_t num_chunks = 0;
        std::size_t vocab_size = 0;
        double avgdl = 0.0;

        bool operator==(const Statistics&) const = default;
    };

    explicit SparseIndex(Bm25Params params = {}, TokenizerConfig tokenizer = {});

    /// Adds chunks atomically: either every chunk is indexed or, on a
    /// duplicate id, none is.
    void add_chunks(std::span<const Chunk> chunks);

    bool contains(ChunkId id) const { return slot_of_.contains(id); }
    std::size_t num_chunks() const noexcept { return chunks_.size(); }
    std::size_t vocab_size() const noexcept { return terms_.size(); }
    double avgdl() const noexcept;
    const Bm25Params& params() const noexcept { return params_; }
    const TokenizerConfig& tokenizer() const noexcept { return tokenizer_; }

    std::vector<std::string> tokenize_query(std::string_view text) const {
        return tokenize(text, tokenizer_);
    }

    std::size_t doc_freq(std::string_view term) const;
    std::uint32_t term_frequency(std::string_view term, ChunkId chunk) const;
    std::size_t chunk_length(ChunkId chunk) const;

    double tf(std::string_view term, ChunkId chunk) const;
    double idf_tfidf(std::string_view term) const;
    double bm25_idf(std::string_view term) const;

    double tfidf_score(std::span<const std::string> query, ChunkId chunk) const;
    double bm25_score(std::span<const std::string> query, ChunkId chunk) const;

    /// Top-k chunks with a positive score under the chosen scorer.
    std::vector<ScoredHit> search(std::span<const std::string> query, std::size_t k,
                                  SparseScorer scorer = SparseScorer::bm25) const;

    std::vector<ChunkId> chunk_ids() const;
    Statistics statistics() const;

    std::string save() const;
    static SparseIndex load(std::string_view bytes);

    static constexpr std::uint32_t kSnapshotVersion = 1;

private:
    struct Posting {
        std::uint32_t slot = 0;
        std::uint32_t freq = 0;
    };

    struct TermCount {
        std::uint32_t term = 0;
        std::uint32_t freq = 0;
    };

    struct ChunkEntry {
        ChunkId id;
        std::uint32_t length = 0;      // |d|
        std::uint32_t term_total = 0;  // sum of f(t,d) over indexed terms
        std::vector<TermCount> terms;  // sorted by term id
        double tfidf_norm = 0.0;
    };

    const ChunkEntry& entry(ChunkId chunk) const;
    std::uint32_t freq_in(const ChunkEntry& e, std::uint32_t term) const;
    double idf_of(std::uint32_t term) const;
    double bm25_idf_of(std::uint32_t term) const;
    double bm25_term(std::uint32_t freq, std::uint32_t length, double idf) const;
    std::uint32_t intern(const std::string& term);
    void recompute_norms();

    // Distinct known query terms in first-occurrence order with their
    // TF-IDF weights; also returns the query vector norm.
    struct QueryVector {
        std::vector<std::pair<std::uint32_t, double>> weights;
        double norm = 0.0;
    };
    QueryVector query_vector(std::span<const std::string> query) const;

    Bm25Params params_;
    TokenizerConfig tokenizer_;
    std::unordered_map<std::string, std::uint32_t> term_ids_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<ChunkEntry> chunks_;
    std::unordered_map<ChunkId, std::uint32_t> slot_of_;
    std::uint64_t total_length_ = 0;
};

}  // namespace ragdesk
