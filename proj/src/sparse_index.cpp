#include "ragdesk/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ragdesk/binary_io.hpp"

namespace ragdesk {
namespace {

constexpr std::string_view kMagic = "RDSPARSE";

}  // namespace

SparseIndex::SparseIndex(Bm25Params params, TokenizerConfig tokenizer)
    : params_(params), tokenizer_(std::move(tokenizer)) {
    if (!(params_.k1 > 0.0) || !(params_.b >= 0.0 && params_.b <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "BM25 requires k1 > 0 and b in [0, 1]");
    }
}

double SparseIndex::avgdl() const noexcept {
    if (chunks_.empty()) return 0.0;
    return static_cast<double>(total_length_) / static_cast<double>(chunks_.size());
}

std::uint32_t SparseIndex::intern(const std::string& term) {
    const auto [it, inserted] = term_ids_.try_emplace(term, static_cast<std::uint32_t>(terms_.size()));
    if (inserted) {
        terms_.push_back(term);
        postings_.emplace_back();
    }
    return it->second;
}

void SparseIndex::add_chunks(std::span<const Chunk> chunks) {
    std::unordered_set<ChunkId> batch;
    for (const Chunk& chunk : chunks) {
        if (slot_of_.contains(chunk.chunk_id) || !batch.insert(chunk.chunk_id).second) {
            throw Error(ErrorCode::conflict,
                        "chunk_ref " + std::to_string(chunk.chunk_id.value) + " already indexed");
        }
    }

    TokenizerConfig counting = tokenizer_;
    counting.stopwords.clear();

    for (const Chunk& chunk : chunks) {
        const std::string text = chunk.indexed_text();
        const std::vector<std::string> tokens = tokenize(text, tokenizer_);

        ChunkEntry e;
        e.id = chunk.chunk_id;
        e.length = static_cast<std::uint32_t>(
            tokenizer_.stopwords.empty() ? tokens.size() : tokenize(text, counting).size());

        std::unordered_map<std::uint32_t, std::uint32_t> counts;
        for (const std::string& token : tokens) {
            ++counts[intern(token)];
        }
        e.terms.reserve(counts.size());
        for (const auto& [term, freq] : counts) {
            e.terms.push_back({term, freq});
            e.term_total += freq;
        }
        std::sort(e.terms.begin(), e.terms.end(),
                  [](const TermCount& a, const TermCount& b) { return a.term < b.term; });

        const auto slot = static_cast<std::uint32_t>(chunks_.size());
        for (const TermCount& tc : e.terms) {
            postings_[tc.term].push_back({slot, tc.freq});
        }
        total_length_ += e.length;
        slot_of_.emplace(e.id, slot);
        chunks_.push_back(std::move(e));
    }
    recompute_norms();
}

void SparseIndex::recompute_norms() {
    std::vector<double> idf(terms_.size());
    for (std::uint32_t t = 0; t < terms_.size(); ++t) idf[t] = idf_of(t);
    for (ChunkEntry& e : chunks_) {
        double sum = 0.0;
        if (e.term_total > 0) {
            for (const TermCount& tc : e.terms) {
                const double w = (static_cast<double>(tc.freq) / e.term_total) * idf[tc.term];
                sum += w * w;
            }
        }
        e.tfidf_norm = std::sqrt(sum);
    }
}

const SparseIndex::ChunkEntry& SparseIndex::entry(ChunkId chunk) const {
    const auto it = slot_of_.find(chunk);
    if (it == slot_of_.end()) {
        throw Error(ErrorCode::not_found, "unknown chunk_ref " + std::to_string(chunk.value));
    }
    return chunks_[it->second];
}

std::uint32_t SparseIndex::freq_in(const ChunkEntry& e, std::uint32_t term) const {
    const auto it = std::lower_bound(e.terms.begin(), e.terms.end(), term,
                                     [](const TermCount& tc, std::uint32_t t) { return tc.term < t; });
    return (it != e.terms.end() && it->term == term) ? it->freq : 0;
}

double SparseIndex::idf_of(std::uint32_t term) const {
    const std::size_t n = postings_[term].size();
    if (n == 0) return 0.0;
    return std::log(static_cast<double>(chunks_.size()) / static_cast<double>(n));
}

double SparseIndex::bm25_idf_of(std::uint32_t term) const {
    const auto n = static_cast<double>(postings_[term].size());
    const auto big_n = static_cast<double>(chunks_.size());
    return std::log((big_n - n + 0.5) / (n + 0.5) + 1.0);
}

double SparseIndex::bm25_term(std::uint32_t freq, std::uint32_t length, double idf) const {
    const double f = freq;
    const double norm = 1.0 - params_.b + params_.b * (static_cast<double>(length) / avgdl());
    return idf * (f * (params_.k1 + 1.0)) / (f + params_.k1 * norm);
}

std::size_t SparseIndex::doc_freq(std::string_view term) const {
    const auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? 0 : postings_[it->second].size();
}

std::uint32_t SparseIndex::term_frequency(std::string_view term, ChunkId chunk) const {
    const ChunkEntry& e = entry(chunk);
    const auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? 0 : freq_in(e, it->second);
}

std::size_t SparseIndex::chunk_length(ChunkId chunk) const { return entry(chunk).length; }

double SparseIndex::tf(std::string_view term, ChunkId chunk) const {
    const ChunkEntry& e = entry(chunk);
    if (e.term_total == 0) return 0.0;
    const auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return 0.0;
    return static_cast<double>(freq_in(e, it->second)) / e.term_total;
}

double SparseIndex::idf_tfidf(std::string_view term) const {
    const auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? 0.0 : idf_of(it->second);
}

double SparseIndex::bm25_idf(std::string_view term) const {
    const auto it = term_ids_.find(std::string(term));
    const auto n = it == term_ids_.end() ? 0.0 : static_cast<double>(postings_[it->second].size());
    const auto big_n = static_cast<double>(chunks_.size());
    return std::log((big_n - n + 0.5) / (n + 0.5) + 1.0);
}

SparseIndex::QueryVector SparseIndex::query_vector(std::span<const std::string> query) const {
    QueryVector qv;
    if (query.empty()) return qv;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;  // first-occurrence order
    for (const std::string& token : query) {
        const auto it = term_ids_.find(token);
        if (it == term_ids_.end()) continue;
        auto found = std::find_if(counts.begin(), counts.end(),
                                  [&](const auto& p) { return p.first == it->second; });
        if (found == counts.end()) {
            counts.emplace_back(it->second, 1);
        } else {
            ++found->second;
        }
    }
    const auto query_len = static_cast<double>(query.size());
    double sum = 0.0;
    for (const auto& [term, count] : counts) {
        const double w = (count / query_len) * idf_of(term);
        if (w == 0.0) continue;
        qv.weights.emplace_back(term, w);
        sum += w * w;
    }
    qv.norm = std::sqrt(sum);
    return qv;
}

double SparseIndex::tfidf_score(std::span<const std::string> query, ChunkId chunk) const {
    const ChunkEntry& e = entry(chunk);
    const QueryVector qv = query_vector(query);
    if (qv.norm == 0.0 || e.tfidf_norm == 0.0) return 0.0;

    double dot = 0.0;
    for (const auto& [term, qw] : qv.weights) {
        const std::uint32_t f = freq_in(e, term);
        if (f == 0) continue;
        dot += qw * ((static_cast<double>(f) / e.term_total) * idf_of(term));
    }
    return dot / (qv.norm * e.tfidf_norm);
}

double SparseIndex::bm25_score(std::span<const std::string> query, ChunkId chunk) const {
    const ChunkEntry& e = entry(chunk);
    double score = 0.0;
    for (const std::string& token : query) {
        const auto it = term_ids_.find(token);
        if (it == term_ids_.end()) continue;
        const std::uint32_t f = freq_in(e, it->second);
        if (f == 0) continue;
        score += bm25_term(f, e.length, bm25_idf_of(it->second));
    }
    return score;
}

std::vector<ScoredHit> SparseIndex::search(std::span<const std::string> query, std::size_t k,
                                           SparseScorer scorer) const {
    if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
    if (chunks_.empty() || query.empty()) return {};

    std::vector<double> acc(chunks_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    auto touch = [&](std::uint32_t slot, double value) {
        if (acc[slot] == 0.0 && value != 0.0) touched.push_back(slot);
        acc[slot] += value;
    };

    if (scorer == SparseScorer::bm25) {
        for (const std::string& token : query) {
            const auto it = term_ids_.find(token);
            if (it == term_ids_.end()) continue;
            const double idf = bm25_idf_of(it->second);
            for (const Posting& p : postings_[it->second]) {
                touch(p.slot, bm25_term(p.freq, chunks_[p.slot].length, idf));
            }
        }
    } else {
        const QueryVector qv = query_vector(query);
        if (qv.norm == 0.0) return {};
        for (const auto& [term, qw] : qv.weights) {
            const double idf = idf_of(term);
            for (const Posting& p : postings_[term]) {
                const ChunkEntry& e = chunks_[p.slot];
                touch(p.slot, qw * ((static_cast<double>(p.freq) / e.term_total) * idf));
            }
        }
        for (std::uint32_t slot : touched) {
            const double norm = chunks_[slot].tfidf_norm;
            acc[slot] = norm == 0.0 ? 0.0 : acc[slot] / (qv.norm * norm);
        }
    }

    std::vector<ScoredHit> hits;
    hits.reserve(touched.size());
    for (std::uint32_t slot : touched) {
        if (acc[slot] > 0.0) hits.push_back({chunks_[slot].id, acc[slot], Origin::sparse});
    }
    rank_hits(hits, k);
    return hits;
}

std::vector<ChunkId> SparseIndex::chunk_ids() const {
    std::vector<ChunkId> ids;
    ids.reserve(chunks_.size());
    for (const ChunkEntry& e : chunks_) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

SparseIndex::Statistics SparseIndex::statistics() const {
    Statistics s;
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
        auto& list = s.postings[terms_[t]];
        for (const Posting& p : postings_[t]) list[chunks_[p.slot].id] = p.freq;
        s.doc_freq[terms_[t]] = postings_[t].size();
    }
    for (const ChunkEntry& e : chunks_) s.chunk_lengths[e.id] = e.length;
    s.num_chunks = chunks_.size();
    s.vocab_size = terms_.size();
    s.avgdl = avgdl();
    return s;
}

std::string SparseIndex::save() const {
    BinaryWriter w;
    w.put_magic(kMagic);
    w.put<std::uint32_t>(kSnapshotVersion);
    w.put<double>(params_.k1);
    w.put<double>(params_.b);
    w.put<std::uint64_t>(chunks_.size());
    w.put<std::uint64_t>(terms_.size());
    w.put<double>(avgdl());

    w.put<std::uint8_t>(tokenizer_.lowercase ? 1 : 0);
    std::vector<std::string> stopwords(tokenizer_.stopwords.begin(), tokenizer_.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    w.put<std::uint64_t>(stopwords.size());
    for (const auto& s : stopwords) w.put_string(s);

    for (const ChunkEntry& e : chunks_) {
        w.put<std::uint64_t>(e.id.value);
        w.put<std::uint32_t>(e.length);
    }
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
        w.put_string(terms_[t]);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(postings_[t].size()));
        for (const Posting& p : postings_[t]) {
            w.put<std::uint64_t>(chunks_[p.slot].id.value);
            w.put<std::uint32_t>(p.freq);
        }
    }
    return w.take();
}

SparseIndex SparseIndex::load(std::string_view bytes) {
    BinaryReader r(bytes);
    r.expect_magic(kMagic, "sparse index snapshot");
    const auto version = r.get<std::uint32_t>();
    if (version != kSnapshotVersion) {
        throw Error(ErrorCode::version_mismatch,
                    "sparse index snapshot version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kSnapshotVersion) + ")");
    }
    Bm25Params params;
    params.k1 = r.get<double>();
    params.b = r.get<double>();
    const auto n = r.get<std::uint64_t>();
    const auto m = r.get<std::uint64_t>();
    const auto stored_avgdl = r.get<double>();

    TokenizerConfig tokenizer;
    tokenizer.lowercase = r.get<std::uint8_t>() != 0;
    const auto stopword_count = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < stopword_count; ++i) tokenizer.stopwords.insert(r.get_string());

    SparseIndex index(params, std::move(tokenizer));
    for (std::uint64_t i = 0; i < n; ++i) {
        ChunkEntry e;
        e.id = ChunkId{r.get<std::uint64_t>()};
        e.length = r.get<std::uint32_t>();
        if (!index.slot_of_.emplace(e.id, static_cast<std::uint32_t>(index.chunks_.size())).second) {
            throw Error(ErrorCode::corrupt_data, "sparse snapshot repeats a chunk id");
        }
        index.total_length_ += e.length;
        index.chunks_.push_back(std::move(e));
    }
    for (std::uint64_t t = 0; t < m; ++t) {
        const std::uint32_t term = index.intern(r.get_string());
        if (term != t) throw Error(ErrorCode::corrupt_data, "sparse snapshot repeats a term");
        const auto df = r.get<std::uint32_t>();
        for (std::uint32_t i = 0; i < df; ++i) {
            const ChunkId id{r.get<std::uint64_t>()};
            const auto freq = r.get<std::uint32_t>();
            const auto it = index.slot_of_.find(id);
            if (it == index.slot_of_.end() || freq == 0) {
                throw Error(ErrorCode::corrupt_data, "sparse snapshot posting is inconsistent");
            }
            index.postings_[term].push_back({it->second, freq});
            ChunkEntry& e = index.chunks_[it->second];
            e.terms.push_back({term, freq});
            e.term_total += freq;
        }
    }
    if (!r.at_end()) throw Error(ErrorCode::corrupt_data, "trailing bytes in sparse snapshot");
    if (index.avgdl() != stored_avgdl) {
        throw Error(ErrorCode::corrupt_data, "sparse snapshot avgdl does not match its lengths");
    }
    index.recompute_norms();
    return index;
}

}  // namespace ragdesk
