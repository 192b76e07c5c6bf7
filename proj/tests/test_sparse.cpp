#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ragdesk/sparse_index.hpp"
#include "support.hpp"

using namespace ragdesk;

namespace {

Chunk chunk(std::uint64_t id, std::string body) {
    Chunk c;
    c.chunk_id = ChunkId{id};
    c.doc_id = DocId{id};
    c.body = std::move(body);
    c.token_count = count_tokens(c.body);
    return c;
}

SparseIndex c3() {
    SparseIndex index;
    const std::vector<Chunk> chunks = {chunk(1, "the cat sat"), chunk(2, "the dog sat"), chunk(3, "cat cat cat")};
    index.add_chunks(chunks);
    return index;
}

std::vector<std::string> q(std::initializer_list<const char*> words) {
    return {words.begin(), words.end()};
}

std::vector<Chunk> random_chunks(std::mt19937_64& rng, std::size_t n, std::size_t vocab_size) {
    const auto vocab = ragdesk::testing::make_vocab(vocab_size);
    std::uniform_int_distribution<std::size_t> len(1, 60);
    std::vector<Chunk> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(chunk(i + 1, ragdesk::testing::random_words(rng, vocab, len(rng))));
    return out;
}

}  // namespace

TEST(SparseC3, TermFrequency) {
    const SparseIndex index = c3();
    EXPECT_NEAR(index.tf("cat", ChunkId{1}), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(index.tf("dog", ChunkId{1}), 0.0);
    EXPECT_NEAR(index.tf("cat", ChunkId{3}), 1.0, 1e-12);
}

TEST(SparseC3, Idf) {
    const SparseIndex index = c3();
    EXPECT_NEAR(index.idf_tfidf("the"), 0.405465, 1e-6);
    EXPECT_NEAR(index.idf_tfidf("sat"), 0.405465, 1e-6);
    EXPECT_EQ(index.idf_tfidf("unseen"), 0.0);
    EXPECT_NEAR(index.bm25_idf("cat"), 0.470004, 1e-6);
    EXPECT_NEAR(index.bm25_idf("dog"), 0.980829, 1e-6);
}

TEST(SparseC3, Bm25Score) {
    const SparseIndex index = c3();
    EXPECT_NEAR(index.avgdl(), 3.0, 1e-12);
    EXPECT_NEAR(index.bm25_score(q({"cat"}), ChunkId{3}), 0.783340, 1e-6);
    // Duplicate query terms are summed.
    EXPECT_NEAR(index.bm25_score(q({"cat", "cat"}), ChunkId{3}), 2 * 0.783340, 2e-6);
}

TEST(SparseC3, SearchOrdering) {
    const SparseIndex index = c3();
    const auto hits = index.search(q({"cat"}), 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].chunk, ChunkId{3});
    EXPECT_EQ(hits[1].chunk, ChunkId{1});

    const double s1 = index.tfidf_score(q({"cat"}), ChunkId{1});
    const double s3 = index.tfidf_score(q({"cat"}), ChunkId{3});
    EXPECT_GT(s3, s1);
    EXPECT_GT(s1, 0.0);
    EXPECT_EQ(index.tfidf_score(q({"cat"}), ChunkId{2}), 0.0);

    const auto self = index.search(q({"the", "cat", "sat"}), 3, SparseScorer::tfidf);
    ASSERT_FALSE(self.empty());
    EXPECT_EQ(self[0].chunk, ChunkId{1});
}

TEST(SparseC3, AllDocsContainTermStillPositive) {
    SparseIndex index;
    const std::vector<Chunk> chunks = {chunk(1, "x a"), chunk(2, "x b")};
    index.add_chunks(chunks);
    EXPECT_GT(index.bm25_idf("x"), 0.0);
    EXPECT_NEAR(index.bm25_idf("x"), std::log(0.5 / 2.5 + 1.0), 1e-12);
}

TEST(SparseC3, EmptyQueryAndUnseenTerms) {
    const SparseIndex index = c3();
    EXPECT_TRUE(index.search({}, 5).empty());
    EXPECT_TRUE(index.search(q({"zebra"}), 5).empty());
    EXPECT_TRUE(index.search(q({"zebra"}), 5, SparseScorer::tfidf).empty());
}

TEST(SparseOracle, Bm25MatchesBruteForce) {
    std::mt19937_64 rng(101);
    for (int round = 0; round < 3; ++round) {
        const auto chunks = random_chunks(rng, 200, 80);
        SparseIndex index;
        index.add_chunks(chunks);
        std::vector<std::vector<std::string>> docs;
        for (const Chunk& c : chunks) docs.push_back(oracle::ascii_tokens(c.body));

        const auto vocab = ragdesk::testing::make_vocab(90);
        std::uniform_int_distribution<std::size_t> qlen(1, 5);
        for (int i = 0; i < 30; ++i) {
            const auto query = oracle::ascii_tokens(ragdesk::testing::random_words(rng, vocab, qlen(rng)));
            std::vector<double> expected;
            for (std::size_t d = 0; d < docs.size(); ++d) {
                expected.push_back(oracle::bm25(docs, query, d));
                const double got = index.bm25_score(query, chunks[d].chunk_id);
                EXPECT_LE(std::abs(got - expected.back()), 1e-9 * std::max(1.0, std::abs(expected.back())));
                EXPECT_GE(got, 0.0);
            }
            const auto hits = index.search(query, 10);
            const auto want = oracle::top_k(expected, 10);
            ASSERT_EQ(hits.size(), want.size());
            for (std::size_t r = 0; r < want.size(); ++r) EXPECT_EQ(hits[r].chunk, chunks[want[r]].chunk_id);
        }
    }
}

TEST(SparseOracle, TfidfMatchesDenseMatrix) {
    std::mt19937_64 rng(202);
    const auto chunks = random_chunks(rng, 60, 50);
    SparseIndex index;
    index.add_chunks(chunks);
    std::vector<std::vector<std::string>> docs;
    for (const Chunk& c : chunks) docs.push_back(oracle::ascii_tokens(c.body));

    const auto vocab = ragdesk::testing::make_vocab(55);
    for (int i = 0; i < 50; ++i) {
        const auto query = oracle::ascii_tokens(ragdesk::testing::random_words(rng, vocab, 1 + i % 6));
        const auto expected = oracle::tfidf_cosines(docs, query);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            EXPECT_NEAR(index.tfidf_score(query, chunks[d].chunk_id), expected[d], 1e-9);
        }
        const auto hits = index.search(query, 10, SparseScorer::tfidf);
        const auto want = oracle::top_k(expected, 10);
        ASSERT_EQ(hits.size(), want.size());
        for (std::size_t r = 0; r < want.size(); ++r) EXPECT_EQ(hits[r].chunk, chunks[want[r]].chunk_id);
    }
}

TEST(SparseProperties, IncrementalEqualsBatch) {
    std::mt19937_64 rng(5);
    const auto chunks = random_chunks(rng, 120, 70);
    SparseIndex batch;
    batch.add_chunks(chunks);
    SparseIndex incremental;
    for (std::size_t i = 0; i < chunks.size(); i += 7) {
        const std::size_t end = std::min(chunks.size(), i + 7);
        incremental.add_chunks(std::span<const Chunk>(chunks.data() + i, end - i));
    }
    EXPECT_EQ(batch.statistics(), incremental.statistics());
    const auto query = q({"w1", "w2", "w3"});
    EXPECT_EQ(batch.search(query, 20), incremental.search(query, 20));
    EXPECT_EQ(batch.search(query, 20, SparseScorer::tfidf), incremental.search(query, 20, SparseScorer::tfidf));
}

TEST(SparseProperties, DuplicateBatchIsRejectedWhole) {
    SparseIndex index = c3();
    const auto before = index.statistics();
    const std::vector<Chunk> dup = {chunk(4, "new words"), chunk(1, "again")};
    EXPECT_THROW(index.add_chunks(dup), Error);
    EXPECT_EQ(index.statistics(), before);
    EXPECT_FALSE(index.contains(ChunkId{4}));
}

TEST(SparseProperties, SnapshotRoundTripIsBitIdentical) {
    std::mt19937_64 rng(9);
    SparseIndex index;
    index.add_chunks(random_chunks(rng, 80, 40));
    const std::string bytes = index.save();
    const SparseIndex loaded = SparseIndex::load(bytes);
    EXPECT_EQ(loaded.save(), bytes);
    EXPECT_EQ(loaded.statistics(), index.statistics());
    const auto query = q({"w4", "w8"});
    EXPECT_EQ(loaded.search(query, 10), index.search(query, 10));
}

TEST(SparseProperties, CorruptSnapshotIsRejected) {
    std::string bytes = c3().save();
    EXPECT_THROW(SparseIndex::load(bytes.substr(0, bytes.size() / 2)), Error);
    bytes[0] ^= 0x5a;
    EXPECT_THROW(SparseIndex::load(bytes), Error);
}

TEST(SparseProperties, MoreOccurrencesNeverLowerBm25) {
    SparseIndex index;
    std::vector<Chunk> chunks;
    for (int f = 1; f <= 6; ++f) {
        std::string body;
        for (int i = 0; i < f; ++i) body += "term ";
        for (int i = f; i < 6; ++i) body += "pad" + std::to_string(i) + " ";
        chunks.push_back(chunk(static_cast<std::uint64_t>(f), body));
    }
    chunks.push_back(chunk(7, "other words here and there now"));
    index.add_chunks(chunks);
    for (int f = 1; f < 6; ++f) {
        EXPECT_LT(index.bm25_score(q({"term"}), ChunkId{static_cast<std::uint64_t>(f)}),
                  index.bm25_score(q({"term"}), ChunkId{static_cast<std::uint64_t>(f + 1)}));
    }
}

TEST(SparseProperties, HeadingIsIndexed) {
    Chunk c = chunk(1, "body text");
    c.heading = "Bernoulli";
    SparseIndex index;
    const std::vector<Chunk> chunks = {c, chunk(2, "unrelated")};
    index.add_chunks(chunks);
    EXPECT_EQ(index.chunk_length(ChunkId{1}), 3u);
    EXPECT_EQ(index.term_frequency("bernoulli", ChunkId{1}), 1u);
}

TEST(SparseProperties, StopwordsLeaveLengthsIntact) {
    TokenizerConfig tok;
    tok.stopwords = {"the"};
    SparseIndex index({}, tok);
    const std::vector<Chunk> chunks = {chunk(1, "the cat"), chunk(2, "dog")};
    index.add_chunks(chunks);
    EXPECT_EQ(index.doc_freq("the"), 0u);
    EXPECT_EQ(index.chunk_length(ChunkId{1}), 2u);
    EXPECT_EQ(index.tokenize_query("The cat"), q({"cat"}));
}
