#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ragdesk/corpus.hpp"
#include "support.hpp"

using namespace ragdesk;

namespace {

Document doc_of(std::string text, DocumentFormat format = DocumentFormat::plain) {
    Document d;
    d.doc_id = DocId{1};
    d.source_name = "doc";
    d.raw_text = std::move(text);
    d.format = format;
    return d;
}

std::string join_bodies(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const Chunk& c : chunks) {
        if (!out.empty()) out.push_back(' ');
        out += c.body;
    }
    return out;
}

// Paragraphs of sentences of short words, separated by assorted whitespace.
std::string random_document(std::mt19937_64& rng, std::size_t approx_tokens) {
    static const std::vector<std::string> vocab = ragdesk::testing::make_vocab(300, "t");
    static const char* seps[] = {" ", "  ", "\t", "\n"};
    std::uniform_int_distribution<int> sentence_len(3, 40);
    std::uniform_int_distribution<int> para_len(1, 6);
    std::uniform_int_distribution<int> sep(0, 3);
    std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
    std::string out = "\n ";
    std::size_t tokens = 0;
    while (tokens < approx_tokens) {
        const int sentences = para_len(rng);
        for (int s = 0; s < sentences && tokens < approx_tokens; ++s) {
            const int n = sentence_len(rng);
            for (int i = 0; i < n; ++i) {
                out += vocab[word(rng)];
                out += i + 1 == n ? ". " : seps[sep(rng)];
                ++tokens;
            }
        }
        out += "\n\n";
    }
    return out;
}

}  // namespace

TEST(CleanText, CollapsesWhitespace) {
    EXPECT_EQ(clean_text("  a \t b\n\n c  "), "a b c");
    EXPECT_EQ(clean_text("\r\n"), "");
}

TEST(CleanText, MatchesOracle) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const std::string raw = random_document(rng, 50);
        EXPECT_EQ(clean_text(raw), oracle::collapse_whitespace(raw));
    }
}

TEST(Formats, ParsesNamesAndExtensions) {
    EXPECT_EQ(parse_format("md"), DocumentFormat::markdown);
    EXPECT_EQ(parse_format("text"), DocumentFormat::plain);
    EXPECT_EQ(format_from_filename("faq.CSV"), DocumentFormat::csv);
    try {
        parse_format("pdf");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unsupported_format);
    }
    EXPECT_THROW(format_from_filename("slides.pptx"), Error);
}

TEST(Validate, RejectsPdfBytesAndEmptyText) {
    try {
        validate_document(doc_of("%PDF-1.7 binary"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unsupported_format);
    }
    EXPECT_THROW(validate_document(doc_of(" \n\t ")), Error);
    EXPECT_THROW(validate_document(doc_of(std::string("ok") + '\xc3')), Error);
    EXPECT_NO_THROW(validate_document(doc_of("fine")));
}

TEST(Chunker, SmallDocumentIsOneChunk) {
    const auto chunks = chunk_document(doc_of("one two three four five six seven eight nine ten"));
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0].token_count, 10u);
    EXPECT_EQ(chunks[0].ordinal, 0u);
}

TEST(Chunker, EightHundredTokensSplitIntoAtLeastThree) {
    std::mt19937_64 rng(3);
    std::string text;
    for (int i = 0; i < 800; ++i) text += "w" + std::to_string(i % 97) + (i % 13 == 12 ? ". " : " ");
    const auto chunks = chunk_document(doc_of(text));
    EXPECT_GE(chunks.size(), 3u);
    for (const Chunk& c : chunks) EXPECT_LE(c.token_count, 384u);
    EXPECT_EQ(join_bodies(chunks), clean_text(text));
}

TEST(Chunker, MarkdownHeadingCarriedByEveryChunk) {
    std::string text = "## Bernoulli\n\n";
    for (int i = 0; i < 400; ++i) text += "pressure" + std::to_string(i % 10) + (i % 20 == 19 ? ".\n" : " ");
    const auto chunks = chunk_document(doc_of(text, DocumentFormat::markdown));
    ASSERT_GE(chunks.size(), 2u);
    for (const Chunk& c : chunks) {
        EXPECT_EQ(c.heading, "Bernoulli");
        EXPECT_LE(c.token_count, 384u);
        EXPECT_EQ(c.token_count, count_tokens(c.indexed_text()));
    }
}

TEST(Chunker, HeadinglessChunkIndexesBodyOnly) {
    Chunk c;
    c.body = "body";
    EXPECT_EQ(c.indexed_text(), "body");
    c.heading = "Head";
    EXPECT_EQ(c.indexed_text(), "Head\nbody");
}

TEST(Chunker, OversizeWordRunIsHardSplit) {
    std::string run;
    for (int i = 0; i < 50; ++i) run += "x" + std::to_string(i) + "-";
    ChunkerConfig cfg;
    cfg.max_chunk_tokens = 16;
    const auto chunks = chunk_document(doc_of(run), cfg);
    EXPECT_GE(chunks.size(), 4u);
    for (const Chunk& c : chunks) EXPECT_LE(c.token_count, 16u);
}

TEST(Chunker, RejectsTinyBudget) {
    ChunkerConfig cfg;
    cfg.max_chunk_tokens = 8;
    EXPECT_THROW(chunk_document(doc_of("a b c"), cfg), Error);
}

TEST(Chunker, RandomDocumentsKeepBudgetRoundTripAndOrder) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> size(1, 1500);
    for (int i = 0; i < 200; ++i) {
        const std::string raw = random_document(rng, size(rng));
        const auto chunks = chunk_document(doc_of(raw));
        for (std::size_t j = 0; j < chunks.size(); ++j) {
            EXPECT_EQ(chunks[j].ordinal, j);
            EXPECT_LE(chunks[j].token_count, 384u);
        }
        EXPECT_EQ(join_bodies(chunks), clean_text(raw));
        EXPECT_EQ(chunk_document(doc_of(raw)), chunks);
    }
}

TEST(Csv, TwoRowsBecomeTwoChunks) {
    const auto chunks = chunk_document(doc_of("q,a\nWhat is lift?,An upward force\n\"Drag, why?\",Friction\n",
                                              DocumentFormat::csv));
    ASSERT_EQ(chunks.size(), 2u);
    EXPECT_EQ(chunks[0].body, "q: What is lift?; a: An upward force");
    EXPECT_EQ(chunks[1].body, "q: Drag, why?; a: Friction");
}

TEST(Csv, HeaderOnlyYieldsNothing) {
    EXPECT_TRUE(ingest_csv(doc_of("q,a\n", DocumentFormat::csv)).empty());
}

TEST(Csv, HundredRowsHaveConsecutiveOrdinals) {
    std::string text = "question,answer\n";
    for (int i = 0; i < 100; ++i) text += "q" + std::to_string(i) + ",a" + std::to_string(i) + "\n";
    const auto chunks = ingest_csv(doc_of(text, DocumentFormat::csv));
    ASSERT_EQ(chunks.size(), 100u);
    for (std::size_t i = 0; i < chunks.size(); ++i) EXPECT_EQ(chunks[i].ordinal, i);
}

TEST(Csv, ErrorsNameTheLine) {
    try {
        ingest_csv(doc_of("q,a\nx,y\nonly\n", DocumentFormat::csv));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ingestion);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        parse_csv("a,b\n\"open,quote\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ingestion);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Csv, EscapeRoundTrips) {
    const std::string field = "say \"hi\", then\nleave";
    const auto rows = parse_csv("h\n" + csv_escape(field) + "\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].fields[0], field);
    EXPECT_EQ(csv_escape("plain"), "plain");
}

TEST(CorpusStore, FindsChunksByDocument) {
    Corpus corpus;
    Document d = doc_of("a b");
    Chunk c1;
    c1.chunk_id = ChunkId{1};
    c1.doc_id = d.doc_id;
    Chunk c2 = c1;
    c2.chunk_id = ChunkId{2};
    c2.ordinal = 1;
    corpus.add_document(d, {c1, c2});
    EXPECT_EQ(corpus.chunk_count(), 2u);
    EXPECT_EQ(corpus.chunks_of(DocId{1}).size(), 2u);
    EXPECT_NE(corpus.find_chunk(ChunkId{2}), nullptr);
    EXPECT_EQ(corpus.find_chunk(ChunkId{3}), nullptr);
    EXPECT_NE(corpus.find_document(DocId{1}), nullptr);
}
