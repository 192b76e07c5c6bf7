#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include "ragdesk/service.hpp"
#include "support.hpp"

using namespace ragdesk;
using ragdesk::testing::memory_options;
using ragdesk::testing::mock_providers;

namespace {

constexpr const char* kLiftDoc =
    "# Lift\n\nLift is the upward force generated by a wing as air flows over it.\n\n"
    "# Drag\n\nDrag is the resistance force that opposes the motion of an aircraft through the air.\n";

CreateBotRequest bot_request(std::string name, int openness = 0) {
    CreateBotRequest r;
    r.name = std::move(name);
    r.greeting = "Hello!";
    r.openness = openness;
    return r;
}

UploadRequest upload(std::string name, std::string content, std::string format = "") {
    return {std::move(name), std::move(format), std::move(content)};
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::internal;
}

std::filesystem::path temp_db(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("ragdesk-test-" + name + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(dir);
    return dir / "store.db";
}

}  // namespace

TEST(ServiceBots, CreateAndLookup) {
    Service svc(memory_options(), mock_providers());
    const BotConfig bot = svc.create_bot(bot_request("Aero", 30));
    EXPECT_TRUE(bot.bot_id.starts_with("bot-"));
    EXPECT_TRUE(bot.public_key.starts_with("pk-"));
    EXPECT_EQ(bot.openness, 30);
    EXPECT_EQ(bot.embedding_provider_ref, svc.providers().embedder->provider_id());
    EXPECT_EQ(svc.bot(bot.bot_id).name, "Aero");
    EXPECT_EQ(svc.find_bot_by_name("Aero")->bot_id, bot.bot_id);
    EXPECT_FALSE(svc.find_bot_by_name("Nope").has_value());
    EXPECT_TRUE(svc.check_bot_key(bot.bot_id, bot.public_key));
    EXPECT_FALSE(svc.check_bot_key(bot.bot_id, "pk-wrong"));
    EXPECT_EQ(svc.bots().size(), 1u);
    const std::string snippet = embed_snippet(bot);
    EXPECT_NE(snippet.find(bot.bot_id), std::string::npos);
    EXPECT_NE(snippet.find(bot.public_key), std::string::npos);
}

TEST(ServiceBots, ValidationAndConflicts) {
    Service svc(memory_options(), mock_providers());
    svc.create_bot(bot_request("Aero"));
    EXPECT_EQ(code_of([&] { svc.create_bot(bot_request("Aero")); }), ErrorCode::conflict);
    EXPECT_EQ(code_of([&] { svc.create_bot(bot_request("")); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { svc.create_bot(bot_request("X", 101)); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { svc.create_bot(bot_request("Y", -1)); }), ErrorCode::invalid_argument);
    CreateBotRequest bad = bot_request("Z");
    bad.retrieval = RetrievalConfig{};
    bad.retrieval->reranker_id = "cross_encoder";
    EXPECT_EQ(code_of([&] { svc.create_bot(bad); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { svc.bot("bot-missing"); }), ErrorCode::not_found);
}

TEST(ServiceIngest, ReportsChunksAndTokens) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    const auto report = svc.upload_document(bot, upload("notes.md", kLiftDoc));
    EXPECT_EQ(report.doc_id, DocId{1});
    EXPECT_EQ(report.chunk_count, 2u);
    std::size_t tokens = 0;
    for (const Chunk& c : svc.chunks(bot)) tokens += c.token_count;
    EXPECT_EQ(report.token_total, tokens);
    EXPECT_TRUE(svc.check_parity(bot));
}

TEST(ServiceIngest, LongDocumentGivesThreeChunks) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    std::string text;
    for (int i = 0; i < 800; ++i) text += "word" + std::to_string(i % 50) + (i % 10 == 9 ? ". " : " ");
    EXPECT_GE(svc.upload_document(bot, upload("long.txt", text)).chunk_count, 3u);
}

TEST(ServiceIngest, RejectsPdfAndDuplicates) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    EXPECT_EQ(code_of([&] { svc.upload_document(bot, upload("slides.pdf", "%PDF-1.4")); }),
              ErrorCode::unsupported_format);
    EXPECT_EQ(code_of([&] { svc.upload_document(bot, upload("x.txt", "%PDF-1.4 data")); }),
              ErrorCode::unsupported_format);
    EXPECT_EQ(code_of([&] { svc.upload_document(bot, upload("empty.txt", "  \n ")); }), ErrorCode::ingestion);
    svc.upload_document(bot, upload("a.txt", "alpha beta"));
    EXPECT_EQ(code_of([&] { svc.upload_document(bot, upload("a.txt", "alpha beta")); }), ErrorCode::conflict);
    EXPECT_NO_THROW(svc.upload_document(bot, upload("a.txt", "alpha beta gamma")));
    EXPECT_EQ(code_of([&] { svc.upload_document("bot-none", upload("b.txt", "x")); }), ErrorCode::not_found);
}

TEST(ServiceIngest, EmbeddingFailureChangesNothing) {
    auto providers = mock_providers();
    auto switchable = std::make_shared<ragdesk::testing::SwitchableEmbedder>(providers.embedder);
    providers.embedder = switchable;
    Service svc(memory_options(), providers);
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    svc.upload_document(bot, upload("a.md", kLiftDoc));
    const auto before = svc.chunks(bot);

    switchable->fail = true;
    EXPECT_EQ(code_of([&] { svc.upload_document(bot, upload("b.txt", "new content here")); }),
              ErrorCode::transport);
    EXPECT_EQ(svc.chunks(bot), before);
    EXPECT_EQ(svc.documents(bot).size(), 1u);
    EXPECT_TRUE(svc.check_parity(bot));

    switchable->fail = false;
    const auto report = svc.upload_document(bot, upload("b.txt", "new content here"));
    EXPECT_EQ(report.doc_id, DocId{2});
}

TEST(ServiceQuery, AnswersFromTopPassage) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    svc.upload_document(bot, upload("notes.md", kLiftDoc));
    const QueryResponse r = svc.query(bot, "", "What is drag force?");
    EXPECT_TRUE(r.session_id.starts_with("s-"));
    ASSERT_FALSE(r.passages.empty());
    EXPECT_EQ(r.passages[0].heading, "Drag");
    EXPECT_TRUE(r.answer.starts_with("[MOCK]"));
    EXPECT_NE(r.answer.find("Drag is the resistance force"), std::string::npos);
    const InteractionRecord rec = svc.record(r.record_id);
    EXPECT_EQ(rec.question, "What is drag force?");
    EXPECT_EQ(rec.answer, r.answer);
    EXPECT_FALSE(rec.failed);
    EXPECT_EQ(code_of([&] { svc.query(bot, "", "   "); }), ErrorCode::invalid_argument);
}

TEST(ServiceQuery, EmptyClosedBotRefuses) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero", 0)).bot_id;
    const QueryResponse r = svc.query(bot, "", "What is lift?");
    EXPECT_TRUE(r.passages.empty());
    EXPECT_EQ(r.answer, MockLlmClient::kRefusal);
}

TEST(ServiceQuery, SessionHistoryReachesPrompt) {
    auto providers = mock_providers();
    auto llm = std::make_shared<ragdesk::testing::FlakyLlm>(0, ErrorCode::transport);
    providers.llm = llm;
    Service svc(memory_options(), providers);
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    svc.upload_document(bot, upload("notes.md", kLiftDoc));
    const auto first = svc.query(bot, "", "What is lift?");
    EXPECT_TRUE(llm->last_bundle.history.empty());
    svc.query(bot, first.session_id, "And drag?");
    ASSERT_EQ(llm->last_bundle.history.size(), 2u);
    EXPECT_EQ(llm->last_bundle.history[0], (Turn{"user", "What is lift?"}));
    EXPECT_EQ(llm->last_bundle.history[1].role, "assistant");
    svc.query(bot, "", "Fresh session");
    EXPECT_TRUE(llm->last_bundle.history.empty());
}

TEST(ServiceQuery, FailedGenerationIsRecorded) {
    auto providers = mock_providers();
    providers.llm = std::make_shared<ragdesk::testing::FlakyLlm>(100, ErrorCode::transport);
    Service svc(memory_options(), providers);
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    try {
        svc.query(bot, "", "What is lift?");
        FAIL();
    } catch (const QueryFailure& e) {
        EXPECT_EQ(e.code(), ErrorCode::transport);
        const InteractionRecord rec = svc.record(e.record_id);
        EXPECT_TRUE(rec.failed);
        EXPECT_EQ(rec.session_id, e.session_id);
        EXPECT_EQ(rec.question, "What is lift?");
    }
}

TEST(ServiceFeedback, RateAndCorrect) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    svc.upload_document(bot, upload("notes.md", kLiftDoc));
    const auto r = svc.query(bot, "", "Why do planes need thrust?");
    EXPECT_EQ(svc.rate(r.record_id, Rating::down).rating, Rating::down);

    const auto report = svc.submit_correction(r.record_id, "Thrust overcomes drag to move the plane forward.", "prof");
    EXPECT_EQ(report.record.correction, "Thrust overcomes drag to move the plane forward.");
    EXPECT_EQ(report.ingestion.chunk_count, 1u);
    EXPECT_TRUE(svc.check_parity(bot));

    const auto again = svc.query(bot, "", "Why do planes need thrust?");
    ASSERT_FALSE(again.passages.empty());
    const auto all = svc.chunks(bot);
    const Chunk* top = nullptr;
    for (const Chunk& c : all) {
        if (c.chunk_id == again.passages[0].chunk) top = &c;
    }
    ASSERT_NE(top, nullptr);
    EXPECT_EQ(top->doc_id, report.ingestion.doc_id);

    const auto listed = svc.list_records(bot, Timestamp{}, Timestamp::max(), RecordFilter::rated_down);
    ASSERT_EQ(listed.size(), 1u);
    EXPECT_EQ(listed[0].record_id, r.record_id);
    EXPECT_EQ(code_of([&] { svc.rate(RecordId{999}, Rating::up); }), ErrorCode::not_found);
}

TEST(ServiceFeedback, TwoCorrectionsBothLinked) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    const auto r = svc.query(bot, "", "What is lift?");
    const auto c1 = svc.submit_correction(r.record_id, "Lift is an upward force.", "");
    const auto c2 = svc.submit_correction(r.record_id, "Lift is the upward aerodynamic force on a wing.", "");
    EXPECT_EQ(svc.correction_documents(r.record_id), (std::vector<DocId>{c1.ingestion.doc_id, c2.ingestion.doc_id}));
    EXPECT_EQ(svc.record(r.record_id).correction, "Lift is the upward aerodynamic force on a wing.");
    EXPECT_EQ(svc.documents(bot).size(), 2u);
}

TEST(ServicePersistence, SurvivesRestart) {
    const auto db = temp_db("restart");
    auto options = memory_options();
    options.database = db.string();
    std::string bot;
    RecordId rec;
    std::vector<ContextPassage> passages;
    {
        Service svc(options, mock_providers());
        bot = svc.create_bot(bot_request("Aero")).bot_id;
        svc.upload_document(bot, upload("notes.md", kLiftDoc));
        const auto r = svc.query(bot, "", "What is lift?");
        rec = r.record_id;
        svc.rate(rec, Rating::up);
        svc.submit_correction(rec, "Lift acts perpendicular to the airflow.", "ta");
        passages = svc.retrieve(bot, "What is lift?").passages;
    }
    Service svc(options, mock_providers());
    EXPECT_EQ(svc.bot(bot).name, "Aero");
    EXPECT_EQ(svc.record(rec).rating, Rating::up);
    EXPECT_EQ(svc.correction_documents(rec).size(), 1u);
    EXPECT_EQ(svc.retrieve(bot, "What is lift?").passages, passages);
    EXPECT_TRUE(svc.check_parity(bot));
    const auto next = svc.upload_document(bot, upload("more.txt", "Thrust pushes forward."));
    EXPECT_EQ(next.doc_id, DocId{3});
    std::filesystem::remove_all(db.parent_path());
}

TEST(ServicePersistence, ProviderMismatchOnRestartIsRejected) {
    const auto db = temp_db("provider");
    auto options = memory_options();
    options.database = db.string();
    {
        Service svc(options, mock_providers(256));
        svc.create_bot(bot_request("Aero"));
    }
    EXPECT_THROW(Service(options, mock_providers(128)), Error);
    std::filesystem::remove_all(db.parent_path());
}

TEST(ServiceArchive, SnapshotRestoreRoundTrip) {
    Service a(memory_options(), mock_providers());
    const auto bot = a.create_bot(bot_request("Aero")).bot_id;
    a.upload_document(bot, upload("notes.md", kLiftDoc));
    const auto r = a.query(bot, "", "What is lift?");
    a.submit_correction(r.record_id, "Lift is perpendicular to the relative wind.", "");
    const std::string archive = a.snapshot(bot);

    Service b(memory_options(), mock_providers());
    const BotConfig restored = b.restore(archive, false);
    EXPECT_EQ(restored.bot_id, bot);
    EXPECT_EQ(b.chunks(bot), a.chunks(bot));
    EXPECT_EQ(b.retrieve(bot, "What is lift?").passages, a.retrieve(bot, "What is lift?").passages);
    EXPECT_EQ(b.record(r.record_id).correction, a.record(r.record_id).correction);
    EXPECT_EQ(b.correction_documents(r.record_id), a.correction_documents(r.record_id));
    EXPECT_TRUE(b.check_parity(bot));

    EXPECT_EQ(code_of([&] { b.restore(archive, false); }), ErrorCode::conflict);
    EXPECT_NO_THROW(b.restore(archive, true));
    EXPECT_EQ(b.snapshot(bot), archive);
}

TEST(ServiceArchive, EmptyBotRoundTrips) {
    Service a(memory_options(), mock_providers());
    const auto bot = a.create_bot(bot_request("Empty")).bot_id;
    Service b(memory_options(), mock_providers());
    b.restore(a.snapshot(bot), false);
    EXPECT_EQ(b.stats(bot).chunks, 0u);
    EXPECT_EQ(b.query(bot, "", "anything?").answer, MockLlmClient::kRefusal);
}

TEST(ServiceArchive, RejectsNewerVersionAndGarbage) {
    Service a(memory_options(), mock_providers());
    const auto bot = a.create_bot(bot_request("Aero")).bot_id;
    std::string archive = a.snapshot(bot);
    std::string newer = archive;
    newer[8] = static_cast<char>(newer[8] + 1);
    Service b(memory_options(), mock_providers());
    EXPECT_EQ(code_of([&] { b.restore(newer, false); }), ErrorCode::version_mismatch);
    EXPECT_EQ(code_of([&] { b.restore("not an archive", false); }), ErrorCode::corrupt_data);
    EXPECT_EQ(code_of([&] { b.restore(archive.substr(0, archive.size() - 4), false); }), ErrorCode::corrupt_data);
    EXPECT_TRUE(b.bots().empty());

    Service c(memory_options(), mock_providers(128));
    EXPECT_EQ(code_of([&] { c.restore(archive, false); }), ErrorCode::invalid_argument);
}

TEST(ServiceMaintenance, RebuildKeepsResults) {
    Service svc(memory_options(), mock_providers());
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    svc.upload_document(bot, upload("notes.md", kLiftDoc));
    const auto before = svc.retrieve(bot, "drag").passages;
    const BotStats s = svc.rebuild(bot);
    EXPECT_TRUE(s.parity);
    EXPECT_EQ(s.chunks, 2u);
    EXPECT_EQ(svc.retrieve(bot, "drag").passages, before);
}

TEST(ServiceMaintenance, AnnBuiltAtThreshold) {
    auto options = memory_options();
    options.ann_threshold = 20;
    Service svc(options, mock_providers(64));
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    std::mt19937_64 rng(1);
    const auto vocab = ragdesk::testing::make_vocab(200);
    for (int i = 0; i < 19; ++i) {
        svc.upload_document(bot, upload("d" + std::to_string(i) + ".txt", ragdesk::testing::random_words(rng, vocab, 10)));
    }
    EXPECT_FALSE(svc.stats(bot).has_ann);
    svc.upload_document(bot, upload("d19.txt", ragdesk::testing::random_words(rng, vocab, 10)));
    EXPECT_TRUE(svc.stats(bot).has_ann);
    svc.upload_document(bot, upload("d20.txt", "late addition here"));
    const auto ids = svc.retrieve_ids(bot, RetrievalMode::dense, "late addition here", 1);
    ASSERT_EQ(ids.size(), 1u);
    EXPECT_EQ(svc.chunks(bot).back().chunk_id, ids[0]);
}

TEST(ServiceConcurrency, ParityUnderRandomInterleaving) {
    Service svc(memory_options(), mock_providers(64));
    const auto bot = svc.create_bot(bot_request("Aero")).bot_id;
    const auto vocab = ragdesk::testing::make_vocab(100);
    std::atomic<int> doc{0};
    std::atomic<bool> parity_ok{true};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(static_cast<std::uint64_t>(t));
            for (int i = 0; i < 25; ++i) {
                const int op = static_cast<int>(rng() % 3);
                if (op == 0) {
                    svc.upload_document(bot, upload("d" + std::to_string(doc++) + ".txt",
                                                    ragdesk::testing::random_words(rng, vocab, 30)));
                } else if (op == 1) {
                    svc.query(bot, "", ragdesk::testing::random_words(rng, vocab, 3));
                } else if (!svc.check_parity(bot)) {
                    parity_ok = false;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_TRUE(parity_ok);
    EXPECT_TRUE(svc.check_parity(bot));
    EXPECT_EQ(svc.stats(bot).documents, static_cast<std::size_t>(doc.load()));
}
