#include "ragdesk/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ragdesk/bench.hpp"
#include "ragdesk/config.hpp"
#include "ragdesk/http_api.hpp"
#include "ragdesk/json_io.hpp"

namespace ragdesk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::atomic<HttpApi*> g_serving{nullptr};

extern "C" void stop_serving(int) {
    if (HttpApi* api = g_serving.load()) api->stop();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        throw Error(ErrorCode::invalid_argument, "cannot write " + path);
    }
}

struct Globals {
    std::string config_path;
    std::string data_dir;
    bool json = false;
};

ServiceConfig load(const Globals& g) {
    ServiceConfig cfg = load_config(g.config_path);
    if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
    return cfg;
}

std::unique_ptr<Service> open_service(const ServiceConfig& cfg) {
    return std::make_unique<Service>(make_service_options(cfg), make_providers(cfg));
}

/// Accepts a bot id or a bot name.
std::string resolve_bot(const Service& service, const std::string& ref) {
    for (const BotConfig& b : service.bots()) {
        if (b.bot_id == ref) return b.bot_id;
    }
    if (const auto bot = service.find_bot_by_name(ref)) return bot->bot_id;
    throw Error(ErrorCode::not_found, "no bot with id or name '" + ref + "'");
}

std::vector<RetrievalMode> parse_modes(const std::string& list) {
    std::vector<RetrievalMode> modes;
    std::stringstream in(list);
    std::string name;
    while (std::getline(in, name, ',')) {
        if (!name.empty()) modes.push_back(parse_retrieval_mode(name));
    }
    if (modes.empty()) throw Error(ErrorCode::invalid_argument, "--modes lists no mode");
    return modes;
}

std::vector<fs::path> corpus_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::invalid_argument, dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && !entry.path().filename().string().starts_with(".")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorCode::invalid_argument, "corpus directory " + dir + " has no files");
    return files;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Course assistant retrieval service and operator tools"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--data-dir", g.data_dir, "Data directory (overrides the config)");
    app.add_flag("--json", g.json, "Print machine-readable JSON");

    std::string host;
    int port = -1;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", host, "Listen address (overrides the config)");
    serve->add_option("--port", port, "Listen port (overrides the config)");

    std::string name;
    std::string greeting;
    int openness = 0;
    auto* create = app.add_subcommand("create-bot", "Create a bot");
    create->add_option("--name", name, "Unique bot name")->required();
    create->add_option("--greeting", greeting, "Greeting shown to students");
    create->add_option("--openness", openness, "0 = context only, 100 = unrestricted")->required();

    auto* list = app.add_subcommand("list-bots", "List bots");

    std::string bot_ref;
    std::vector<std::string> files;
    std::string format;
    auto* ingest = app.add_subcommand("ingest", "Chunk, embed and index files");
    ingest->add_option("--bot", bot_ref, "Bot id or name")->required();
    ingest->add_option("--format", format, "plain, markdown or csv (default: from the file extension)");
    ingest->add_option("files", files, "Files to ingest")->required();

    std::string session;
    std::string text;
    auto* query = app.add_subcommand("query", "Ask a bot a question");
    query->add_option("--bot", bot_ref, "Bot id or name")->required();
    query->add_option("--session", session, "Session id (default: new session)");
    query->add_option("text", text, "Question")->required();

    auto* rebuild = app.add_subcommand("rebuild", "Rebuild both indexes of a bot");
    rebuild->add_option("--bot", bot_ref, "Bot id or name")->required();

    std::string path;
    auto* snapshot = app.add_subcommand("snapshot", "Write a bot archive");
    snapshot->add_option("--bot", bot_ref, "Bot id or name")->required();
    snapshot->add_option("--out", path, "Archive file")->required();

    bool replace = false;
    auto* restore = app.add_subcommand("restore", "Restore a bot archive");
    restore->add_option("--in", path, "Archive file")->required();
    restore->add_flag("--replace", replace, "Replace an existing bot with the same id");

    std::string from;
    std::string to;
    std::string filter = "all";
    auto* exporter = app.add_subcommand("export-records", "Export interaction records as CSV");
    exporter->add_option("--bot", bot_ref, "Bot id or name")->required();
    exporter->add_option("--from", from, "Inclusive start (ISO-8601 or epoch ms)");
    exporter->add_option("--to", to, "Exclusive end (ISO-8601 or epoch ms)");
    exporter->add_option("--filter", filter, "all, rated_down or uncorrected");
    exporter->add_option("--out", path, "Output file (default: stdout)");

    std::string corpus_dir;
    std::string queries_path;
    std::string modes = "sparse,dense,hybrid,hybrid_rerank";
    std::size_t k = 5;
    std::size_t concurrency = 1;
    auto* bench = app.add_subcommand("bench", "Measure recall and latency per retriever");
    bench->add_option("--corpus", corpus_dir, "Directory of corpus files")->required();
    bench->add_option("--queries", queries_path, "CSV of (query, relevant_ids)")->required();
    bench->add_option("--modes", modes, "Comma-separated: sparse, dense, hybrid, hybrid_rerank");
    bench->add_option("--k", k, "Cutoff for recall@k")->check(CLI::PositiveNumber);
    bench->add_option("--concurrency", concurrency, "Parallel query threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUserError;
    }

    try {
        const ServiceConfig cfg = load(g);

        if (*serve) {
            const std::string token = env_or_empty(cfg.instructor_token_env);
            if (token.empty()) {
                throw Error(ErrorCode::invalid_argument,
                            "set " + cfg.instructor_token_env + " to the instructor bearer token");
            }
            auto service = open_service(cfg);
            HttpApi api(*service, ApiOptions{token});
            const int bound = api.bind(host.empty() ? cfg.listen_host : host, port < 0 ? cfg.listen_port : port);
            err << "listening on " << (host.empty() ? cfg.listen_host : host) << ":" << bound << std::endl;
            g_serving = &api;
            std::signal(SIGINT, stop_serving);
            std::signal(SIGTERM, stop_serving);
            api.run();
            g_serving = nullptr;
            return kExitOk;
        }

        if (*bench) {
            ServiceConfig mem = cfg;
            mem.data_dir = ":memory:";
            auto service = open_service(mem);
            const auto queries = parse_bench_queries(read_file(queries_path), queries_path);
            const std::string bot_id = service->create_bot({"bench", "", 0, std::nullopt}).bot_id;
            for (const fs::path& file : corpus_files(corpus_dir)) {
                try {
                    service->upload_document(bot_id, {file.filename().string(), "", read_file(file.string())});
                } catch (const Error& e) {
                    throw Error(e.code(), file.string() + ": " + e.what());
                }
            }
            BenchOptions options;
            options.modes = parse_modes(modes);
            options.k = k;
            options.concurrency = concurrency;
            const BenchReport report = run_bench(*service, bot_id, queries, options);
            out << (g.json ? bench_to_json(report).dump(2) + "\n" : format_bench_table(report));
            return kExitOk;
        }

        auto service = open_service(cfg);

        if (*create) {
            const BotConfig bot = service->create_bot({name, greeting, openness, std::nullopt});
            if (g.json) {
                out << create_bot_payload(bot).dump(2) << "\n";
            } else {
                out << "bot_id: " << bot.bot_id << "\npublic_key: " << bot.public_key << "\nembed: "
                    << embed_snippet(bot) << "\n";
            }
        } else if (*list) {
            json bots = json::array();
            for (const BotConfig& b : service->bots()) {
                bots.push_back(bot_to_json(b, true));
                if (!g.json) out << b.bot_id << "\t" << b.name << "\topenness=" << b.openness << "\n";
            }
            if (g.json) out << json{{"bots", bots}}.dump(2) << "\n";
        } else if (*ingest) {
            const std::string bot_id = resolve_bot(*service, bot_ref);
            json reports = json::array();
            for (const std::string& file : files) {
                IngestionReport r;
                try {
                    r = service->upload_document(bot_id,
                                                 {fs::path(file).filename().string(), format, read_file(file)});
                } catch (const Error& e) {
                    throw Error(e.code(), file + ": " + e.what());
                }
                json payload = ingestion_payload(r);
                payload["file"] = file;
                reports.push_back(payload);
                if (!g.json) {
                    out << file << ": doc " << r.doc_id.value << ", " << r.chunk_count << " chunks, "
                        << r.token_total << " tokens\n";
                }
            }
            if (g.json) out << json{{"documents", reports}}.dump(2) << "\n";
        } else if (*query) {
            const QueryResponse r = service->query(resolve_bot(*service, bot_ref), session, text);
            if (g.json) {
                out << query_payload(r).dump(2) << "\n";
            } else {
                out << r.answer << "\n";
                for (std::size_t i = 0; i < r.passages.size(); ++i) {
                    const ContextPassage& p = r.passages[i];
                    out << "[" << (i + 1) << "] chunk " << p.chunk.value;
                    if (!p.heading.empty()) out << " (" << p.heading << ")";
                    out << ": " << p.body.substr(0, 160) << (p.body.size() > 160 ? "..." : "") << "\n";
                }
                out << "record " << r.record_id.value << ", session " << r.session_id
                    << (r.degraded ? ", degraded" : "") << "\n";
            }
        } else if (*rebuild) {
            const BotStats s = service->rebuild(resolve_bot(*service, bot_ref));
            if (g.json) {
                out << json{{"chunks", s.chunks}, {"has_ann", s.has_ann}, {"parity", s.parity}}.dump(2) << "\n";
            } else {
                out << "rebuilt " << s.chunks << " chunks" << (s.has_ann ? " with ANN graph" : "")
                    << "; parity " << (s.parity ? "ok" : "BROKEN") << "\n";
            }
            if (!s.parity) return kExitInternal;
        } else if (*snapshot) {
            const std::string bytes = service->snapshot(resolve_bot(*service, bot_ref));
            write_file(path, bytes);
            if (g.json) {
                out << json{{"archive", path}, {"bytes", bytes.size()}}.dump(2) << "\n";
            } else {
                out << "wrote " << bytes.size() << " bytes to " << path << "\n";
            }
        } else if (*restore) {
            const BotConfig bot = service->restore(read_file(path), replace);
            if (g.json) {
                out << bot_to_json(bot, false).dump(2) << "\n";
            } else {
                out << "restored bot " << bot.bot_id << " (" << bot.name << ")\n";
            }
        } else if (*exporter) {
            const auto records = service->list_records(resolve_bot(*service, bot_ref),
                                                       from.empty() ? Timestamp{} : parse_timestamp(from),
                                                       to.empty() ? Timestamp::max() : parse_timestamp(to),
                                                       parse_record_filter(filter));
            std::string payload;
            if (g.json) {
                json list = json::array();
                for (const InteractionRecord& r : records) list.push_back(r);
                payload = json{{"records", list}}.dump(2) + "\n";
            } else {
                payload = records_to_csv(records);
            }
            if (path.empty()) {
                out << payload;
            } else {
                write_file(path, payload);
            }
        }
        return kExitOk;
    } catch (const Error& e) {
        if (g.json) {
            err << json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}.dump() << "\n";
        } else {
            err << "error: " << e.what() << "\n";
        }
        const bool internal = e.code() == ErrorCode::internal || e.code() == ErrorCode::corrupt_data;
        return internal ? kExitInternal : kExitUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace ragdesk
