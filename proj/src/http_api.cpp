#include "ragdesk/http_api.hpp"

#include <httplib.h>

#include "ragdesk/json_io.hpp"

namespace ragdesk {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return 400;
        case ErrorCode::version_mismatch: return 400;
        case ErrorCode::not_found: return 404;
        case ErrorCode::conflict: return 409;
        case ErrorCode::unsupported_format: return 415;
        case ErrorCode::ingestion: return 422;
        case ErrorCode::transport: return 502;
        case ErrorCode::unauthorized: return 502;  // an upstream provider rejected our credentials
        case ErrorCode::rate_limited: return 503;
        case ErrorCode::corrupt_data: return 500;
        case ErrorCode::internal: return 500;
    }
    return 500;
}

namespace {

json error_body(std::string_view code, std::string_view message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("request body is not valid JSON: ") + e.what());
    }
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
    return body;
}

template <typename T>
T field(const json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        throw Error(ErrorCode::invalid_argument, std::string("missing field '") + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::invalid_argument, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const json& body, const char* key, T fallback) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) return fallback;
    return field<T>(body, key);
}

bool equal_tokens(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    unsigned char diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
    return diff == 0;
}

RecordId record_id_of(const httplib::Request& req) {
    try {
        std::size_t used = 0;
        const auto value = std::stoull(req.matches[1].str(), &used);
        if (static_cast<std::ptrdiff_t>(used) == req.matches[1].length()) return RecordId{value};
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::invalid_argument, "record id must be a positive integer");
}

}  // namespace

json query_payload(const QueryResponse& r) {
    json passages = json::array();
    for (const ContextPassage& p : r.passages) passages.push_back(p);
    return {{"answer", r.answer},
            {"passages", std::move(passages)},
            {"record_id", r.record_id.value},
            {"degraded", r.degraded},
            {"query_truncated", r.query_truncated},
            {"session_id", r.session_id}};
}

json ingestion_payload(const IngestionReport& r) {
    return {{"doc_id", r.doc_id.value}, {"chunk_count", r.chunk_count}, {"token_total", r.token_total}};
}

json create_bot_payload(const BotConfig& bot) {
    json out = bot_to_json(bot, true);
    out["embed_snippet"] = embed_snippet(bot);
    return out;
}

struct HttpApi::Impl {
    Impl(Service& s, ApiOptions o) : service(s), options(std::move(o)) {
        if (options.instructor_token.empty()) {
            throw Error(ErrorCode::invalid_argument, "an instructor token is required to serve the API");
        }
        server.set_payload_max_length(64u << 20);
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type, X-Bot-Key");
            res.status = 204;
        });
        routes();
    }

    bool is_instructor(const httplib::Request& req) const {
        const std::string auth = req.get_header_value("Authorization");
        constexpr std::string_view kBearer = "Bearer ";
        return auth.starts_with(kBearer) && equal_tokens(auth.substr(kBearer.size()), options.instructor_token);
    }

    bool has_bot_key(const httplib::Request& req, const std::string& bot_id) const {
        return service.check_bot_key(bot_id, req.get_header_value("X-Bot-Key"));
    }

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static void deny(httplib::Response& res) {
        send(res, 401, error_body("unauthorized", "missing or invalid credentials"));
    }

    /// Wraps a handler with instructor auth (when required) and error mapping.
    httplib::Server::Handler wrap(bool instructor_only, Handler fn) {
        return [this, instructor_only, fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            if (instructor_only && !is_instructor(req)) return deny(res);
            try {
                fn(req, res);
            } catch (const QueryFailure& e) {
                json body = error_body(to_string(e.code()), e.what());
                body["record_id"] = e.record_id.value;
                body["session_id"] = e.session_id;
                send(res, http_status(e.code()), body);
            } catch (const Error& e) {
                send(res, http_status(e.code()), error_body(to_string(e.code()), e.what()));
            } catch (const json::exception& e) {
                send(res, 400, error_body("invalid_argument", e.what()));
            } catch (const std::exception& e) {
                send(res, 500, error_body("internal", e.what()));
            }
        };
    }

    void routes() {
        server.Get("/health", wrap(false, [this](const httplib::Request&, httplib::Response& res) {
                       send(res, 200, {{"status", "ok"}, {"bots", service.bots().size()}});
                   }));

        server.Post("/bots", wrap(true, [this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        CreateBotRequest request;
                        request.name = field<std::string>(body, "name");
                        request.greeting = optional_field<std::string>(body, "greeting", "");
                        request.openness = field<int>(body, "openness");
                        if (const auto it = body.find("retrieval"); it != body.end() && !it->is_null()) {
                            request.retrieval = it->get<RetrievalConfig>();
                        }
                        send(res, 201, create_bot_payload(service.create_bot(request)));
                    }));

        server.Get("/bots", wrap(true, [this](const httplib::Request&, httplib::Response& res) {
                       json list = json::array();
                       for (const BotConfig& b : service.bots()) list.push_back(bot_to_json(b, true));
                       send(res, 200, {{"bots", list}});
                   }));

        server.Get(R"(/bots/([^/]+))", wrap(true, [this](const httplib::Request& req, httplib::Response& res) {
                       const std::string id = req.matches[1];
                       json out = bot_to_json(service.bot(id), true);
                       const BotStats s = service.stats(id);
                       out["stats"] = {{"documents", s.documents}, {"chunks", s.chunks},
                                       {"records", s.records},     {"vocab_size", s.vocab_size},
                                       {"has_ann", s.has_ann},     {"parity", s.parity}};
                       send(res, 200, out);
                   }));

        server.Get(R"(/bots/([^/]+)/profile)",
                   wrap(false, [this](const httplib::Request& req, httplib::Response& res) {
                       const BotConfig bot = service.bot(req.matches[1]);
                       send(res, 200, {{"bot_id", bot.bot_id}, {"name", bot.name}, {"greeting", bot.greeting}});
                   }));

        server.Post(R"(/bots/([^/]+)/documents)",
                    wrap(true, [this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        UploadRequest request;
                        request.source_name = field<std::string>(body, "source_name");
                        request.format = optional_field<std::string>(body, "format", "");
                        request.content = field<std::string>(body, "content");
                        send(res, 201, ingestion_payload(service.upload_document(req.matches[1], request)));
                    }));

        server.Post(R"(/bots/([^/]+)/query)",
                    wrap(false, [this](const httplib::Request& req, httplib::Response& res) {
                        const std::string bot_id = req.matches[1];
                        if (!is_instructor(req) && !has_bot_key(req, bot_id)) return deny(res);
                        const json body = parse_body(req);
                        const QueryResponse r =
                            service.query(bot_id, optional_field<std::string>(body, "session_id", ""),
                                          field<std::string>(body, "text"));
                        send(res, 200, query_payload(r));
                    }));

        server.Post(R"(/records/(\d+)/rating)",
                    wrap(false, [this](const httplib::Request& req, httplib::Response& res) {
                        const RecordId id = record_id_of(req);
                        if (!is_instructor(req)) {
                            std::string owner;
                            try {
                                owner = service.record(id).bot_id;
                            } catch (const Error&) {
                                return deny(res);
                            }
                            if (!has_bot_key(req, owner)) return deny(res);
                        }
                        const json body = parse_body(req);
                        const Rating rating = parse_rating(field<std::string>(body, "rating"));
                        send(res, 200, json(service.rate(id, rating)));
                    }));

        server.Post(R"(/records/(\d+)/correction)",
                    wrap(true, [this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        const CorrectionReport r =
                            service.submit_correction(record_id_of(req), field<std::string>(body, "text"),
                                                      optional_field<std::string>(body, "author", ""));
                        send(res, 200,
                             {{"record", r.record},
                              {"doc_id", r.ingestion.doc_id.value},
                              {"chunk_count", r.ingestion.chunk_count}});
                    }));

        server.Get(R"(/bots/([^/]+)/records)",
                   wrap(true, [this](const httplib::Request& req, httplib::Response& res) {
                       const Timestamp from = req.has_param("from") ? parse_timestamp(req.get_param_value("from"))
                                                                    : Timestamp{};
                       const Timestamp to =
                           req.has_param("to") ? parse_timestamp(req.get_param_value("to")) : Timestamp::max();
                       const RecordFilter filter = parse_record_filter(req.get_param_value("filter"));
                       json list = json::array();
                       for (const InteractionRecord& r : service.list_records(req.matches[1], from, to, filter)) {
                           list.push_back(r);
                       }
                       send(res, 200, {{"records", list}});
                   }));
    }

    Service& service;
    ApiOptions options;
    httplib::Server server;
};

HttpApi::HttpApi(Service& service, ApiOptions options) : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port)
                                                                             ? port
                                                                             : -1;
    if (bound < 0) throw Error(ErrorCode::transport, "cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

void HttpApi::run() { impl_->server.listen_after_bind(); }

void HttpApi::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace ragdesk
