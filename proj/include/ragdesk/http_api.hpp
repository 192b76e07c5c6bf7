#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ragdesk/service.hpp"

namespace ragdesk {

struct ApiOptions {
    /// Bearer token for instructor endpoints. Must not be empty.
    std::string instructor_token;
};

/// Response bodies shared by the HTTP routes and the CLI's --json output.
nlohmann::json query_payload(const QueryResponse& response);
nlohmann::json ingestion_payload(const IngestionReport& report);
nlohmann::json create_bot_payload(const BotConfig& bot);

/// HTTP status used for an error code raised by the service.
int http_status(ErrorCode code) noexcept;

/// JSON routes over a Service:
///   GET  /health
///   POST /bots, GET /bots, GET /bots/{id}, GET /bots/{id}/profile
///   POST /bots/{id}/documents, POST /bots/{id}/query
///   POST /records/{id}/rating, POST /records/{id}/correction
///   GET  /bots/{id}/records?from&to&filter
class HttpApi {
public:
    HttpApi(Service& service, ApiOptions options);
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Binds the socket; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ragdesk
