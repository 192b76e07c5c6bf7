#include "http_client.hpp"

#include <httplib.h>

#include "ragdesk/common.hpp"

namespace ragdesk::detail {
namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::invalid_argument, "URL must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout,
                         const std::vector<std::pair<std::string, std::string>>& headers) {
    const SplitUrl target = split_url(url);
    httplib::Client client(target.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers request_headers;
    for (const auto& [name, value] : headers) request_headers.emplace(name, value);

    const auto result = client.Post(target.path, request_headers, body.dump(), "application/json");
    if (!result) {
        throw Error(ErrorCode::transport,
                    "request to " + url + " failed: " + httplib::to_string(result.error()));
    }
    const int status = result->status;
    if (status == 429) {
        throw Error(ErrorCode::rate_limited, url + " responded 429 (rate limited)");
    }
    if (status == 401 || status == 403) {
        throw Error(ErrorCode::unauthorized, url + " rejected the credentials (" + std::to_string(status) + ")");
    }
    if (status < 200 || status >= 300) {
        throw Error(ErrorCode::transport, url + " responded " + std::to_string(status));
    }
    try {
        return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::transport, url + " returned malformed JSON: " + e.what());
    }
}

}  // namespace ragdesk::detail
