#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ragdesk::detail {

/// POSTs JSON to a full URL and returns the parsed JSON reply.
///
/// Failure mapping: connection problems and 5xx/unexpected statuses raise
/// ErrorCode::transport, 429 raises ErrorCode::rate_limited, 401/403 raise
/// ErrorCode::unauthorized, and an unparseable body raises ErrorCode::transport.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout,
                         const std::vector<std::pair<std::string, std::string>>& headers = {});

}  // namespace ragdesk::detail
