#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ragdesk {

enum class ErrorCode {
    invalid_argument,
    not_found,
    conflict,
    unsupported_format,
    ingestion,
    transport,
    rate_limited,
    unauthorized,
    version_mismatch,
    corrupt_data,
    internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the library reports carries one of the codes above so that
/// the HTTP layer and the CLI can map it to a status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

template <typename Tag>
struct Id {
    std::uint64_t value = 0;

    friend constexpr auto operator<=>(Id, Id) = default;
};

using ChunkId = Id<struct ChunkTag>;
using DocId = Id<struct DocTag>;
using RecordId = Id<struct RecordTag>;

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp now_utc();

/// ISO-8601 with millisecond precision, e.g. 2024-03-01T12:00:00.000Z.
std::string format_timestamp(Timestamp ts);

/// Accepts ISO-8601 (`YYYY-MM-DDTHH:MM:SS[.mmm]Z`, the `Z` is optional) or
/// integer milliseconds since the Unix epoch.
Timestamp parse_timestamp(std::string_view text);

}  // namespace ragdesk

template <typename Tag>
struct std::hash<ragdesk::Id<Tag>> {
    std::size_t operator()(ragdesk::Id<Tag> id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
