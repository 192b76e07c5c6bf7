#include "ragdesk/common.hpp"

#include <cstdio>
#include <string>

namespace ragdesk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::unsupported_format: return "unsupported_format";
        case ErrorCode::ingestion: return "ingestion_error";
        case ErrorCode::transport: return "transport_error";
        case ErrorCode::rate_limited: return "rate_limited";
        case ErrorCode::unauthorized: return "unauthorized";
        case ErrorCode::version_mismatch: return "version_mismatch";
        case ErrorCode::corrupt_data: return "corrupt_data";
        case ErrorCode::internal: return "internal_error";
    }
    return "internal_error";
}

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const auto since_midnight = ts - day;
    const auto h = duration_cast<hours>(since_midnight);
    const auto m = duration_cast<minutes>(since_midnight - h);
    const auto s = duration_cast<seconds>(since_midnight - h - m);
    const auto ms = since_midnight - h - m - s;

    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(s.count()),
                  static_cast<int>(ms.count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const std::string s(text);
    if (s.empty()) {
        throw Error(ErrorCode::invalid_argument, "empty timestamp");
    }

    bool all_digits = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (!(c >= '0' && c <= '9') && !(i == 0 && c == '-')) {
            all_digits = false;
            break;
        }
    }
    if (all_digits) {
        try {
            return Timestamp{milliseconds{std::stoll(s)}};
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, "timestamp out of range: " + s);
        }
    }

    int y = 0;
    unsigned mo = 0, d = 0;
    int hh = 0, mm = 0, ss = 0, frac = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%n", &y, &mo, &d, &hh, &mm, &ss,
                    &consumed) != 6) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp: " + s);
    }
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (digits < 3) {
                frac = frac * 10 + (s[pos] - '0');
                ++digits;
            }
            ++pos;
        }
        if (digits == 0) {
            throw Error(ErrorCode::invalid_argument, "malformed timestamp: " + s);
        }
        while (digits < 3) {
            frac *= 10;
            ++digits;
        }
    }
    if (pos < s.size() && s[pos] == 'Z') {
        ++pos;
    }
    if (pos != s.size()) {
        throw Error(ErrorCode::invalid_argument, "malformed timestamp: " + s);
    }

    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw Error(ErrorCode::invalid_argument, "invalid calendar timestamp: " + s);
    }
    return Timestamp{sys_days{ymd}.time_since_epoch() + hours{hh} + minutes{mm} +
                     seconds{ss} + milliseconds{frac}};
}

}  // namespace ragdesk
