#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragdesk/common.hpp"
#include "ragdesk/corpus.hpp"

namespace ragdesk {

enum class Rating { up, down };

std::string_view to_string(Rating rating) noexcept;
Rating parse_rating(std::string_view name);

enum class RecordFilter { all, rated_down, uncorrected };

std::string_view to_string(RecordFilter filter) noexcept;
RecordFilter parse_record_filter(std::string_view name);

struct AuditEntry {
    Timestamp at;
    std::string event;

    bool operator==(const AuditEntry&) const = default;
};

/// One question/answer exchange. `failed` marks exchanges where the pipeline
/// could not produce an answer; `answer` then holds the failure message.
struct InteractionRecord {
    RecordId record_id;
    std::string session_id;
    std::string bot_id;
    std::string question;
    std::string answer;
    std::vector<ChunkId> passages_used;
    std::optional<Rating> rating;
    std::optional<std::string> correction;
    std::optional<std::string> correction_author;
    Timestamp created_at;
    std::optional<Timestamp> corrected_at;
    bool failed = false;
    bool degraded = false;
    std::vector<AuditEntry> audit;

    bool operator==(const InteractionRecord&) const = default;
};

/// Stores the rating; a second rating overwrites the first and leaves an
/// audit entry naming both values.
void apply_rating(InteractionRecord& record, Rating rating, Timestamp now);

/// Stores the (latest) correction on the record and audits the change.
void apply_correction(InteractionRecord& record, std::string_view corrected_answer, std::string_view author,
                      Timestamp now);

/// Corpus document carrying a correction: "Q: <question>\nA: <answer>".
Document correction_document(const InteractionRecord& record, std::string_view corrected_answer, Timestamp now);

inline constexpr std::string_view kCorrectionSource = "correction";

/// Records of bot_id created in [from, to) that pass the filter, newest first
/// (ties by descending record id). Throws when from > to.
std::vector<InteractionRecord> list_interactions(std::span<const InteractionRecord> records,
                                                 std::string_view bot_id, Timestamp from, Timestamp to,
                                                 RecordFilter filter = RecordFilter::all);

/// CSV with a header row, one line per record, for offline review.
std::string records_to_csv(std::span<const InteractionRecord> records);

}  // namespace ragdesk
