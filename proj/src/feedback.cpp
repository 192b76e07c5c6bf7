#include "ragdesk/feedback.hpp"

#include <algorithm>

namespace ragdesk {

std::string_view to_string(Rating rating) noexcept { return rating == Rating::up ? "up" : "down"; }

Rating parse_rating(std::string_view name) {
    if (name == "up") return Rating::up;
    if (name == "down") return Rating::down;
    throw Error(ErrorCode::invalid_argument, "rating must be 'up' or 'down'");
}

std::string_view to_string(RecordFilter filter) noexcept {
    switch (filter) {
        case RecordFilter::all: return "all";
        case RecordFilter::rated_down: return "rated_down";
        case RecordFilter::uncorrected: return "uncorrected";
    }
    return "all";
}

RecordFilter parse_record_filter(std::string_view name) {
    if (name.empty() || name == "all") return RecordFilter::all;
    if (name == "rated_down") return RecordFilter::rated_down;
    if (name == "uncorrected") return RecordFilter::uncorrected;
    throw Error(ErrorCode::invalid_argument, "filter must be one of all, rated_down, uncorrected");
}

void apply_rating(InteractionRecord& record, Rating rating, Timestamp now) {
    std::string event = "rated " + std::string(to_string(rating));
    if (record.rating) event += " (was " + std::string(to_string(*record.rating)) + ")";
    record.rating = rating;
    record.audit.push_back({now, std::move(event)});
}

void apply_correction(InteractionRecord& record, std::string_view corrected_answer, std::string_view author,
                      Timestamp now) {
    if (clean_text(corrected_answer).empty()) {
        throw Error(ErrorCode::invalid_argument, "correction text must not be empty");
    }
    const bool replacing = record.correction.has_value();
    record.correction = std::string(corrected_answer);
    record.correction_author = std::string(author);
    record.corrected_at = now;
    record.audit.push_back({now, std::string(replacing ? "correction replaced" : "corrected") +
                                     (author.empty() ? "" : " by " + std::string(author))});
}

Document correction_document(const InteractionRecord& record, std::string_view corrected_answer, Timestamp now) {
    Document doc;
    doc.source_name = std::string(kCorrectionSource);
    doc.format = DocumentFormat::plain;
    doc.raw_text = "Q: " + record.question + "\nA: " + std::string(corrected_answer);
    doc.ingested_at = now;
    return doc;
}

std::vector<InteractionRecord> list_interactions(std::span<const InteractionRecord> records,
                                                 std::string_view bot_id, Timestamp from, Timestamp to,
                                                 RecordFilter filter) {
    if (from > to) throw Error(ErrorCode::invalid_argument, "'from' must not be later than 'to'");
    std::vector<InteractionRecord> out;
    for (const InteractionRecord& r : records) {
        if (r.bot_id != bot_id || r.created_at < from || r.created_at >= to) continue;
        if (filter == RecordFilter::rated_down && r.rating != Rating::down) continue;
        if (filter == RecordFilter::uncorrected && r.correction) continue;
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const InteractionRecord& a, const InteractionRecord& b) {
        if (a.created_at != b.created_at) return a.created_at > b.created_at;
        return a.record_id > b.record_id;
    });
    return out;
}

std::string records_to_csv(std::span<const InteractionRecord> records) {
    std::string out =
        "record_id,bot_id,session_id,created_at,question,answer,rating,correction,corrected_at,"
        "correction_author,failed,degraded,passages_used\n";
    for (const InteractionRecord& r : records) {
        std::string passages;
        for (std::size_t i = 0; i < r.passages_used.size(); ++i) {
            if (i > 0) passages.push_back(' ');
            passages += std::to_string(r.passages_used[i].value);
        }
        const std::vector<std::string> fields = {
            std::to_string(r.record_id.value),
            r.bot_id,
            r.session_id,
            format_timestamp(r.created_at),
            r.question,
            r.answer,
            r.rating ? std::string(to_string(*r.rating)) : "",
            r.correction.value_or(""),
            r.corrected_at ? format_timestamp(*r.corrected_at) : "",
            r.correction_author.value_or(""),
            r.failed ? "1" : "0",
            r.degraded ? "1" : "0",
            passages,
        };
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += csv_escape(fields[i]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace ragdesk
